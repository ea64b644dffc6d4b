#include "vplab/spectral.hpp"

#include "vplab/random_matrix.hpp"
#include "vplab/replica.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <stdexcept>
#include <tuple>

namespace vplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kLn2 = std::numbers::ln2;

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double logaddexp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Integrates f over [a, b], split at the given interior breakpoints.
double integrate_pieces(const std::function<double(double)>& f, double a, double b, std::vector<double> cuts,
                        double tol) {
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = std::max(a, cuts[i]), hi = std::min(b, cuts[i + 1]);
        if (hi - lo <= 1e-15 * std::max(1.0, std::abs(hi))) continue;
        s += integrate_adaptive(f, lo, hi, tol).value;
    }
    return s;
}

// Caches of the replica quantities that do not depend on snr.
struct LatticeEntry {
    double energy = 0.0;
    std::vector<double> c, P;
};

std::shared_mutex g_memo_mutex;
std::map<std::tuple<double, int, int, double>, LatticeEntry> g_lattice_memo;
std::map<std::pair<double, double>, double> g_crqpsk_memo;

LatticeEntry lattice_entry(double alpha, int L, const SolverConfig& cfg) {
    const auto key = std::make_tuple(alpha, L, cfg.quadrature_order, cfg.tolerance);
    {
        std::shared_lock lk(g_memo_mutex);
        auto it = g_lattice_memo.find(key);
        if (it != g_lattice_memo.end()) return it->second;
    }
    OneRsbSolution s = solve_1rsb_lattice(alpha, L, cfg);
    LatticeEntry e;
    e.energy = s.energy;
    e.c = RelaxationScheme::lattice(L).c_sorted();
    e.P = marginal_1rsb_lattice(s, cfg);
    std::unique_lock lk(g_memo_mutex);
    g_lattice_memo.emplace(key, e);
    return e;
}

double crqpsk_energy(double alpha, const SolverConfig& cfg) {
    const auto key = std::make_pair(alpha, cfg.tolerance);
    {
        std::shared_lock lk(g_memo_mutex);
        auto it = g_crqpsk_memo.find(key);
        if (it != g_crqpsk_memo.end()) return it->second;
    }
    const double E = solve_crqpsk_energy(alpha, cfg);
    std::unique_lock lk(g_memo_mutex);
    g_crqpsk_memo.emplace(key, E);
    return E;
}

void check_alpha_open_unit(double alpha, const char* who) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument(std::string(who) + ": alpha must lie in (0,1)");
}

}  // namespace

std::string se_scheme_name(SeScheme s) {
    switch (s) {
        case SeScheme::Dpc: return "dpc";
        case SeScheme::ZfGaussian: return "zf-gauss";
        case SeScheme::ZfQpsk: return "zf-qpsk";
        case SeScheme::Lattice: return "lattice";
        case SeScheme::CrQpsk: return "cr-qpsk";
        case SeScheme::Gthp: return "gthp";
    }
    return "?";
}

SeScheme parse_se_scheme(const std::string& name) {
    for (SeScheme s : {SeScheme::Dpc, SeScheme::ZfGaussian, SeScheme::ZfQpsk, SeScheme::Lattice, SeScheme::CrQpsk,
                       SeScheme::Gthp})
        if (se_scheme_name(s) == name) return s;
    throw std::invalid_argument("unknown scheme: " + name);
}

double se_scheme_max_alpha(SeScheme s) { return s == SeScheme::CrQpsk ? 2.0 : 1.0; }

void GthpConfig::validate() const {
    if (inflation && !(*inflation > 0.0 && *inflation <= 1.0))
        throw std::invalid_argument("GthpConfig: inflation must lie in (0,1]");
    if (truncation < 1) throw std::invalid_argument("GthpConfig: truncation must be >= 1");
    if (!(noise_level > 0.0)) throw std::invalid_argument("GthpConfig: noise level must be positive");
    if (nu_points < 1) throw std::invalid_argument("GthpConfig: nu_points must be >= 1");
}

// ---------------------------------------------------------------- closed forms

double se_dpc(double snr, double alpha) {
    if (!(snr >= 0.0) || !(alpha > 0.0)) throw std::invalid_argument("se_dpc: need snr >= 0 and alpha > 0");
    if (snr == 0.0) return 0.0;
    const double ra = std::sqrt(alpha);
    const double d = std::sqrt(snr * (1 + ra) * (1 + ra) + 1) - std::sqrt(snr * (1 - ra) * (1 - ra) + 1);
    const double F = d * d;
    return alpha * std::log2(1 + snr - 0.25 * F) + std::log2(1 + alpha * snr - 0.25 * F) -
           F / (4.0 * snr * kLn2);
}

double se_zf_gaussian(double snr, double alpha) {
    check_alpha_open_unit(alpha, "se_zf_gaussian");
    if (!(snr >= 0.0)) throw std::invalid_argument("se_zf_gaussian: snr must be nonnegative");
    return alpha * std::log2(1 + (1 - alpha) * snr);
}

double bpsk_mixture_mi(double rho, const std::vector<double>& c, const std::vector<double>& P) {
    if (c.size() != P.size() || c.empty()) throw std::invalid_argument("bpsk_mixture_mi: size mismatch");
    if (!(rho >= 0.0)) throw std::invalid_argument("bpsk_mixture_mi: rho must be nonnegative");
    if (rho == 0.0) return 0.0;
    const double sr = std::sqrt(rho);
    const std::size_t L = c.size();
    std::vector<double> logP(L);
    for (std::size_t k = 0; k < L; ++k) logP[k] = P[k] > 0 ? std::log(P[k]) : -kInf;
    // log f(-y|1) - log f(y|1), the log likelihood ratio against u = 1
    auto llr = [&](double y) {
        double num = -kInf, den = -kInf;
        for (std::size_t k = 0; k < L; ++k) {
            num = logaddexp(num, logP[k] - rho * (y + c[k]) * (y + c[k]));
            den = logaddexp(den, logP[k] - rho * (y - c[k]) * (y - c[k]));
        }
        return num - den;
    };
    double loss = 0.0;
    for (std::size_t k = 0; k < L; ++k) {
        if (!(P[k] > 0)) continue;
        auto f = [&](double t) {
            return std::exp(-t * t) / std::sqrt(std::numbers::pi) * softplus(llr(c[k] + t / sr)) / kLn2;
        };
        loss += P[k] * integrate_pieces(f, -9.0, 9.0, {0.0}, 1e-12);
    }
    return std::clamp(1.0 - loss, 0.0, 1.0);
}

double se_zf_bpsk(double snr, double alpha) {
    check_alpha_open_unit(alpha, "se_zf_bpsk");
    if (!(snr >= 0.0)) throw std::invalid_argument("se_zf_bpsk: snr must be nonnegative");
    return alpha * bpsk_mixture_mi((1 - alpha) * snr, {1.0}, {1.0});
}

double se_zf_qpsk(double snr, double alpha) { return 2.0 * se_zf_bpsk(snr / 2.0, alpha); }

// ---------------------------------------------------------------- lattice

EquivalentChannel equivalent_channel_lattice(double snr, double alpha, int L, const SolverConfig& cfg) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("se_lattice_qpsk: alpha must lie in (0,1]");
    if (!(snr >= 0.0)) throw std::invalid_argument("se_lattice_qpsk: snr must be nonnegative");
    const LatticeEntry e = lattice_entry(alpha, L, cfg);
    EquivalentChannel ch;
    ch.rho = snr / e.energy;
    ch.points = e.c;
    ch.probabilities = e.P;
    ch.scheme = SeScheme::Lattice;
    return ch;
}

double se_from_channel(const EquivalentChannel& ch, double alpha) {
    return 2.0 * alpha * bpsk_mixture_mi(ch.rho, ch.points, ch.probabilities);
}

double se_lattice_qpsk(double snr, double alpha, int L, const SolverConfig& cfg) {
    return se_from_channel(equivalent_channel_lattice(snr, alpha, L, cfg), alpha);
}

double mc_channel_se(const EquivalentChannel& ch, double alpha, std::int64_t samples, std::uint64_t seed) {
    if (samples <= 0) throw std::invalid_argument("mc_channel_se: samples must be positive");
    boost::random::mt19937_64 rng(splitmix64(seed));
    boost::random::normal_distribution<double> noise(0.0, std::sqrt(0.5 / ch.rho));
    boost::random::uniform_01<double> unif;
    const std::size_t L = ch.points.size();
    std::vector<double> cdf(L);
    double acc = 0.0;
    for (std::size_t k = 0; k < L; ++k) cdf[k] = acc += ch.probabilities[k];
    double sum = 0.0;
    for (std::int64_t n = 0; n < samples; ++n) {
        const double u = unif(rng) < 0.5 ? -1.0 : 1.0;
        const double r = unif(rng) * acc;
        const std::size_t k = std::min<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), r) - cdf.begin(), L - 1);
        const double y = u * ch.points[k] + noise(rng);
        double lu = -kInf, lo = -kInf;
        for (std::size_t j = 0; j < L; ++j) {
            const double lp = std::log(ch.probabilities[j]);
            lu = logaddexp(lu, lp - ch.rho * (y - u * ch.points[j]) * (y - u * ch.points[j]));
            lo = logaddexp(lo, lp - ch.rho * (y + u * ch.points[j]) * (y + u * ch.points[j]));
        }
        // log2 f(y|u) / (f(y|u)/2 + f(y|-u)/2)
        sum += (1.0 - softplus(lo - lu) / kLn2);
    }
    return 2.0 * alpha * sum / static_cast<double>(samples);
}

// ---------------------------------------------------------------- CR-QPSK

namespace {

double crqpsk_log_density(double y, double rho, double alpha, double energy, double logQ1) {
    const double t = alpha * energy;
    const double w = 1.0 + rho * t;
    const double arg = std::sqrt(2.0 / t) * (rho * t * (1.0 - y) + 1.0) / std::sqrt(w);
    const double cont = log_q(arg) - 0.5 * std::log(w) - y * y * rho / w;
    const double atom = logQ1 - (y - 1.0) * (y - 1.0) * rho;
    return 0.5 * std::log(rho / std::numbers::pi) + logaddexp(cont, atom);
}

}  // namespace

double crqpsk_output_density(double y, double rho, double alpha, double energy) {
    const double logQ1 = log_q(-std::sqrt(2.0 / (alpha * energy)));
    return std::exp(crqpsk_log_density(y, rho, alpha, energy, logQ1));
}

double crqpsk_channel_mi(double rho, double alpha, double energy) {
    if (!(rho >= 0.0)) throw std::invalid_argument("crqpsk_channel_mi: rho must be nonnegative");
    if (rho == 0.0) return 0.0;
    const double logQ1 = log_q(-std::sqrt(2.0 / (alpha * energy)));
    const double sr = std::sqrt(rho);
    const double spread = std::sqrt((1.0 + rho * alpha * energy) / (2.0 * rho));
    const double Y = 1.0 + 10.0 / sr + 10.0 * spread;
    auto f = [&](double y) {
        const double a = crqpsk_log_density(y, rho, alpha, energy, logQ1);
        const double b = crqpsk_log_density(-y, rho, alpha, energy, logQ1);
        return a == -kInf ? 0.0 : std::exp(a) * softplus(b - a) / kLn2;
    };
    const double loss = integrate_pieces(f, -Y, Y, {-1.0, 0.0, 1.0, 1.0 - 5.0 / sr, 1.0 + 5.0 / sr}, 1e-10);
    return std::clamp(1.0 - loss, 0.0, 1.0);
}

double se_crqpsk(double snr, double alpha, const SolverConfig& cfg) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("se_crqpsk: alpha must lie in (0,2)");
    if (!(snr >= 0.0)) throw std::invalid_argument("se_crqpsk: snr must be nonnegative");
    if (snr == 0.0) return 0.0;
    const double E = crqpsk_energy(alpha, cfg);
    return 2.0 * alpha * crqpsk_channel_mi(snr / E, alpha, E);
}

// ---------------------------------------------------------------- GTHP

double GthpDensities::pre_modulo(double z) const {
    const double a = (1.0 - inflation) * delta;
    if (a <= 1e-9 * sigma) return std::exp(-0.5 * z * z / (sigma * sigma)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    return std::exp(log_q_diff((z - a) / sigma, (z + a) / sigma)) / (2.0 * a);
}

double GthpDensities::noise(double z) const {
    double s = 0.0;
    for (int i = -images; i <= images; ++i) s += pre_modulo(z - 2.0 * i * delta);
    return s;
}

double GthpDensities::output(double z) const {
    double s = 0.0;
    for (int i = -images; i <= images; ++i)
        s += 0.5 * (pre_modulo(z - 0.5 * delta - 2.0 * i * delta) + pre_modulo(z + 0.5 * delta - 2.0 * i * delta));
    return s;
}

GthpDensities gthp_densities(double Px, double inflation, const GthpConfig& cfg) {
    cfg.validate();
    if (!(Px > 0.0)) throw std::invalid_argument("gthp: Px must be positive");
    if (!(inflation > 0.0 && inflation <= 1.0)) throw std::invalid_argument("gthp: inflation must lie in (0,1]");
    GthpDensities d;
    d.delta = std::sqrt(3.0 * Px);
    d.inflation = inflation;
    d.sigma = inflation * std::sqrt(cfg.noise_level);
    d.images = cfg.truncation;
    const double a = (1.0 - inflation) * d.delta;
    // widen until the mass outside the summed images is negligible
    while (2.0 * q_function(((2.0 * d.images + 0.5) * d.delta - a) / d.sigma) > 1e-10) {
        if (d.images > (1 << 20)) throw ConvergenceError("gthp: modulo image sum does not converge", {}, kInf);
        d.images *= 2;
    }
    return d;
}

namespace {

double wrap(double z, double delta) {
    double w = std::fmod(z + delta, 2.0 * delta);
    if (w < 0) w += 2.0 * delta;
    return w - delta;
}

double neg_entropy_bits(const std::function<double(double)>& f, double delta, const std::vector<double>& cuts) {
    auto g = [&](double z) {
        const double v = f(z);
        return v > 0.0 ? v * std::log2(v) : 0.0;
    };
    std::vector<double> w;
    for (double c : cuts) w.push_back(wrap(c, delta));
    return integrate_pieces(g, -delta, delta, w, 1e-11);
}

}  // namespace

double gthp_rate_binary(double Px, double inflation, const GthpConfig& cfg) {
    const GthpDensities d = gthp_densities(Px, inflation, cfg);
    const double a = (1.0 - inflation) * d.delta, h = 0.5 * d.delta;
    const double n = neg_entropy_bits([&](double z) { return d.noise(z); }, d.delta, {a, -a, 0.0});
    const double y = neg_entropy_bits([&](double z) { return d.output(z); }, d.delta,
                                      {h + a, h - a, -h + a, -h - a, h, -h});
    return std::clamp(n - y, 0.0, 1.0);
}

double gthp_rate_continuous(double Px, double inflation, const GthpConfig& cfg) {
    const GthpDensities d = gthp_densities(Px, inflation, cfg);
    const double a = (1.0 - inflation) * d.delta;
    const double n = neg_entropy_bits([&](double z) { return d.noise(z); }, d.delta, {a, -a, 0.0});
    return std::max(0.0, 0.5 * std::log2(12.0 * Px) + n);
}

std::pair<double, double> gthp_optimize_inflation(double Px, bool binary, const GthpConfig& cfg) {
    auto rate = [&](double t) { return binary ? gthp_rate_binary(Px, t, cfg) : gthp_rate_continuous(Px, t, cfg); };
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 1e-3, hi = 1.0;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = rate(x1), f2 = rate(x2);
    while (hi - lo > 1e-3) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = rate(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = rate(x1);
        }
    }
    std::pair<double, double> best = f1 > f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
    const double at_one = rate(1.0);
    if (at_one > best.second) best = {1.0, at_one};
    return best;
}

double se_gthp_qpsk(double snr, double alpha, const GthpConfig& cfg) {
    cfg.validate();
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("se_gthp_qpsk: alpha must lie in (0,1]");
    if (!(snr >= 0.0)) throw std::invalid_argument("se_gthp_qpsk: snr must be nonnegative");
    if (snr == 0.0) return 0.0;
    const double snr_b = snr / 2.0;
    // Gauss-Legendre over nu in [0, 1]
    using Gl = boost::math::quadrature::gauss<double, 20>;
    std::vector<double> nodes, weights;
    const int panels = std::max(1, cfg.nu_points / 20 + (cfg.nu_points % 20 != 0));
    for (int p = 0; p < panels; ++p) {
        const double a = double(p) / panels, b = double(p + 1) / panels;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (std::size_t j = 0; j < Gl::abscissa().size(); ++j)
            for (double sgn : {-1.0, 1.0}) {
                if (Gl::abscissa()[j] == 0.0 && sgn < 0) continue;
                nodes.push_back(mid + sgn * half * Gl::abscissa()[j]);
                weights.push_back(half * Gl::weights()[j]);
            }
    }
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double Px = (1.0 - nodes[i] * alpha) * snr_b;
        if (!(Px > 0.0)) continue;
        const double r = cfg.inflation ? gthp_rate_binary(Px, *cfg.inflation, cfg)
                                       : gthp_optimize_inflation(Px, true, cfg).second;
        s += weights[i] * r;
    }
    return 2.0 * alpha * s;
}

// ---------------------------------------------------------------- dispatch and Eb/N0

double se_at_snr(SeScheme scheme, double snr, double alpha, const SpectralOptions& opt) {
    switch (scheme) {
        case SeScheme::Dpc: return se_dpc(snr, alpha);
        case SeScheme::ZfGaussian: return se_zf_gaussian(snr, alpha);
        case SeScheme::ZfQpsk: return se_zf_qpsk(snr, alpha);
        case SeScheme::Lattice: return se_lattice_qpsk(snr, alpha, opt.L, opt.solver);
        case SeScheme::CrQpsk: return se_crqpsk(snr, alpha, opt.solver);
        case SeScheme::Gthp: return se_gthp_qpsk(snr, alpha, opt.gthp);
    }
    return kNaN;
}

double se_energy_db(SeScheme scheme, double alpha, const SpectralOptions& opt) {
    switch (scheme) {
        case SeScheme::ZfQpsk: return to_db(2.0 / (1.0 - alpha));
        case SeScheme::Lattice: return to_db(lattice_entry(alpha, opt.L, opt.solver).energy);
        case SeScheme::CrQpsk: return to_db(crqpsk_energy(alpha, opt.solver));
        default: return kNaN;
    }
}

namespace {

bool capped(SeScheme s) { return s != SeScheme::Dpc && s != SeScheme::ZfGaussian; }

double cap_of(SeScheme s, double alpha) { return capped(s) ? 2.0 * alpha : kInf; }

}  // namespace

SePoint se_at_ebno(SeScheme scheme, double ebno_db, double alpha, const SpectralOptions& opt) {
    SePoint pt;
    pt.scheme = scheme;
    pt.ebno_db = ebno_db;
    pt.alpha = alpha;
    pt.energy_db = se_energy_db(scheme, alpha, opt);
    const double ebno = from_db(ebno_db);
    auto h = [&](double snr) { return se_at_snr(scheme, snr, alpha, opt) - alpha * snr / ebno; };

    // C(snr) > alpha snr / ebno cannot hold once alpha snr / ebno exceeds the cap
    double snr_hi;
    if (capped(scheme)) {
        snr_hi = 2.02 * ebno;
    } else {
        snr_hi = 10.0 * ebno;
        while (h(snr_hi) > 0.0) snr_hi *= 10.0;
    }
    const double snr_lo = 1e-6 * snr_hi;
    const int n = 96;
    std::vector<double> grid(n), hv(n);
    for (int i = 0; i < n; ++i) {
        grid[i] = snr_lo * std::pow(snr_hi / snr_lo, double(i) / (n - 1));
        hv[i] = h(grid[i]);
    }
    int crossings = 0, top = -1;
    for (int i = 0; i + 1 < n; ++i)
        if (hv[i] > 0.0 && hv[i + 1] <= 0.0) {
            ++crossings;
            top = i;
        }
    pt.multivalued = crossings > 1;
    if (top < 0) {
        pt.C = 0.0;
        pt.snr_db = -kInf;
        return pt;
    }
    double lo = std::log(grid[top]), hi = std::log(grid[top + 1]);
    for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
        const double m = 0.5 * (lo + hi);
        (h(std::exp(m)) > 0.0 ? lo : hi) = m;
    }
    const double snr = std::exp(0.5 * (lo + hi));
    pt.C = alpha * snr / ebno;
    pt.snr_db = to_db(snr);
    if (!std::isnan(pt.energy_db)) pt.rho = snr / from_db(pt.energy_db);
    return pt;
}

std::vector<double> default_alpha_grid(SeScheme scheme, int points) {
    const double hi = scheme == SeScheme::CrQpsk ? 1.98 : 0.99, lo = 0.02;
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = lo + (hi - lo) * (i + 1) / points;
    return g;
}

namespace {

// Golden-section maximization of f on [a, b] to tolerance tol in x.
std::pair<double, double> golden_max(const std::function<double(double)>& f, double a, double b, double tol) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    return f1 >= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

}  // namespace

LoadOptimum optimize_load(SeScheme scheme, double ebno_db, const std::vector<double>& alpha_grid,
                          const SpectralOptions& opt) {
    if (alpha_grid.empty()) throw std::invalid_argument("optimize_load: empty alpha grid");
    std::vector<SePoint> pts(alpha_grid.size());
#ifdef VPLAB_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(alpha_grid.size()); ++i)
        pts[i] = se_at_ebno(scheme, ebno_db, alpha_grid[i], opt);
    std::size_t best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].C > pts[best].C) best = i;
    LoadOptimum out;
    out.alpha_star = alpha_grid[best];
    out.C_star = pts[best].C;
    out.point = pts[best];
    if (out.C_star <= 0.0 || alpha_grid.size() < 3) return out;
    const double a = alpha_grid[best == 0 ? 0 : best - 1];
    const double b = alpha_grid[std::min(best + 1, alpha_grid.size() - 1)];
    auto [x, fx] = golden_max([&](double al) { return se_at_ebno(scheme, ebno_db, al, opt).C; }, a, b, 1e-3);
    if (fx > out.C_star) {
        out.alpha_star = x;
        out.point = se_at_ebno(scheme, ebno_db, x, opt);
        out.C_star = out.point.C;
    }
    return out;
}

double ebno_for_rate(SeScheme scheme, double C, double alpha, const SpectralOptions& opt) {
    if (!(C > 0.0)) throw std::invalid_argument("ebno_for_rate: C must be positive");
    if (C >= cap_of(scheme, alpha)) return kInf;
    auto c = [&](double snr) { return se_at_snr(scheme, snr, alpha, opt); };
    double hi = 1.0;
    while (c(hi) < C) {
        hi *= 4.0;
        if (hi > 1e12) return kInf;
    }
    double lo = hi / 4.0;
    while (lo > 1e-12 && c(lo) >= C) lo /= 4.0;
    auto g = [&](double ls) { return c(std::exp(ls)) - C; };
    boost::uintmax_t iters = 100;
    const auto r = boost::math::tools::toms748_solve(g, std::log(lo), std::log(hi),
                                                     boost::math::tools::eps_tolerance<double>(36), iters);
    return to_db(alpha * std::exp(0.5 * (r.first + r.second)) / C);
}

LoadOptimum min_ebno_for_rate(SeScheme scheme, double C, const std::vector<double>& alpha_grid,
                              const SpectralOptions& opt) {
    if (alpha_grid.empty()) throw std::invalid_argument("min_ebno_for_rate: empty alpha grid");
    std::vector<double> e(alpha_grid.size());
#ifdef VPLAB_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(alpha_grid.size()); ++i)
        e[i] = ebno_for_rate(scheme, C, alpha_grid[i], opt);
    std::size_t best = 0;
    for (std::size_t i = 1; i < e.size(); ++i)
        if (e[i] < e[best]) best = i;
    LoadOptimum out;
    out.alpha_star = alpha_grid[best];
    out.C_star = C;
    out.point.scheme = scheme;
    out.point.C = C;
    out.point.alpha = out.alpha_star;
    out.point.ebno_db = e[best];
    if (!std::isfinite(e[best]) || alpha_grid.size() < 3) return out;
    const double a = alpha_grid[best == 0 ? 0 : best - 1];
    const double b = alpha_grid[std::min(best + 1, alpha_grid.size() - 1)];
    auto [x, fx] = golden_max([&](double al) { return -ebno_for_rate(scheme, C, al, opt); }, a, b, 1e-3);
    if (-fx < out.point.ebno_db) {
        out.alpha_star = x;
        out.point.alpha = x;
        out.point.ebno_db = -fx;
    }
    return out;
}

std::vector<double> se_crossovers(SeScheme a, SeScheme b, double lo_db, double hi_db, double step_db,
                                  const SpectralOptions& opt, int grid_points) {
    if (!(hi_db > lo_db) || !(step_db > 0.0)) throw std::invalid_argument("se_crossovers: bad Eb/N0 range");
    const auto ga = default_alpha_grid(a, grid_points), gb = default_alpha_grid(b, grid_points);
    auto diff = [&](double e) { return optimize_load(a, e, ga, opt).C_star - optimize_load(b, e, gb, opt).C_star; };
    std::vector<double> out;
    double e0 = lo_db, d0 = diff(e0);
    while (e0 < hi_db) {
        const double e1 = std::min(hi_db, e0 + step_db), d1 = diff(e1);
        if ((d0 > 0.0) != (d1 > 0.0)) {
            double l = e0, u = e1, dl = d0;
            while (u - l > 1e-3) {
                const double m = 0.5 * (l + u), dm = diff(m);
                if ((dm > 0.0) == (dl > 0.0)) {
                    l = m;
                    dl = dm;
                } else {
                    u = m;
                }
            }
            out.push_back(0.5 * (l + u));
        }
        e0 = e1;
        d0 = d1;
    }
    return out;
}

}  // namespace vplab
