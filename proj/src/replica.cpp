#include "vplab/replica.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

namespace vplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = std::numbers::sqrt2;
const double kSqrtPi = std::sqrt(std::numbers::pi);

struct Geometry {
    std::vector<double> c;  // ascending
    std::vector<double> v;  // L+1 boundaries, v[0] = -inf, v[L] = +inf
};

Geometry geometry(int L) {
    Geometry g;
    auto s = RelaxationScheme::lattice(L);
    g.c = s.c_sorted();
    g.v.push_back(-kInf);
    for (double b : voronoi_boundaries(s)) g.v.push_back(b);
    g.v.push_back(kInf);
    return g;
}

double logsumexp(const double* x, int n) {
    double m = -kInf;
    for (int i = 0; i < n; ++i) m = std::max(m, x[i]);
    if (m == -kInf) return m;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::exp(x[i] - m);
    return m + std::log(s);
}

// Gaussian integrals over a cell (a, b) for z with density exp(-z^2)/sqrt(pi).
double cell_prob(double a, double b) { return std::exp(log_q_diff(kSqrt2 * a, kSqrt2 * b)); }
double cell_first_moment(double a, double b) {
    double ea = std::isinf(a) ? 0.0 : std::exp(-a * a);
    double eb = std::isinf(b) ? 0.0 : std::exp(-b * b);
    return (ea - eb) / (2.0 * kSqrtPi);
}

// Per-xi quantities of the lattice 1RSB kernel.
struct XiStats {
    double lse = 0.0;      // log sum_k Theta_k
    double mean_c = 0.0;   // sum c Theta / sum Theta
    double mean_c2 = 0.0;  // sum c^2 Theta / sum Theta
    double psi_c = 0.0;    // sum c Psi / sum Theta
};

struct Kernel {
    const Geometry& geo;
    double eps, g, f, mu;

    XiStats at(double xi, double* weights = nullptr) const {
        const int L = static_cast<int>(geo.c.size());
        std::array<double, 32> lt{}, la{}, lb{};
        for (int k = 0; k < L; ++k) {
            const double c = geo.c[k];
            const double shift = mu * g * c;
            const double A = std::isinf(geo.v[k]) ? -kInf : (eps * geo.v[k] - f * xi) / g - shift;
            const double B = std::isinf(geo.v[k + 1]) ? kInf : (eps * geo.v[k + 1] - f * xi) / g - shift;
            const double expo = mu * c * ((mu * g * g - eps) * c + 2.0 * f * xi);
            lt[k] = expo + log_q_diff(kSqrt2 * A, kSqrt2 * B);
            la[k] = std::isinf(A) ? -kInf : expo - A * A;
            lb[k] = std::isinf(B) ? -kInf : expo - B * B;
        }
        XiStats s;
        s.lse = logsumexp(lt.data(), L);
        for (int k = 0; k < L; ++k) {
            const double w = std::exp(lt[k] - s.lse);
            const double c = geo.c[k];
            s.mean_c += w * c;
            s.mean_c2 += w * c * c;
            s.psi_c += c * (std::exp(la[k] - s.lse) - std::exp(lb[k] - s.lse)) / (2.0 * kSqrtPi);
            if (weights) weights[k] = w;
        }
        return s;
    }
};

// Reduced kernel of the small-chi regime: Theta_k = exp(mu c (2 f xi - r c)).
struct ReducedKernel {
    const Geometry& geo;
    double f, mu, r;

    XiStats at(double xi, double* weights = nullptr) const {
        const int L = static_cast<int>(geo.c.size());
        std::array<double, 32> lt{};
        for (int k = 0; k < L; ++k) {
            const double c = geo.c[k];
            lt[k] = mu * c * (2.0 * f * xi - r * c);
        }
        XiStats s;
        s.lse = logsumexp(lt.data(), L);
        for (int k = 0; k < L; ++k) {
            const double w = std::exp(lt[k] - s.lse);
            s.mean_c += w * geo.c[k];
            s.mean_c2 += w * geo.c[k] * geo.c[k];
            if (weights) weights[k] = w;
        }
        return s;
    }
};

struct Averages {
    double c2 = 0.0, cxi = 0.0, psi = 0.0, lse = 0.0;
};

template <class K>
Averages average(const K& kernel, const QuadratureRule& rule) {
    Averages a;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double xi = rule.nodes[i], w = rule.weights[i];
        XiStats s = kernel.at(xi);
        a.c2 += w * s.mean_c2;
        a.cxi += w * s.mean_c * xi;
        a.psi += w * s.psi_c;
        a.lse += w * s.lse;
    }
    return a;
}

// The full-ansatz kernel switches between cells over a xi-width of order
// g/f, which Gauss-Hermite nodes do not resolve once g is small. Build a
// composite Gauss-Legendre rule on [-10, 10] against exp(-xi^2)/sqrt(pi),
// with extra panel edges around every switching point.
QuadratureRule kernel_rule(const Geometry& geo, double eps, double g, double f, double mu, int order) {
    using Gl = boost::math::quadrature::gauss<double, 10>;
    constexpr double lim = 10.0;
    std::vector<double> edges;
    const int uniform = std::max(4, order / 4);
    for (int i = 0; i <= uniform; ++i) edges.push_back(-lim + 2.0 * lim * i / uniform);
    const double w = g / f;
    const int L = static_cast<int>(geo.c.size());
    for (int k = 0; k < L; ++k)
        for (int j : {k, k + 1}) {
            if (std::isinf(geo.v[j])) continue;
            const double t = (eps * geo.v[j] - mu * g * g * geo.c[k]) / f;
            for (double m : {-4.0, -1.5, -0.5, 0.0, 0.5, 1.5, 4.0}) {
                const double e = t + m * w;
                if (e > -lim && e < lim) edges.push_back(e);
            }
        }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(), [](double a, double b) { return b - a < 1e-14; }), edges.end());
    QuadratureRule r;
    const auto& x = Gl::abscissa();
    const auto& wt = Gl::weights();
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double mid = 0.5 * (edges[i] + edges[i + 1]), half = 0.5 * (edges[i + 1] - edges[i]);
        for (std::size_t j = 0; j < x.size(); ++j)
            for (double sgn : {-1.0, 1.0}) {
                if (x[j] == 0.0 && sgn < 0) continue;
                const double xi = mid + sgn * half * x[j];
                r.nodes.push_back(xi);
                r.weights.push_back(half * wt[j] * std::exp(-xi * xi) / kSqrtPi);
            }
    }
    return r;
}

Eigen::VectorXd full_residuals(const GaussianRTransform& R, const Geometry& geo, int order, double q, double p,
                               double chi, double mu) {
    const double R0 = R.value_neg(chi);
    const double R1 = R.value_neg(chi + mu * p);
    const double Rp1 = R.derivative_neg(chi + mu * p);
    const double g2 = (R0 - R1) / mu;
    Eigen::VectorXd r(4);
    if (!(g2 > 0.0)) {
        r.setConstant(kInf);
        return r;
    }
    const double g = std::sqrt(g2), f = std::sqrt(q * Rp1);
    const Averages a = average(Kernel{geo, R0, g, f, mu}, kernel_rule(geo, R0, g, f, mu, order));
    const double I = R.integral(chi + mu * p) - R.integral(chi);
    r(0) = (2.0 * a.c2 - p) / q - 1.0;
    r(1) = (2.0 / (f * mu) * a.cxi - chi / mu) / p - 1.0;
    r(2) = 2.0 / g * a.psi / chi - 1.0;
    r(3) = (2.0 * a.lse - I - 2.0 * mu * chi * g2 + mu * (q + 2.0 * p) * R1) / (2.0 * mu * q * (chi + mu * p) * Rp1) - 1.0;
    return r;
}

void fill_derived(OneRsbSolution& s) {
    GaussianRTransform R(s.alpha);
    if (s.method == "rs-reduced") {
        s.eps1 = R.value_neg(s.chi1);
        s.g1 = 0.0;
        s.f1 = std::sqrt(s.q1 * R.derivative_neg(s.chi1));
        return;
    }
    if (s.method == "full") {
        s.eps1 = R.value_neg(s.chi1);
        s.g1 = std::sqrt((s.eps1 - R.value_neg(s.chi1 + s.mu1 * s.p1)) / s.mu1);
        s.f1 = std::sqrt(s.q1 * R.derivative_neg(s.chi1 + s.mu1 * s.p1));
        return;
    }
    // small-chi reductions: chi1 is eliminated, eps1 and g1 diverge
    s.eps1 = kInf;
    s.g1 = kInf;
    s.f1 = std::sqrt(s.q1 * R.derivative_neg(s.mu1 * s.p1));
}

double max_abs(const Eigen::VectorXd& r) { return r.allFinite() ? r.lpNorm<Eigen::Infinity>() : kInf; }

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

struct FullAttempt {
    bool ok = false;
    Eigen::Vector4d logs;
    double energy = kInf;
    Eigen::VectorXd residual;
};

FullAttempt try_full(double alpha, const Geometry& geo, int order, const Eigen::Vector4d& start,
                     double tol) {
    GaussianRTransform R(alpha);
    auto F = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd e = x.array().exp();
        if (!e.allFinite() || (e.array() <= 0.0).any()) return Eigen::VectorXd::Constant(4, kInf);
        try {
            return full_residuals(R, geo, order, e(0), e(1), e(2), e(3));
        } catch (const std::exception&) {
            return Eigen::VectorXd::Constant(4, kInf);
        }
    };
    FullAttempt out;
    RootResult rr = solve_system(F, start, tol);
    if (!rr.converged) return out;
    Eigen::VectorXd e = rr.x.array().exp();
    if (!e.allFinite() || (e.array() <= 0.0).any()) return out;
    // the p -> 0, mu -> inf family is the RS point in disguise
    if (e(1) < 1e-8 || e(3) > 1e6) return out;
    const double energy = energy_1rsb(alpha, e(0), e(1), e(2), e(3));
    if (!(std::isfinite(energy) && energy > 0.0)) return out;
    out.ok = true;
    out.logs = rr.x;
    out.residual = F(rr.x);
    out.energy = energy;
    return out;
}

OneRsbSolution make_full(double alpha, int L, const FullAttempt& a) {
    OneRsbSolution s;
    s.alpha = alpha;
    s.L = L;
    Eigen::Vector4d e = a.logs.array().exp();
    s.q1 = e(0);
    s.p1 = e(1);
    s.chi1 = e(2);
    s.mu1 = e(3);
    s.energy = a.energy;
    s.residuals = to_std(a.residual);
    s.method = "full";
    fill_derived(s);
    return s;
}

Eigen::Vector4d logs_of(const OneRsbSolution& s) {
    return Eigen::Vector4d(std::log(s.q1), std::log(s.p1), std::log(s.chi1), std::log(s.mu1));
}

// Follows the solution branch from a converged point at a0 to a1 with adaptive
// steps and linear extrapolation of the log-parameters.
std::optional<FullAttempt> continue_full(double a0, const FullAttempt& from, double a1, const Geometry& geo,
                                         int order, double tol) {
    double a = a0, aprev = a0;
    Eigen::Vector4d x = from.logs, xprev = from.logs;
    bool have_prev = false;
    double da = 0.01;
    FullAttempt last = from;
    const double dir = a1 >= a0 ? 1.0 : -1.0;
    while (dir * (a1 - a) > 1e-15) {
        const double an = dir > 0 ? std::min(a + da, a1) : std::max(a - da, a1);
        Eigen::Vector4d guess = x;
        if (have_prev) guess = x + (x - xprev) * (std::abs(an - a) / std::abs(a - aprev));
        FullAttempt t = try_full(an, geo, order, guess, tol);
        if (!t.ok && have_prev) t = try_full(an, geo, order, x, tol);
        if (!t.ok) {
            da *= 0.5;
            if (da < 1e-6) return std::nullopt;
            continue;
        }
        xprev = x;
        x = t.logs;
        have_prev = true;
        aprev = a;
        a = an;
        last = t;
        da = std::min(da * 1.5, 0.02);
    }
    return last;
}

// Seed point of the branch at alpha = 0.5, refined for the requested L.
const Eigen::Vector4d kSeedLogs(std::log(2.0302), std::log(1.2097), std::log(0.032901), std::log(0.58911));
constexpr double kSeedAlpha = 0.5;

}  // namespace

double energy_1rsb(double alpha, double q, double p, double chi, double mu) {
    GaussianRTransform R(alpha);
    const double x = chi + mu * p;
    return (q + p + chi / mu) * R.value_neg(x) - chi / mu * R.value_neg(chi) - q * x * R.derivative_neg(x);
}

std::vector<double> residuals_1rsb_lattice(double alpha, int L, double q, double p, double chi, double mu,
                                           const SolverConfig& cfg) {
    const Geometry geo = geometry(L);
    return to_std(full_residuals(GaussianRTransform(alpha), geo, cfg.quadrature_order, q, p, chi, mu));
}

// ---------------------------------------------------------------- RS

namespace {

struct RsMoments {
    double q_new = 0.0;
    double chi_new = 0.0;
};

RsMoments rs_map(const RelaxationScheme& scheme, const GaussianRTransform& R, double q, double chi) {
    const double r = R.value_neg(chi);
    const double root = std::sqrt(q * R.derivative_neg(chi));
    const double s = r / root;  // scale between z and the constellation
    RsMoments m;
    if (scheme.kind == SchemeKind::ConvexQpsk) {
        // x = max(1, z/s) per real dimension
        const double tail = q_function(kSqrt2 * s);
        const double ex2 = (1.0 - tail) + (s * std::exp(-s * s) / (2.0 * kSqrtPi) + 0.5 * tail) / (s * s);
        m.q_new = 2.0 * ex2;
        m.chi_new = tail / r;
        return m;
    }
    const Geometry geo = geometry(scheme.L);
    double ec2 = 0.0, ecz = 0.0;
    for (std::size_t k = 0; k < geo.c.size(); ++k) {
        const double a = s * geo.v[k], b = s * geo.v[k + 1];
        ec2 += geo.c[k] * geo.c[k] * cell_prob(a, b);
        ecz += geo.c[k] * cell_first_moment(a, b);
    }
    m.q_new = 2.0 * ec2;
    m.chi_new = 2.0 * ecz / root;
    return m;
}

}  // namespace

// L = 1 keeps x = u: the ZF energy 2 R(0) = 2/(1-alpha), finite only below unit load.
static RsSolution unrelaxed_rs(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("L = 1 has no relaxation; its energy diverges at alpha = 1");
    RsSolution s;
    s.alpha = alpha;
    s.q0 = 2.0;
    s.chi0 = 0.0;
    s.energy = 2.0 / (1.0 - alpha);
    s.residuals = {0.0, 0.0};
    return s;
}

static OneRsbSolution unrelaxed_1rsb(double alpha) {
    const RsSolution rs = unrelaxed_rs(alpha);
    OneRsbSolution s;
    s.alpha = alpha;
    s.L = 1;
    s.q1 = rs.q0;
    s.energy = rs.energy;
    s.residuals = rs.residuals;
    s.method = "rs-reduced";
    fill_derived(s);
    return s;
}

RsSolution solve_rs(const RelaxationScheme& scheme, double alpha, const SolverConfig& cfg) {
    cfg.validate();
    const double amax = scheme.kind == SchemeKind::ConvexQpsk ? 2.0 : 1.0;
    if (!(alpha > 0.0 && alpha < amax + (amax == 1.0 ? 1e-15 : 0.0)))
        throw std::invalid_argument("solve_rs: alpha outside the scheme's range");
    if (scheme.kind == SchemeKind::LatticeQpsk && scheme.L == 1) return unrelaxed_rs(alpha);
    GaussianRTransform R(alpha);
    auto F = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd r(2);
        const double q = std::exp(x(0)), chi = std::exp(x(1));
        try {
            RsMoments m = rs_map(scheme, R, q, chi);
            r(0) = std::log(m.q_new / q);
            r(1) = m.chi_new > 0.0 ? std::log(m.chi_new / chi) : -1e6;
        } catch (const std::exception&) {
            r.setConstant(kInf);
        }
        return r;
    };
    const std::array<std::array<double, 2>, 6> starts{{{2.0, 1e-3}, {2.0, 0.1}, {3.0, 0.3}, {6.0, 0.5}, {30.0, 0.05}, {2.0, 1e-8}}};
    std::optional<RsSolution> best;
    for (const auto& st : starts) {
        Eigen::VectorXd x0(2);
        x0 << std::log(st[0]), std::log(st[1]);
        RootResult rr = solve_system(F, x0, cfg.tolerance);
        if (!rr.converged) continue;
        RsSolution s;
        s.alpha = alpha;
        s.q0 = std::exp(rr.x(0));
        s.chi0 = std::exp(rr.x(1));
        s.energy = s.q0 * (R.value_neg(s.chi0) - s.chi0 * R.derivative_neg(s.chi0));
        s.residuals = to_std(F(rr.x));
        if (!(s.energy > 0.0)) continue;
        if (!best || s.energy < best->energy) best = s;
    }
    if (!best) throw ConvergenceError("solve_rs: no start converged", Eigen::VectorXd(), kInf);
    return *best;
}

// ---------------------------------------------------------------- CR-QPSK

namespace {

double crqpsk_gap(double E, double alpha) {
    const double t = alpha * E;
    return q_function(std::sqrt(2.0 / t)) * (2.0 + t) - 2.0 - (alpha - 1.0) * E -
           std::sqrt(t / std::numbers::pi) * std::exp(-1.0 / t);
}

}  // namespace

double solve_crqpsk_energy(double alpha, const SolverConfig& cfg) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("solve_crqpsk_energy: alpha must lie in (0,2)");
    // The gap is negative for small E and positive for large E; scan a log
    // grid for the first sign change and bisect inside it.
    double lo = 1e-3;
    double flo = crqpsk_gap(lo, alpha);
    for (int i = 1; i <= 4000; ++i) {
        const double hi = 1e-3 * std::pow(10.0, 12.0 * i / 4000.0);
        const double fhi = crqpsk_gap(hi, alpha);
        if ((flo < 0.0) != (fhi < 0.0)) {
            return bisect([&](double E) { return crqpsk_gap(E, alpha); }, lo, hi, cfg.tolerance * hi);
        }
        lo = hi;
        flo = fhi;
    }
    throw ConvergenceError("solve_crqpsk_energy: no sign change found", Eigen::VectorXd(), kInf);
}

double CrQpskComponents::density(double x) const {
    if (x <= 1.0) return 0.0;
    const double t = alpha * energy;
    return std::exp(-x * x / t) / std::sqrt(std::numbers::pi * t);
}

double CrQpskComponents::cdf(double x) const {
    if (x < 1.0) return 0.0;
    const double t = alpha * energy;
    // atom Q1 plus the Gaussian mass on (1, x]
    return Q1 + q_function(std::sqrt(2.0 / t)) - q_function(x * std::sqrt(2.0 / t));
}

CrQpskComponents crqpsk_pdf_components(double alpha, const SolverConfig& cfg) {
    CrQpskComponents c;
    c.alpha = alpha;
    c.energy = solve_crqpsk_energy(alpha, cfg);
    c.Q1 = q_function(-std::sqrt(2.0 / (alpha * c.energy)));
    return c;
}

// ---------------------------------------------------------------- 1RSB

OneRsbSolution solve_1rsb_lattice_full(double alpha, int L, const SolverConfig& cfg, const OneRsbSolution* warm) {
    cfg.validate();
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("solve_1rsb_lattice_full: alpha must lie in (0,1)");
    if (L < 1 || L > 32) throw std::invalid_argument("solve_1rsb_lattice_full: L must lie in [1,32]");
    if (L == 1) return unrelaxed_1rsb(alpha);
    const Geometry geo = geometry(L);
    const int order = cfg.quadrature_order;
    const double tol = cfg.tolerance;

    std::vector<Eigen::Vector4d> starts;
    if (warm && warm->method == "full") starts.push_back(logs_of(*warm));
    try {
        RsSolution rs = solve_rs(RelaxationScheme::lattice(L), alpha, cfg);
        starts.emplace_back(std::log(rs.q0), std::log(0.1 * rs.q0), std::log(0.5 * rs.chi0 + 1e-12), 0.0);
    } catch (const std::exception&) {
    }
    starts.emplace_back(std::log(2.2), std::log(1.0), std::log(0.01), std::log(0.15));  // small mu
    starts.emplace_back(std::log(2.05), std::log(0.01), std::log(0.01), std::log(2.0));  // large mu

    std::optional<FullAttempt> best;
    for (const auto& st : starts) {
        FullAttempt a = try_full(alpha, geo, order, st, tol);
        if (a.ok && (!best || a.energy < best->energy)) best = a;
    }
    if (!best && alpha >= 0.3) {
        // continuation from the seed branch; below 0.3 the branch degenerates
        // onto the RS point (p1 -> 0, mu1 -> inf) and is left to the caller
        FullAttempt seed = try_full(kSeedAlpha, geo, order, kSeedLogs, tol);
        if (seed.ok) {
            auto c = continue_full(kSeedAlpha, seed, alpha, geo, order, tol);
            if (c) best = *c;
        }
    }
    if (!best) throw ConvergenceError("solve_1rsb_lattice_full: no converged solution", Eigen::VectorXd(), kInf);
    return make_full(alpha, L, *best);
}

namespace {

struct ReducedAttempt {
    bool ok = false;
    Eigen::Vector3d logs;
    Eigen::VectorXd residual;
    double energy = kInf;
};

// (q, p, mu) system of the small-chi regime. alpha == 1 uses the unit-load
// form whose third equation is the vanishing log-partition average.
Eigen::VectorXd reduced_residuals(double alpha, const Geometry& geo, const QuadratureRule& rule, double q, double p,
                                  double mu) {
    GaussianRTransform R(alpha);
    const double mp = mu * p;
    const double r1 = R.value_neg(mp), rp1 = R.derivative_neg(mp);
    const double f = std::sqrt(q * rp1);
    const Averages a = average(ReducedKernel{geo, f, mu, r1}, rule);
    Eigen::VectorXd r(3);
    r(0) = (2.0 * a.c2 - p) / q - 1.0;
    r(1) = 2.0 / (f * mu) * a.cxi / p - 1.0;
    if (alpha == 1.0)
        r(2) = 2.0 * a.lse;
    else
        r(2) = (2.0 * a.lse - R.integral(mp) + mu * (q + 2.0 * p) * r1) / (2.0 * q * mu * mp * rp1) - 1.0;
    return r;
}

double reduced_energy(double alpha, double q, double p, double mu) {
    const double mp = mu * p;
    if (alpha == 1.0) return (q + 2.0 * p) / (2.0 * std::sqrt(mp));
    GaussianRTransform R(alpha);
    return (q + p) * R.value_neg(mp) - q * mp * R.derivative_neg(mp);
}

ReducedAttempt try_reduced(double alpha, const Geometry& geo, const QuadratureRule& rule, const Eigen::Vector3d& start,
                           double tol) {
    auto F = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd e = x.array().exp();
        if (!e.allFinite() || (e.array() <= 0.0).any()) return Eigen::VectorXd::Constant(3, kInf);
        try {
            return reduced_residuals(alpha, geo, rule, e(0), e(1), e(2));
        } catch (const std::exception&) {
            return Eigen::VectorXd::Constant(3, kInf);
        }
    };
    ReducedAttempt out;
    RootResult rr = solve_system(F, start, tol);
    if (!rr.converged) return out;
    Eigen::Vector3d e = rr.x.array().exp();
    if (!e.allFinite()) return out;
    out.ok = true;
    out.logs = rr.x;
    out.residual = F(rr.x);
    out.energy = reduced_energy(alpha, e(0), e(1), e(2));
    return out;
}

OneRsbSolution make_reduced(double alpha, int L, const ReducedAttempt& a, const char* method) {
    OneRsbSolution s;
    s.alpha = alpha;
    s.L = L;
    Eigen::Vector3d e = a.logs.array().exp();
    s.q1 = e(0);
    s.p1 = e(1);
    s.mu1 = e(2);
    s.chi1 = 0.0;
    s.energy = a.energy;
    s.residuals = to_std(a.residual);
    s.method = method;
    fill_derived(s);
    return s;
}

std::vector<Eigen::Vector3d> reduced_starts() {
    std::vector<Eigen::Vector3d> st;
    for (double q : {0.6, 1.0, 2.0})
        for (double p : {1.0, 6.0})
            for (double mu : {0.06, 0.3, 1.5}) st.emplace_back(std::log(q), std::log(p), std::log(mu));
    return st;
}

}  // namespace

OneRsbSolution solve_1rsb_unit_load(int L, const SolverConfig& cfg) {
    cfg.validate();
    if (L < 1 || L > 32) throw std::invalid_argument("solve_1rsb_unit_load: L must lie in [1,32]");
    if (L == 1) return unrelaxed_1rsb(1.0);
    const Geometry geo = geometry(L);
    const QuadratureRule rule = gauss_hermite(cfg.quadrature_order);
    std::optional<ReducedAttempt> best;
    for (const auto& st : reduced_starts()) {
        ReducedAttempt a = try_reduced(1.0, geo, rule, st, cfg.tolerance);
        if (!a.ok || a.logs(1) < std::log(1e-6) || a.logs(2) > std::log(50.0)) continue;
        if (!best || a.energy < best->energy) best = a;
    }
    if (!best) throw ConvergenceError("solve_1rsb_unit_load: no converged solution", Eigen::VectorXd(), kInf);
    return make_reduced(1.0, L, *best, "unit-load");
}

OneRsbSolution solve_1rsb_near_unit(double alpha, int L, const SolverConfig& cfg, const OneRsbSolution* warm) {
    cfg.validate();
    if (!(alpha > 0.9 && alpha < 1.0)) throw std::invalid_argument("solve_1rsb_near_unit: alpha must lie in (0.9,1)");
    if (L == 1) return unrelaxed_1rsb(alpha);
    const Geometry geo = geometry(L);
    const QuadratureRule rule = gauss_hermite(cfg.quadrature_order);
    auto sane = [](const ReducedAttempt& a) {
        // reject the degenerate p -> 0, mu -> inf family
        return a.ok && a.logs(1) > std::log(1e-6) && a.logs(2) < std::log(50.0);
    };
    if (warm && warm->p1 > 0.0 && warm->mu1 > 0.0) {
        ReducedAttempt a = try_reduced(alpha, geo, rule,
                                       Eigen::Vector3d(std::log(warm->q1), std::log(warm->p1), std::log(warm->mu1)),
                                       cfg.tolerance);
        if (sane(a)) return make_reduced(alpha, L, a, "near-unit");
    }
    // walk down from unit load along the branch
    OneRsbSolution u = solve_1rsb_unit_load(L, cfg);
    Eigen::Vector3d x(std::log(u.q1), std::log(u.p1), std::log(u.mu1));
    double a = 1.0, da = 0.002;
    while (a > alpha) {
        const double an = std::max(alpha, a - da);
        ReducedAttempt t = try_reduced(an, geo, rule, x, cfg.tolerance);
        if (!sane(t)) {
            da *= 0.5;
            if (da < 1e-7) break;
            continue;
        }
        x = t.logs;
        a = an;
        if (a == alpha) return make_reduced(alpha, L, t, "near-unit");
        da = std::min(2.0 * da, 0.01);
    }
    throw ConvergenceError("solve_1rsb_near_unit: no converged solution", x, kInf);
}

OneRsbSolution solve_1rsb_lattice(double alpha, int L, const SolverConfig& cfg, const OneRsbSolution* warm) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("solve_1rsb_lattice: alpha must lie in (0,1]");
    if (alpha == 1.0) return solve_1rsb_unit_load(L, cfg);
    if (alpha > 0.98) return solve_1rsb_near_unit(alpha, L, cfg, warm);
    try {
        return solve_1rsb_lattice_full(alpha, L, cfg, warm);
    } catch (const ConvergenceError&) {
        // chi1 is below 1e-5 from about 0.9 on and the full system loses
        // rank; the small-chi reduction agrees with it there.
        if (alpha > 0.9) return solve_1rsb_near_unit(alpha, L, cfg, warm);
        // Below the fold of the non-trivial branch the ansatz collapses onto
        // the RS saddle point (mu1 p1 -> 0).
        if (alpha >= 0.3) throw;
    }
    RsSolution rs = solve_rs(RelaxationScheme::lattice(L), alpha, cfg);
    OneRsbSolution s;
    s.alpha = alpha;
    s.L = L;
    s.q1 = rs.q0;
    s.chi1 = rs.chi0;
    s.energy = rs.energy;
    s.residuals = rs.residuals;
    s.method = "rs-reduced";
    fill_derived(s);
    return s;
}

std::vector<std::optional<OneRsbSolution>> sweep_1rsb_lattice(const std::vector<double>& alphas, int L,
                                                              const SolverConfig& cfg) {
    std::vector<std::size_t> order(alphas.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return alphas[a] < alphas[b]; });
    std::vector<std::optional<OneRsbSolution>> out(alphas.size());
    std::optional<OneRsbSolution> prev;
    for (std::size_t i : order) {
        try {
            OneRsbSolution s = solve_1rsb_lattice(alphas[i], L, cfg, prev ? &*prev : nullptr);
            out[i] = s;
            prev = s;
        } catch (const std::exception&) {
        }
    }
    return out;
}

// ---------------------------------------------------------------- entropy

EntropyValue entropy_zero_temp(double chi, const std::function<double(double)>& r_neg) {
    if (!(chi >= 0.0)) throw std::invalid_argument("entropy_zero_temp: chi must be nonnegative");
    EntropyValue e;
    e.chi = chi;
    if (chi == 0.0) return e;
    // w = t^2 removes the 1/sqrt(w) endpoint behaviour R has at unit load
    const IntegralResult I =
        integrate_adaptive([&](double t) { return 2.0 * t * r_neg(t * t); }, 0.0, std::sqrt(chi), 1e-13);
    e.entropy = chi * r_neg(chi) - I.value;
    return e;
}

EntropyValue entropy_gaussian(double chi, double alpha) {
    if (!(chi >= 0.0)) throw std::invalid_argument("entropy_gaussian: chi must be nonnegative");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("entropy_gaussian: alpha must lie in (0,1]");
    EntropyValue e;
    e.chi = chi;
    if (chi == 0.0) return e;
    const double a = 1.0 - alpha;
    const double s = std::sqrt(a * a + 4.0 * alpha * chi);
    const double smina = 4.0 * alpha * chi / (a + s);
    e.entropy = -smina / (2.0 * alpha) + (a > 0.0 ? a / alpha * std::log1p(smina / (2.0 * a)) : 0.0);
    return e;
}

// ---------------------------------------------------------------- conditional laws

std::vector<double> marginal_1rsb_lattice(const OneRsbSolution& sol, const SolverConfig& cfg) {
    const Geometry geo = geometry(sol.L);
    const int L = sol.L;
    if (sol.method == "rs-reduced") {
        RsSolution rs;
        rs.alpha = sol.alpha;
        rs.q0 = sol.q1;
        rs.chi0 = sol.chi1;
        return marginal_rs_lattice(rs, L);
    }
    std::vector<double> P(L, 0.0);
    std::array<double, 32> w{};
    if (sol.method == "full") {
        const Kernel k{geo, sol.eps1, sol.g1, sol.f1, sol.mu1};
        const QuadratureRule rule = kernel_rule(geo, sol.eps1, sol.g1, sol.f1, sol.mu1, cfg.quadrature_order);
        for (std::size_t i = 0; i < rule.size(); ++i) {
            k.at(rule.nodes[i], w.data());
            for (int j = 0; j < L; ++j) P[j] += rule.weights[i] * w[j];
        }
    } else {
        const ReducedKernel k{geo, sol.f1, sol.mu1, GaussianRTransform(sol.alpha).value_neg(sol.mu1 * sol.p1)};
        const QuadratureRule rule = gauss_hermite(cfg.quadrature_order);
        for (std::size_t i = 0; i < rule.size(); ++i) {
            k.at(rule.nodes[i], w.data());
            for (int j = 0; j < L; ++j) P[j] += rule.weights[i] * w[j];
        }
    }
    double s = 0.0;
    for (double p : P) s += p;
    for (double& p : P) p /= s;
    return P;
}

std::vector<double> marginal_rs_lattice(const RsSolution& sol, int L) {
    const Geometry geo = geometry(L);
    GaussianRTransform R(sol.alpha);
    const double s = R.value_neg(sol.chi0) / std::sqrt(sol.q0 * R.derivative_neg(sol.chi0));
    std::vector<double> P(L);
    for (int k = 0; k < L; ++k) P[k] = cell_prob(s * geo.v[k], s * geo.v[k + 1]);
    return P;
}

namespace {

ConditionalDist product_dist(const std::vector<double>& c, const std::vector<double>& P, std::complex<double> u) {
    ConditionalDist d;
    d.u = u;
    const double sr = u.real() < 0 ? -1.0 : 1.0, si = u.imag() < 0 ? -1.0 : 1.0;
    for (std::size_t a = 0; a < c.size(); ++a)
        for (std::size_t b = 0; b < c.size(); ++b) {
            d.points.emplace_back(sr * c[a], si * c[b]);
            d.probabilities.push_back(P[a] * P[b]);
        }
    return d;
}

}  // namespace

ConditionalDist cond_dist_1rsb_lattice(const OneRsbSolution& sol, std::complex<double> u, const SolverConfig& cfg) {
    return product_dist(geometry(sol.L).c, marginal_1rsb_lattice(sol, cfg), u);
}

ConditionalDist cond_dist_rs(const RelaxationScheme& scheme, const RsSolution& sol, std::complex<double> u) {
    if (scheme.kind == SchemeKind::LatticeQpsk)
        return product_dist(geometry(scheme.L).c, marginal_rs_lattice(sol, scheme.L), u);
    // convex: only the atom at u is a point mass
    ConditionalDist d;
    d.u = u;
    CrQpskComponents c;
    c.alpha = sol.alpha;
    c.energy = sol.energy;
    c.Q1 = q_function(-std::sqrt(2.0 / (sol.alpha * sol.energy)));
    d.points = {std::complex<double>(u.real() < 0 ? -1.0 : 1.0, u.imag() < 0 ? -1.0 : 1.0)};
    d.probabilities = {c.mass_atom()};
    d.continuous_mass = 1.0 - c.mass_atom();
    return d;
}

}  // namespace vplab
