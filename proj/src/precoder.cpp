#include "vplab/precoder.hpp"

#include <boost/random/mersenne_twister.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#ifdef VPLAB_HAVE_OPENMP
#include <omp.h>
#endif

namespace vplab {

using cd = std::complex<double>;

RelaxationScheme RelaxationScheme::lattice(int L) {
    if (L < 1) throw std::invalid_argument("lattice relaxation needs L >= 1");
    return {SchemeKind::LatticeQpsk, L};
}

RelaxationScheme RelaxationScheme::convex() { return {SchemeKind::ConvexQpsk, 0}; }

std::vector<double> RelaxationScheme::c_natural_order() const {
    if (kind != SchemeKind::LatticeQpsk) throw std::invalid_argument("c sequence is defined for the lattice scheme only");
    std::vector<double> c(L);
    for (int i = 0; i < L; ++i) c[i] = (i % 2 == 0 ? 1.0 : -1.0) * (1 + 2 * i);
    return c;
}

std::vector<double> RelaxationScheme::c_sorted() const {
    auto c = c_natural_order();
    std::sort(c.begin(), c.end());
    return c;
}

static double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

std::vector<cd> enumerate_points(const RelaxationScheme& scheme, cd u) {
    if (scheme.kind != SchemeKind::LatticeQpsk) throw std::invalid_argument("enumerate_points: the convex set is not finite");
    const auto c = scheme.c_natural_order();
    const double sr = sgn(u.real()), si = sgn(u.imag());
    std::vector<cd> pts;
    pts.reserve(c.size() * c.size());
    for (double a : c)
        for (double b : c) pts.emplace_back(sr * a, si * b);
    return pts;
}

std::vector<double> voronoi_boundaries(const RelaxationScheme& scheme) {
    const auto c = scheme.c_sorted();
    std::vector<double> v;
    for (std::size_t i = 1; i < c.size(); ++i) v.push_back(0.5 * (c[i] + c[i - 1]));
    return v;
}

ComplexVector sample_qpsk(int K, std::uint64_t seed) {
    boost::random::mt19937_64 eng(splitmix64(seed));
    ComplexVector u(K);
    for (int k = 0; k < K; ++k) {
        auto bits = eng();
        u(k) = cd((bits & 1) ? 1.0 : -1.0, (bits & 2) ? 1.0 : -1.0);
    }
    return u;
}

static double quad_form(const ComplexMatrix& J, const ComplexVector& x) {
    return std::max(0.0, x.dot(J * x).real());
}

static PrecoderResult finish(const ComplexMatrix& J, ComplexVector x, long long nodes) {
    PrecoderResult r;
    r.energy_total = quad_form(J, x);
    r.energy_per_symbol = r.energy_total / static_cast<double>(x.size());
    r.x = std::move(x);
    r.node_count = nodes;
    return r;
}

PrecoderResult min_energy_exhaustive(const ComplexMatrix& J, const ComplexVector& u,
                                     const RelaxationScheme& scheme, long long cap) {
    const int K = static_cast<int>(u.size());
    const long long per = static_cast<long long>(scheme.L) * scheme.L;
    long long total = 1;
    for (int k = 0; k < K; ++k) {
        if (total > cap / per) throw TooLargeError("min_energy_exhaustive: state count exceeds cap; use branch-and-bound");
        total *= per;
    }
    std::vector<std::vector<cd>> pts(K);
    for (int k = 0; k < K; ++k) pts[k] = enumerate_points(scheme, u(k));

    std::vector<int> idx(K, 0);
    ComplexVector x(K), best_x(K);
    for (int k = 0; k < K; ++k) x(k) = pts[k][0];
    double best = std::numeric_limits<double>::infinity();
    for (long long n = 0; n < total; ++n) {
        double e = quad_form(J, x);
        if (e < best) {
            best = e;
            best_x = x;
        }
        // odometer with the last coordinate running fastest
        for (int k = K - 1; k >= 0; --k) {
            if (++idx[k] < per) {
                x(k) = pts[k][idx[k]];
                break;
            }
            idx[k] = 0;
            x(k) = pts[k][0];
        }
    }
    return finish(J, best_x, total);
}

namespace {

// Depth-first search over coordinates 0..K-1 using J = M^H M with M lower
// triangular, so the cost of row i depends only on x_0..x_i.
struct BranchBound {
    const ComplexMatrix& M;
    const std::vector<std::vector<cd>>& pts;
    int K;
    ComplexVector x;
    ComplexVector best_x;
    double best = std::numeric_limits<double>::infinity();
    long long nodes = 0;

    void run(int i, double partial) {
        if (i == K) {
            if (partial < best) {
                best = partial;
                best_x = x;
            }
            return;
        }
        cd s = 0.0;
        for (int j = 0; j < i; ++j) s += M(i, j) * x(j);
        const double m = M(i, i).real();
        const auto& P = pts[i];
        std::array<std::pair<double, int>, 64> cost{};
        const int n = static_cast<int>(P.size());
        for (int k = 0; k < n; ++k) cost[k] = {std::norm(m * P[k] + s), k};
        std::sort(cost.begin(), cost.begin() + n);
        for (int k = 0; k < n; ++k) {
            const double p = partial + cost[k].first;
            if (p >= best) break;
            ++nodes;
            x(i) = P[cost[k].second];
            run(i + 1, p);
        }
    }
};

}  // namespace

PrecoderResult min_energy_branch_bound(const ComplexMatrix& J, const ComplexVector& u,
                                       const RelaxationScheme& scheme) {
    const int K = static_cast<int>(u.size());
    if (scheme.kind != SchemeKind::LatticeQpsk) throw std::invalid_argument("branch-and-bound needs the lattice scheme");
    if (scheme.L > 8) throw std::invalid_argument("branch-and-bound supports L <= 8");
    // reversed Cholesky: P J P = Lr Lr^H, M = P Lr^H P is lower triangular
    ComplexMatrix Jr = J.reverse();
    Eigen::LLT<ComplexMatrix> llt(Jr);
    if (llt.info() != Eigen::Success) throw SingularChannelError("branch-and-bound: Cholesky of J failed");
    ComplexMatrix M = ComplexMatrix(llt.matrixU()).reverse();

    std::vector<std::vector<cd>> pts(K);
    for (int k = 0; k < K; ++k) pts[k] = enumerate_points(scheme, u(k));
    BranchBound bb{M, pts, K, ComplexVector::Zero(K), u};
    bb.run(0, 0.0);
    return finish(J, bb.best_x, bb.nodes);
}

namespace {

// Real embedding of x^H J x in the sign-flipped coordinates y (x = S y).
Eigen::MatrixXd convex_matrix(const ComplexMatrix& J, const ComplexVector& u, Eigen::VectorXd& signs) {
    const int K = static_cast<int>(u.size());
    Eigen::MatrixXd G(2 * K, 2 * K);
    G << J.real(), -J.imag(), J.imag(), J.real();
    signs.resize(2 * K);
    for (int k = 0; k < K; ++k) {
        signs(k) = sgn(u(k).real());
        signs(K + k) = sgn(u(k).imag());
    }
    Eigen::MatrixXd A = signs.asDiagonal() * G * signs.asDiagonal();
    return 0.5 * (A + A.transpose());
}

}  // namespace

PrecoderResult min_energy_convex(const ComplexMatrix& J, const ComplexVector& u, double tol) {
    const int K = static_cast<int>(u.size());
    const int n = 2 * K;
    Eigen::VectorXd signs;
    const Eigen::MatrixXd A = convex_matrix(J, u, signs);
    Eigen::VectorXd y = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd g = A * y;
    long long iters = 0;

    // cyclic coordinate descent with exact minimization and clipping
    for (int sweep = 0; sweep < 200; ++sweep) {
        double move = 0.0;
        for (int i = 0; i < n; ++i) {
            double yi = std::max(1.0, y(i) - g(i) / A(i, i));
            double d = yi - y(i);
            if (d != 0.0) {
                g += d * A.col(i);
                y(i) = yi;
                move = std::max(move, std::abs(d));
            }
        }
        ++iters;
        if (move < tol) break;
    }

    // Primal active-set polish: exact on the final active set, which the
    // descent phase identifies in most cases. Handles the slow tail of
    // coordinate descent on ill-conditioned J near unit load.
    std::vector<char> active(n);
    for (int i = 0; i < n; ++i) {
        active[i] = y(i) <= 1.0 + 1e-12;
        if (active[i]) y(i) = 1.0;
    }
    const double scale = A.diagonal().maxCoeff();
    for (int it = 0; it < 50 * n; ++it) {
        ++iters;
        std::vector<int> F, W;
        for (int i = 0; i < n; ++i) (active[i] ? W : F).push_back(i);
        Eigen::VectorXd z = Eigen::VectorXd::Ones(n);
        if (!F.empty()) {
            const int nf = static_cast<int>(F.size());
            Eigen::MatrixXd AFF(nf, nf);
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
            for (int a = 0; a < nf; ++a) {
                for (int b = 0; b < nf; ++b) AFF(a, b) = A(F[a], F[b]);
                for (int w : W) rhs(a) -= A(F[a], w);
            }
            Eigen::LDLT<Eigen::MatrixXd> ldlt(AFF);
            Eigen::VectorXd zf = ldlt.solve(rhs);
            zf += ldlt.solve(rhs - AFF * zf);  // one refinement step
            for (int a = 0; a < nf; ++a) z(F[a]) = zf(a);
        }
        Eigen::VectorXd p = z - y;
        if (p.lpNorm<Eigen::Infinity>() <= 1e-13 * std::max(1.0, y.lpNorm<Eigen::Infinity>())) {
            y = z;
            Eigen::VectorXd gz = A * y;
            int drop = -1;
            double worst = -tol * scale;
            for (int w : W)
                if (gz(w) < worst) {
                    worst = gz(w);
                    drop = w;
                }
            if (drop < 0) break;
            active[drop] = 0;
            continue;
        }
        double t = 1.0;
        int block = -1;
        for (int f : F)
            if (p(f) < 0.0) {
                double tf = (1.0 - y(f)) / p(f);
                if (tf < t) {
                    t = tf;
                    block = f;
                }
            }
        y += t * p;
        if (block >= 0) {
            active[block] = 1;
            y(block) = 1.0;
        }
    }
    for (int i = 0; i < n; ++i) y(i) = std::max(1.0, y(i));

    ComplexVector x(K);
    for (int k = 0; k < K; ++k) x(k) = cd(signs(k) * y(k), signs(K + k) * y(K + k));
    return finish(J, x, iters);
}

double convex_kkt_residual(const ComplexMatrix& J, const ComplexVector& u, const ComplexVector& x) {
    const int K = static_cast<int>(u.size());
    Eigen::VectorXd signs;
    const Eigen::MatrixXd A = convex_matrix(J, u, signs);
    Eigen::VectorXd y(2 * K);
    for (int k = 0; k < K; ++k) {
        y(k) = signs(k) * x(k).real();
        y(K + k) = signs(K + k) * x(k).imag();
    }
    Eigen::VectorXd g = 2.0 * A * y;
    double worst = 0.0;
    for (int i = 0; i < 2 * K; ++i) {
        worst = std::max(worst, std::max(0.0, 1.0 - y(i)));  // feasibility
        if (y(i) > 1.0 + 1e-12)
            worst = std::max(worst, std::abs(g(i)));
        else
            worst = std::max(worst, std::max(0.0, -g(i)));
    }
    return worst;
}

PrecoderResult min_energy(const ComplexMatrix& J, const ComplexVector& u, const RelaxationScheme& scheme) {
    if (scheme.kind == SchemeKind::ConvexQpsk) return min_energy_convex(J, u);
    return min_energy_branch_bound(J, u, scheme);
}

int mc_antennas(int K, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    return static_cast<int>(std::lround(K / alpha));
}

McResult run_mc(const McConfig& cfg) {
    if (cfg.K < 1 || cfg.trials < 1) throw std::invalid_argument("run_mc: K and trials must be positive");
    McResult out;
    out.K = cfg.K;
    out.N = mc_antennas(cfg.K, cfg.alpha);
    if (out.N < cfg.K) throw std::invalid_argument("run_mc: finite-size simulation requires N >= K");
    const int K = cfg.K;
    const bool lattice = cfg.scheme.kind == SchemeKind::LatticeQpsk;
    std::vector<double> cvals;
    if (lattice) cvals = cfg.scheme.c_sorted();
    const int L = lattice ? cfg.scheme.L : 0;

    struct Trial {
        double energy = std::numeric_limits<double>::quiet_NaN();
        bool failed = false;
        int resampled = 0;
        long long nodes = 0;
        std::vector<std::pair<double, double>> dims;  // sign-normalized (re, im) per symbol
    };
    std::vector<Trial> trials(cfg.trials);

#ifdef VPLAB_HAVE_OPENMP
    const int nthreads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
#endif
    for (int t = 0; t < cfg.trials; ++t) {
        Trial& tr = trials[t];
        const std::uint64_t base = splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(t) + 0x51ed2701ULL));
        try {
            ComplexMatrix J;
            for (int attempt = 0;; ++attempt) {
                try {
                    J = zf_gram(sample_gaussian_channel(K, out.N, base + 2 * attempt));
                    break;
                } catch (const SingularChannelError&) {
                    if (attempt >= 16) throw;
                    ++tr.resampled;
                }
            }
            const ComplexVector u = sample_qpsk(K, base ^ 0xa5a5a5a5a5a5a5a5ULL);
            const PrecoderResult r = min_energy(J, u, cfg.scheme);
            tr.energy = r.energy_per_symbol;
            tr.nodes = r.node_count;
            tr.dims.reserve(K);
            for (int k = 0; k < K; ++k)
                tr.dims.emplace_back(r.x(k).real() * sgn(u(k).real()), r.x(k).imag() * sgn(u(k).imag()));
        } catch (const std::exception&) {
            tr.failed = true;
        }
    }

    if (lattice) {
        out.c_values = cvals;
        out.marginal_counts.assign(L, 0);
        out.joint_counts.assign(L, std::vector<long long>(L, 0));
    }
    auto cindex = [&](double v) {
        for (int i = 0; i < L; ++i)
            if (std::abs(v - cvals[i]) < 1e-9) return i;
        throw std::logic_error("precoder output is not a lattice point");
    };
    double sum = 0.0, sum2 = 0.0;
    for (int t = 0; t < cfg.trials; ++t) {
        const Trial& tr = trials[t];
        out.resampled_channels += tr.resampled;
        if (tr.failed) {
            ++out.failures;
            out.failed_trials.push_back(t);
            continue;
        }
        out.per_trial.push_back(tr.energy);
        out.trial_ids.push_back(t);
        sum += tr.energy;
        sum2 += tr.energy * tr.energy;
        out.total_nodes += tr.nodes;
        for (auto [re, im] : tr.dims) {
            ++out.total_symbols;
            out.total_dims += 2;
            if (lattice) {
                int a = cindex(re), b = cindex(im);
                ++out.marginal_counts[a];
                ++out.marginal_counts[b];
                ++out.joint_counts[a][b];
            } else {
                bool ba = re <= 1.0 + 1e-9, bb = im <= 1.0 + 1e-9;
                out.boundary_dims += ba + bb;
                out.boundary_both += ba && bb;
                if (!ba) out.interior_values.push_back(re);
                if (!bb) out.interior_values.push_back(im);
            }
        }
    }
    const double n = static_cast<double>(out.per_trial.size());
    if (n > 0) {
        out.mean = sum / n;
        out.std_error = n > 1 ? std::sqrt(std::max(0.0, (sum2 - n * out.mean * out.mean) / (n - 1)) / n) : 0.0;
    }
    return out;
}

McResult mc_energy_penalty(int K, double alpha, int trials, const RelaxationScheme& scheme, std::uint64_t seed) {
    McConfig cfg;
    cfg.K = K;
    cfg.alpha = alpha;
    cfg.trials = trials;
    cfg.scheme = scheme;
    cfg.seed = seed;
    return run_mc(cfg);
}

ConditionalDist mc_conditional_hist(const McResult& mc) {
    ConditionalDist d;
    d.u = cd(1.0, 1.0);
    if (!mc.joint_counts.empty()) {
        const int L = static_cast<int>(mc.c_values.size());
        for (int a = 0; a < L; ++a)
            for (int b = 0; b < L; ++b) {
                d.points.emplace_back(mc.c_values[a], mc.c_values[b]);
                d.probabilities.push_back(mc.total_symbols ? double(mc.joint_counts[a][b]) / mc.total_symbols : 0.0);
            }
    } else {
        // convex: the atom at u plus the rest lumped as one continuous remainder
        const double p = mc.total_symbols ? double(mc.boundary_both) / mc.total_symbols : 0.0;
        d.points = {cd(1.0, 1.0)};
        d.probabilities = {p};
        d.continuous_mass = 1.0 - p;
    }
    return d;
}

}  // namespace vplab
