#include "vplab/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/NonLinearOptimization>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace vplab {

QuadratureRule gauss_hermite(int n) {
    if (n <= 0) throw std::invalid_argument("gauss_hermite: n must be positive");
    // Starting nodes from Golub-Welsch on the Jacobi matrix of the Hermite
    // recurrence for exp(-x^2)/sqrt(pi): off-diagonals sqrt(k/2).
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        T(k, k - 1) = T(k - 1, k) = std::sqrt(0.5 * k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Eigenvector weights lose relative accuracy at the outer nodes, so polish
    // each node by Newton on the orthonormal Hermite recurrence and take
    // w = 2 / p_n'(x)^2, which stays accurate there.
    auto eval = [n](double x, double& pn, double& pn1) {
        double p0 = std::pow(std::numbers::pi, -0.25), p1 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = x * std::sqrt(2.0 / j) * p1 - std::sqrt((j - 1.0) / j) * p2;
        }
        pn = p0;
        pn1 = p1;
    };
    for (int i = 0; i < n; ++i) {
        double x = es.eigenvalues()(i), pn = 0.0, pn1 = 0.0;
        for (int it = 0; it < 10; ++it) {
            eval(x, pn, pn1);
            const double dx = pn / (std::sqrt(2.0 * n) * pn1);
            x -= dx;
            if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
        }
        eval(x, pn, pn1);
        const double d = std::sqrt(2.0 * n) * pn1;
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / (d * d) / std::sqrt(std::numbers::pi);
    }
    // symmetrize: the exact rule is symmetric about zero
    for (int i = 0; i < n / 2; ++i) {
        double x = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
        double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    double s = 0.0;
    for (double w : rule.weights) s += w;
    for (double& w : rule.weights) w /= s;
    return rule;
}

void SolverConfig::validate() const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("SolverConfig: tolerance must be positive");
    if (max_iterations <= 0) throw std::invalid_argument("SolverConfig: max_iterations must be positive");
    if (!(damping > 0.0 && damping <= 1.0))
        throw std::invalid_argument("SolverConfig: damping must lie in (0,1]");
    if (quadrature_order <= 0) throw std::invalid_argument("SolverConfig: quadrature_order must be positive");
}

double q_function(double x) {
    if (x > 38.0) return 0.0;
    if (x < -38.0) return 1.0;
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double log_q(double x) {
    if (x == std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::infinity();
    if (x < 30.0) {
        if (x < -8.0) return std::log1p(-0.5 * std::erfc(-x / std::numbers::sqrt2));
        return std::log(0.5 * std::erfc(x / std::numbers::sqrt2));
    }
    // asymptotic series of the Mills ratio, plenty accurate past x=30
    double r = 1.0 / (x * x);
    double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
    return -0.5 * x * x - std::log(x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double log_q_diff(double a, double b) {
    if (!(a <= b)) throw std::invalid_argument("log_q_diff: need a <= b");
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    if (a == b) return ninf;
    if (a >= 0.0) {
        double la = log_q(a);
        double lb = log_q(b);
        return la + std::log1p(-std::exp(lb - la));
    }
    if (b <= 0.0) return log_q_diff(-b, -a);
    // straddles zero: 1 - Q(-a) - Q(b)
    double tails = std::exp(log_q(-a)) + std::exp(log_q(b));
    return std::log1p(-tails);
}

Eigen::VectorXd fixed_point(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& map,
                            const Eigen::VectorXd& x0, const SolverConfig& cfg) {
    cfg.validate();
    Eigen::VectorXd x = x0;
    double d = cfg.damping;
    double prev = std::numeric_limits<double>::infinity();
    double res = prev;
    for (int it = 0; it < cfg.max_iterations; ++it) {
        Eigen::VectorXd fx = map(x);
        res = (fx - x).lpNorm<Eigen::Infinity>();
        if (!std::isfinite(res)) throw ConvergenceError("fixed_point: non-finite residual", x, res);
        if (res <= cfg.tolerance) return x;
        if (res > prev) d = std::max(0.5 * d, 1e-6);
        prev = res;
        x = (1.0 - d) * x + d * fx;
    }
    throw ConvergenceError("fixed_point: iteration limit reached", x, res);
}

double bisect(const std::function<double(double)>& f, double a, double b, double tol) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) throw BracketError("bisect: no sign change on the bracket");
    for (int it = 0; it < 400 && std::abs(b - a) > tol; ++it) {
        double m = 0.5 * (a + b);
        double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

IntegralResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double tol) {
    IntegralResult r;
    double err = 0.0;
    r.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol, &err);
    r.error_estimate = err;
    r.accurate = err <= tol * (1.0 + std::abs(r.value));
    return r;
}

namespace {

struct SystemFunctor {
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>* F;
    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
        fvec = (*F)(x);
        return fvec.allFinite() ? 0 : -1;
    }
};

}  // namespace

RootResult solve_system(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
                        const Eigen::VectorXd& x0, double tol, int max_evals) {
    RootResult out;
    out.x = x0;
    SystemFunctor functor{&F};
    Eigen::HybridNonLinearSolver<SystemFunctor> solver(functor);
    solver.parameters.maxfev = max_evals;
    solver.parameters.xtol = 1e-13;
    solver.solveNumericalDiff(out.x);
    Eigen::VectorXd r = F(out.x);
    out.residual = r.allFinite() ? r.lpNorm<Eigen::Infinity>() : std::numeric_limits<double>::infinity();
    out.converged = out.x.allFinite() && out.residual <= tol;
    return out;
}

}  // namespace vplab
