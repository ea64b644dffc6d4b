#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vplab {

// Thrown when an iterative solver runs out of iterations. Carries the last
// iterate so callers can report or restart from it.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, Eigen::VectorXd last, double residual)
        : std::runtime_error(what), last_(std::move(last)), residual_(residual) {}
    const Eigen::VectorXd& last_iterate() const { return last_; }
    double residual() const { return residual_; }

private:
    Eigen::VectorXd last_;
    double residual_;
};

class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Nodes and weights for the normalized measure exp(-x^2) dx / sqrt(pi).
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }

    template <class F>
    double integrate(F&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
        return s;
    }
};

QuadratureRule gauss_hermite(int n);

struct SolverConfig {
    double tolerance = 1e-10;
    int max_iterations = 5000;
    double damping = 0.5;
    int quadrature_order = 40;

    void validate() const;
};

// Gaussian tail probability. Saturates to exactly 0/1 for |x| > 38.
double q_function(double x);

// log Q(x), accurate far into the upper tail where Q underflows.
double log_q(double x);

// log(Q(a) - Q(b)) for a <= b, with a or b allowed to be +-inf.
double log_q_diff(double a, double b);

// Damped iteration x <- (1-d)x + d*map(x). The damping is halved whenever the
// undamped residual grows.
Eigen::VectorXd fixed_point(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& map,
                            const Eigen::VectorXd& x0, const SolverConfig& cfg);

double bisect(const std::function<double(double)>& f, double a, double b, double tol);

struct IntegralResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool accurate = true;
};

IntegralResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double tol);

// Powell hybrid root finder for F(x)=0 (MINPACK hybrd with forward-difference
// Jacobian). Returns false when MINPACK reports failure or the final max-norm
// residual exceeds tol.
struct RootResult {
    Eigen::VectorXd x;
    double residual = 0.0;
    bool converged = false;
};

RootResult solve_system(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
                        const Eigen::VectorXd& x0, double tol, int max_evals = 4000);

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace vplab
