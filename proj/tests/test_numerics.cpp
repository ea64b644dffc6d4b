#include "doctest.h"
#include "vplab/numerics.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>

using namespace vplab;

namespace {

// Moments of exp(-x^2)/sqrt(pi): (d-1)!! / 2^(d/2) for even d.
double gaussian_moment(int d) {
    if (d % 2) return 0.0;
    double m = 1.0;
    for (int k = d - 1; k > 0; k -= 2) m *= k;
    return m / std::pow(2.0, d / 2);
}

}  // namespace

TEST_CASE("gauss_hermite basics") {
    auto r1 = gauss_hermite(1);
    REQUIRE(r1.size() == 1);
    CHECK(r1.nodes[0] == doctest::Approx(0.0));
    CHECK(r1.weights[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS(gauss_hermite(0), std::invalid_argument);

    auto r = gauss_hermite(40);
    double wsum = 0.0;
    for (double w : r.weights) {
        CHECK(w > 0.0);
        wsum += w;
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-13));
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(r.nodes[i] > r.nodes[i - 1]);
    CHECK(r.integrate([](double x) { return x * x; }) == doctest::Approx(0.5));
    // quartic moment against an adaptive-integration oracle
    const double oracle = integrate_adaptive(
        [](double x) { return std::pow(x, 4) * std::exp(-x * x) / std::sqrt(std::numbers::pi); }, -12, 12, 1e-13)
                              .value;
    CHECK(gauss_hermite(3).integrate([](double x) { return std::pow(x, 4); }) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(oracle == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("gauss_hermite exact through degree 2n-1 for n <= 30") {
    for (int n = 1; n <= 30; ++n) {
        const auto r = gauss_hermite(n);
        for (int d = 0; d <= 2 * n - 1; ++d) {
            const double q = r.integrate([d](double x) { return std::pow(x, d); });
            const double m = gaussian_moment(d);
            // odd moments cancel to zero, so measure them against E|x|^d
            const double scale = std::max(1.0, r.integrate([d](double x) { return std::pow(std::abs(x), d); }));
            INFO("n=" << n << " d=" << d);
            CHECK(std::abs(q - m) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("q_function") {
    CHECK(q_function(0.0) == 0.5);
    CHECK(q_function(50.0) == 0.0);
    CHECK(q_function(-50.0) == 1.0);
    CHECK(q_function(1.6449) == doctest::Approx(0.5 * boost::math::erfc(1.6449 / std::sqrt(2.0))).epsilon(1e-12));
    CHECK(std::abs(q_function(1.6449) - 0.05) < 1e-4);
    double prev = 2.0;
    for (double x = -8.0; x <= 8.0; x += 0.01) {
        const double q = q_function(x);
        CHECK(std::abs(q + q_function(-x) - 1.0) <= 1e-12);
        // below about -5.5, 1 - Q is under half an ulp of 1
        CHECK(q <= prev);
        if (x > -5.0) CHECK(q < prev);
        prev = q;
    }
}

TEST_CASE("log_q and log_q_diff in the far tail") {
    CHECK(log_q(0.0) == doctest::Approx(std::log(0.5)));
    // Mills-ratio asymptote at x = 40
    const double x = 40.0;
    const double asym = -0.5 * x * x - std::log(x * std::sqrt(2 * std::numbers::pi)) + std::log1p(-1 / (x * x));
    CHECK(log_q(x) == doctest::Approx(asym).epsilon(1e-6));
    CHECK(std::exp(log_q_diff(-1.0, 1.0)) == doctest::Approx(q_function(-1.0) - q_function(1.0)).epsilon(1e-13));
    CHECK(std::exp(log_q_diff(-INFINITY, INFINITY)) == doctest::Approx(1.0));
    CHECK(std::isfinite(log_q_diff(30.0, 31.0)));
}

TEST_CASE("fixed_point") {
    SolverConfig cfg;
    cfg.tolerance = 1e-12;
    Eigen::VectorXd x0(2);
    x0 << 0.3, -2.0;
    auto id = fixed_point([](const Eigen::VectorXd& x) { return x; }, x0, cfg);
    CHECK((id - x0).norm() == 0.0);

    Eigen::VectorXd one(1);
    one << 1.0;
    auto half = fixed_point([](const Eigen::VectorXd& x) { return Eigen::VectorXd(x / 2); }, one, cfg);
    CHECK(std::abs(half[0]) <= 1e-10);

    auto cosmap = [](const Eigen::VectorXd& x) {
        Eigen::VectorXd y(1);
        y << std::cos(x[0]);
        return y;
    };
    auto d = fixed_point(cosmap, one, cfg);
    const double oracle = bisect([](double t) { return t - std::cos(t); }, 0.0, 1.0, 1e-14);
    CHECK(d[0] == doctest::Approx(oracle).epsilon(1e-10));
    CHECK(d[0] == doctest::Approx(0.739085).epsilon(1e-6));
    // residual under the undamped map
    CHECK(std::abs(std::cos(d[0]) - d[0]) <= cfg.tolerance);

    SolverConfig few;
    few.max_iterations = 3;
    Eigen::VectorXd y0(1);
    y0 << 1.0;
    CHECK_THROWS_AS(fixed_point([](const Eigen::VectorXd& x) { return Eigen::VectorXd(x.array() + 1.0); }, y0, few),
                    ConvergenceError);
}

TEST_CASE("bisect") {
    CHECK(std::abs(bisect([](double x) { return x; }, -1, 1, 1e-12)) < 1e-12);
    CHECK(bisect([](double x) { return x * x - 2; }, 1, 2, 1e-12) == doctest::Approx(std::sqrt(2.0)));
    CHECK(bisect([](double x) { return q_function(x) - 0.05; }, 0, 4, 1e-9) == doctest::Approx(1.6449).epsilon(1e-3));
    CHECK_THROWS_AS(bisect([](double x) { return x * x + 1; }, -1, 1, 1e-9), BracketError);
}

TEST_CASE("integrate_adaptive") {
    CHECK(integrate_adaptive([](double) { return 1.0; }, 0, 1, 1e-12).value == doctest::Approx(1.0));
    auto g = integrate_adaptive([](double x) { return std::exp(-x * x) / std::sqrt(std::numbers::pi); }, -10, 10, 1e-12);
    CHECK(g.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.accurate);
    CHECK(std::abs(integrate_adaptive([](double x) { return x * std::exp(-x * x); }, -10, 10, 1e-12).value) < 1e-12);
}

TEST_CASE("solve_system") {
    auto F = [](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(2);
        r << x[0] * x[0] + x[1] * x[1] - 4.0, x[0] - x[1];
        return r;
    };
    Eigen::VectorXd x0(2);
    x0 << 1.0, 0.5;
    auto r = solve_system(F, x0, 1e-12);
    REQUIRE(r.converged);
    CHECK(r.x[0] == doctest::Approx(std::sqrt(2.0)));
    CHECK(r.x[1] == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("SolverConfig validation") {
    SolverConfig c;
    c.damping = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.damping = 1.0;
    c.tolerance = -1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
