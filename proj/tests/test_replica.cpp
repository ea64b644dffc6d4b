#include "doctest.h"
#include "vplab/random_matrix.hpp"
#include "vplab/replica.hpp"

#include <cmath>
#include <complex>
#include <numeric>

using namespace vplab;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("RS lattice and convex fixed points") {
    const auto lat = RelaxationScheme::lattice(2);
    CHECK(solve_rs(lat, 0.01).energy == doctest::Approx(2.0).epsilon(1e-2));
    const auto rs6 = solve_rs(lat, 0.6);
    CHECK(rs6.energy < lattice_lower_bound(0.6));
    for (double r : rs6.residuals) CHECK(std::abs(r) <= 1e-8);
    // the convex RS solve and the scalar fixed point describe the same saddle point
    for (double a : {0.3, 0.5, 1.0})
        CHECK(solve_rs(RelaxationScheme::convex(), a).energy_db() ==
              doctest::Approx(to_db(solve_crqpsk_energy(a))).epsilon(1e-5));
}

TEST_CASE("CR-QPSK scalar fixed point") {
    CHECK(solve_crqpsk_energy(1e-3) == doctest::Approx(2.0).epsilon(1e-2));
    double prev = 0.0;
    for (double a = 0.05; a < 1.96; a += 0.05) {
        const double e = solve_crqpsk_energy(a);
        CHECK(std::isfinite(e));
        CHECK(e > prev);
        prev = e;
    }
    CHECK(solve_crqpsk_energy(1.5) > solve_crqpsk_energy(1.0));
    CHECK_THROWS_AS(solve_crqpsk_energy(2.0), std::invalid_argument);
}

TEST_CASE("1RSB at unit load") {
    const auto s4 = solve_1rsb_unit_load(4);
    CHECK(std::abs(s4.energy_db() - 7.0744) <= 0.02);
    const double lb = to_db(lattice_lower_bound(1.0));
    CHECK(s4.energy_db() > lb);
    CHECK(s4.energy_db() - lb < 0.02);
    CHECK(solve_1rsb_lattice(1.0, 4).energy == s4.energy);
    // L = 2 sits visibly above L >= 3 at exactly alpha = 1
    CHECK(solve_1rsb_unit_load(2).energy > solve_1rsb_unit_load(3).energy);
    CHECK(std::abs(solve_1rsb_unit_load(3).energy_db() - s4.energy_db()) < 0.005);
    // L = 1 keeps x = u, whose ZF energy diverges at unit load
    CHECK_THROWS(solve_1rsb_unit_load(1));
}

TEST_CASE("1RSB agrees with RS at low load and stays above the bound") {
    const auto lat = RelaxationScheme::lattice(2);
    for (double a : {0.1, 0.2}) CHECK(std::abs(solve_rs(lat, a).energy_db() - solve_1rsb_lattice(a, 2).energy_db()) <= 0.05);
    CHECK(std::abs(solve_rs(lat, 0.3).energy_db() - solve_1rsb_lattice(0.3, 2).energy_db()) <= 0.1);
    for (double a = 0.4; a <= 1.0001; a += 0.05) {
        const double al = std::min(a, 1.0);
        const auto s = solve_1rsb_lattice(al, 2);
        INFO("alpha=" << al << " method=" << s.method);
        CHECK(s.energy > lattice_lower_bound(al));
        CHECK(s.energy > solve_rs(lat, al).energy);
    }
}

TEST_CASE("1RSB solver cross-checks") {
    SolverConfig o60;
    o60.quadrature_order = 60;
    for (double a : {0.5, 0.75}) {
        const auto s = solve_1rsb_lattice(a, 2);
        REQUIRE(s.method == "full");
        CHECK(solve_1rsb_lattice(a, 2, o60).energy_db() == doctest::Approx(s.energy_db()).epsilon(1e-7));
        for (double r : residuals_1rsb_lattice(a, 2, s.q1, s.p1, s.chi1, s.mu1)) CHECK(std::abs(r) <= 1e-8);
        CHECK(std::isfinite(s.g1));
        CHECK(s.g1 > 0.0);
        CHECK(energy_1rsb(a, s.q1, s.p1, s.chi1, s.mu1) == doctest::Approx(s.energy));
    }
    // L = 2 and L = 3 nearly coincide away from unit load
    for (double a : {0.5, 0.75, 0.95})
        CHECK(std::abs(solve_1rsb_lattice(a, 2).energy_db() - solve_1rsb_lattice(a, 3).energy_db()) <= 0.05);

    // hand-off to the small-chi reduction
    const auto full = solve_1rsb_lattice_full(0.95, 2);
    CHECK(full.chi1 < 1e-2);
    CHECK(std::abs(solve_1rsb_near_unit(0.95, 2).energy_db() - full.energy_db()) <= 0.05);
    CHECK(std::abs(solve_1rsb_near_unit(0.9999, 4).energy_db() - solve_1rsb_unit_load(4).energy_db()) <= 0.02);

    // the alphabet with more points never costs more
    CHECK(solve_1rsb_lattice(0.9, 1).energy > solve_1rsb_lattice(0.9, 2).energy);
}

TEST_CASE("zero-temperature entropy") {
    const GaussianRTransform R(0.6);
    CHECK(entropy_zero_temp(0.0, [&](double x) { return R.value_neg(x); }).entropy == 0.0);
    CHECK(entropy_gaussian(0.0, 0.6).entropy == 0.0);
    for (double a : {0.1, 0.5, 0.9, 1.0})
        for (double chi : {1e-6, 0.01, 0.3, 2.0, 10.0}) {
            const GaussianRTransform Ra(a);
            const double closed = entropy_gaussian(chi, a).entropy;
            CHECK(closed < 0.0);
            CHECK(entropy_zero_temp(chi, [&](double x) { return Ra.value_neg(x); }).entropy ==
                  doctest::Approx(closed).epsilon(1e-9));
        }
}

TEST_CASE("conditional output laws") {
    for (double a : {0.1, 0.3, 0.6, 0.9, 0.99}) {
        const auto s = solve_1rsb_lattice(a, 3);
        const auto m = marginal_1rsb_lattice(s);
        CHECK(sum(m) == doctest::Approx(1.0).epsilon(1e-8));
        const auto d = cond_dist_1rsb_lattice(s);
        CHECK(sum(d.probabilities) == doctest::Approx(1.0).epsilon(1e-8));
        // quadrant rotation
        const std::complex<double> j(0.0, 1.0);
        const auto r = cond_dist_1rsb_lattice(s, j * std::complex<double>(1.0, 1.0));
        REQUIRE(r.points.size() == d.points.size());
        for (std::size_t i = 0; i < d.points.size(); ++i) {
            bool found = false;
            for (std::size_t k = 0; k < r.points.size(); ++k)
                if (std::abs(r.points[k] - j * d.points[i]) < 1e-12) {
                    found = true;
                    CHECK(r.probabilities[k] == d.probabilities[i]);
                }
            CHECK(found);
        }
    }
    // P(c = 1) per real dimension at low load
    const auto c = RelaxationScheme::lattice(2).c_sorted();
    const auto low = marginal_1rsb_lattice(solve_1rsb_lattice(0.1, 2));
    CHECK(low[std::find(c.begin(), c.end(), 1.0) - c.begin()] >= 0.99);

    const auto lat = RelaxationScheme::lattice(2);
    CHECK(sum(cond_dist_rs(lat, solve_rs(lat, 0.005)).probabilities) == doctest::Approx(1.0).epsilon(1e-12));
    const auto tiny = cond_dist_rs(lat, solve_rs(lat, 0.005));
    for (std::size_t i = 0; i < tiny.points.size(); ++i)
        if (tiny.points[i] == std::complex<double>(1.0, 1.0)) CHECK(tiny.probabilities[i] > 0.999);

    // RS and 1RSB laws coincide in the low-load regime
    const auto rs = cond_dist_rs(lat, solve_rs(lat, 0.2));
    const auto rsb = cond_dist_1rsb_lattice(solve_1rsb_lattice(0.2, 2));
    double tv = 0.0;
    for (std::size_t i = 0; i < rs.points.size(); ++i)
        for (std::size_t k = 0; k < rsb.points.size(); ++k)
            if (rs.points[i] == rsb.points[k]) tv += 0.5 * std::abs(rs.probabilities[i] - rsb.probabilities[k]);
    CHECK(tv <= 1e-2);
}

TEST_CASE("CR-QPSK output law") {
    for (double a : {0.3, 0.7, 1.0}) {
        const auto c = crqpsk_pdf_components(a);
        CHECK(c.mass_atom() + c.mass_half_lines() + c.mass_interior() == doctest::Approx(1.0).epsilon(1e-12));
        const double cont = integrate_adaptive([&](double x) { return c.density(x); }, 1.0, 60.0, 1e-13).value;
        CHECK(std::abs(c.Q1 + cont - 1.0) <= 1e-8);
        CHECK(c.cdf(1e3) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(c.cdf(1.0) == doctest::Approx(c.Q1));
        const auto d = cond_dist_rs(RelaxationScheme::convex(), solve_rs(RelaxationScheme::convex(), a));
        CHECK(sum(d.probabilities) + d.continuous_mass == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(crqpsk_pdf_components(1e-3).Q1 > 0.9999);
}
