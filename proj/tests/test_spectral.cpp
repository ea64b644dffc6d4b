#include "doctest.h"
#include "vplab/numerics.hpp"
#include "vplab/replica.hpp"
#include "vplab/spectral.hpp"

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include <cmath>
#include <numbers>

using namespace vplab;

namespace {

// beta * int log2(1 + snr l) dMP_beta(l), the large-system log-det per antenna
double mp_oracle(double snr, double beta) {
    const double a = std::pow(1 - std::sqrt(beta), 2), b = std::pow(1 + std::sqrt(beta), 2);
    // l = a + (b - a) sin^2(t) keeps the square-root edges smooth
    auto f = [&](double t) {
        const double s = std::sin(t), c = std::cos(t);
        const double l = a + (b - a) * s * s;
        const double dens = (b - a) * s * c / (2 * std::numbers::pi * beta * l);
        return std::log2(1 + snr * l) * dens * 2 * (b - a) * s * c;
    };
    return beta * integrate_adaptive(f, 0.0, std::numbers::pi / 2, 1e-13).value;
}

}  // namespace

TEST_CASE("closed-form schemes") {
    CHECK(se_zf_gaussian(0.0, 0.5) == 0.0);
    CHECK(se_zf_gaussian(2.0, 0.5) == doctest::Approx(0.5));
    CHECK(se_zf_gaussian(6.0, 0.5) == doctest::Approx(1.0));
    CHECK_THROWS_AS(se_zf_gaussian(1.0, 1.0), std::invalid_argument);

    CHECK(se_dpc(0.0, 1.0) == 0.0);
    CHECK(se_dpc(10.0, 1e-9) < 1e-6);
    CHECK(se_dpc(10.0, 1.0) == doctest::Approx(mp_oracle(10.0, 1.0)).epsilon(1e-9));
    CHECK(se_dpc(3.0, 0.5) == doctest::Approx(mp_oracle(3.0, 0.5)).epsilon(1e-9));
}

TEST_CASE("ZF with binary inputs") {
    CHECK(se_zf_bpsk(0.0, 0.5) == 0.0);
    CHECK(se_zf_bpsk(1e5, 0.5) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(se_zf_qpsk(7.0, 0.4) == 2.0 * se_zf_bpsk(3.5, 0.4));

    // (1 - alpha) snr = 4; y = 1 + n with n ~ N(0, 1/(2 rho)) and llr 4 rho y
    const double rho = 4.0;
    boost::random::mt19937_64 gen(12345);
    boost::random::normal_distribution<double> n(0.0, std::sqrt(0.5 / rho));
    double acc = 0.0;
    const int samples = 10'000'000;
    for (int i = 0; i < samples; ++i) {
        const double y = 1.0 + n(gen);
        const double z = -4.0 * rho * y;
        acc += (z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) / std::numbers::ln2;
    }
    CHECK(std::abs(se_zf_bpsk(8.0, 0.5) - 0.5 * (1.0 - acc / samples)) <= 1e-3);
}

TEST_CASE("lattice and CR-QPSK equivalent channels") {
    CHECK(se_lattice_qpsk(0.0, 0.5, 2) == 0.0);
    // a near-degenerate mixture reduces to BPSK at rho
    const double a = 0.02, snr = 5.0;
    const auto ch = equivalent_channel_lattice(snr, a, 2);
    CHECK(std::abs(se_lattice_qpsk(snr, a, 2) - 2 * a * bpsk_mixture_mi(ch.rho, {1.0}, {1.0})) <= 1e-3);
    CHECK(se_lattice_qpsk(1e6, 0.75, 2) == doctest::Approx(1.5).epsilon(1e-6));

    CHECK(se_crqpsk(0.0, 1.0) == 0.0);
    CHECK(se_crqpsk(1e7, 1.5) == doctest::Approx(3.0).epsilon(1e-6));
    for (double al : {0.5, 1.0}) {
        const double E = solve_crqpsk_energy(al);
        for (double rho : {0.3, 3.0}) {
            const double tot = integrate_adaptive([&](double y) { return crqpsk_output_density(y, rho, al, E); }, -40.0,
                                                  40.0, 1e-13)
                                   .value;
            CHECK(tot == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("equivalent-channel mutual information against direct Monte Carlo") {
    const double snr = from_db(10.0), a = 0.75;
    const auto ch = equivalent_channel_lattice(snr, a, 2);
    const double direct = mc_channel_se(ch, a, 10'000'000, 2024);
    CHECK(std::abs(se_from_channel(ch, a) - direct) <= 2e-3);
    CHECK(se_from_channel(ch, a) == doctest::Approx(se_lattice_qpsk(snr, a, 2)));
}

TEST_CASE("spectral efficiencies are nonnegative, monotone and capped") {
    for (SeScheme s : {SeScheme::ZfQpsk, SeScheme::Lattice, SeScheme::CrQpsk}) {
        const double a = 0.6;
        double prev = 0.0;
        for (double sd = -10.0; sd <= 40.0; sd += 2.5) {
            const double c = se_at_snr(s, from_db(sd), a);
            INFO(se_scheme_name(s) << " snr_db=" << sd);
            CHECK(c >= prev - 1e-12);
            CHECK(c <= 2 * a + 1e-12);
            prev = c;
        }
    }
}

TEST_CASE("generalized THP") {
    GthpConfig cfg;
    for (double Px : {0.3, 3.0, 30.0})
        for (double inf : {0.2, 0.6, 1.0}) {
            const auto d = gthp_densities(Px, inf, cfg);
            const double n = integrate_adaptive([&](double z) { return d.noise(z); }, -d.delta, d.delta, 1e-13).value;
            const double o = integrate_adaptive([&](double z) { return d.output(z); }, -d.delta, d.delta, 1e-13).value;
            CHECK(std::abs(n - 1.0) <= 1e-8);
            CHECK(std::abs(o - 1.0) <= 1e-8);
        }
    CHECK(gthp_rate_binary(1e4, 1.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(gthp_rate_binary(1e-4, 1.0) < 1e-3);
    for (double Px : {0.5, 2.0, 8.0}) {
        const auto [x, r] = gthp_optimize_inflation(Px, true);
        CHECK(r >= gthp_rate_binary(Px, 1.0) - 1e-12);
        CHECK(r >= gthp_rate_binary(Px, Px / (Px + cfg.noise_level)) - 1e-12);
        double grid = 0.0;
        for (int i = 1; i <= 100; ++i) grid = std::max(grid, gthp_rate_binary(Px, 0.01 * i));
        CHECK(r >= grid - 1e-4);
    }
    CHECK(se_gthp_qpsk(0.0, 0.5) == 0.0);
    CHECK(se_gthp_qpsk(1e6, 0.5) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("Eb/N0 self-consistency and load optimization") {
    for (SeScheme s : {SeScheme::ZfGaussian, SeScheme::ZfQpsk, SeScheme::Lattice, SeScheme::CrQpsk}) {
        const auto p = se_at_ebno(s, 6.0, 0.5);
        REQUIRE(p.C > 0.0);
        CHECK(from_db(p.snr_db) == doctest::Approx(p.C * from_db(6.0) / 0.5).epsilon(1e-6));
    }
    // ZF-Gaussian: C = a log2(1 + (1 - a) C eb / a), solved independently
    const double a = 0.5, eb = from_db(4.0);
    const double C = bisect([&](double c) { return c - a * std::log2(1 + (1 - a) * c * eb / a); }, 1e-3, 10.0, 1e-14);
    CHECK(se_at_ebno(SeScheme::ZfGaussian, 4.0, a).C == doctest::Approx(C).epsilon(1e-6));
    // below the ZF-Gaussian threshold a (1 - a) eb / (a ln 2) < 1 no positive root exists
    CHECK(se_at_ebno(SeScheme::ZfGaussian, -3.0, a).C == 0.0);
    // the cap is approached at high Eb/N0
    CHECK(se_at_ebno(SeScheme::ZfQpsk, 40.0, 0.5).C == doctest::Approx(1.0).epsilon(1e-6));

    // DPC at equal load dominates
    for (double e : {2.0, 6.0, 10.0})
        for (SeScheme s : {SeScheme::ZfQpsk, SeScheme::Lattice})
            CHECK(se_at_ebno(SeScheme::Dpc, e, 0.8).C >= se_at_ebno(s, e, 0.8).C);
    for (double snr : {1.0, 10.0}) CHECK(se_dpc(snr, 0.8) >= se_gthp_qpsk(snr, 0.8));

    const auto grid = default_alpha_grid(SeScheme::ZfQpsk, 16);
    const auto opt = optimize_load(SeScheme::ZfQpsk, 5.0, grid);
    for (double al : grid) CHECK(opt.C_star >= se_at_ebno(SeScheme::ZfQpsk, 5.0, al).C - 1e-12);
    const auto inv = min_ebno_for_rate(SeScheme::ZfQpsk, opt.C_star, default_alpha_grid(SeScheme::ZfQpsk, 16));
    CHECK(inv.point.ebno_db == doctest::Approx(5.0).epsilon(2e-3));
}
