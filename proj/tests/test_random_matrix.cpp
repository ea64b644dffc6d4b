#include "doctest.h"
#include "vplab/numerics.hpp"
#include "vplab/random_matrix.hpp"

#include <cmath>
#include <numbers>

using namespace vplab;

TEST_CASE("channel sampling is deterministic and has variance 1/N") {
    auto a = sample_gaussian_channel(4, 6, 42), b = sample_gaussian_channel(4, 6, 42);
    CHECK((a - b).norm() == 0.0);
    CHECK((a - sample_gaussian_channel(4, 6, 43)).norm() > 0.0);

    auto H = sample_gaussian_channel(64, 64, 7);
    const double n = 64.0 * 64.0;
    const double mean = H.cwiseAbs2().sum() / n;
    // |h|^2 is exponential with mean 1/N, so its standard deviation is also 1/N
    CHECK(std::abs(mean - 1.0 / 64) <= 3.0 * (1.0 / 64) / std::sqrt(n));

    double s = 0.0, s2 = 0.0;
    const int draws = 1000;
    for (int t = 0; t < draws; ++t) {
        const double r = sample_gaussian_channel(1, 16, 1000 + t).squaredNorm();
        s += r;
        s2 += r * r;
    }
    const double m = s / draws, se = std::sqrt((s2 / draws - m * m) / draws);
    CHECK(std::abs(m - 1.0) <= 3.0 * se);
}

TEST_CASE("zf_gram") {
    ComplexMatrix H = ComplexMatrix::Zero(2, 3);
    H(0, 0) = 1.0;
    H(1, 2) = std::complex<double>(0.0, 1.0);
    CHECK((zf_gram(H) - ComplexMatrix::Identity(2, 2)).norm() < 1e-14);

    ComplexMatrix h(1, 3);
    h << std::complex<double>(1, 1), 2.0, std::complex<double>(0, -1);
    CHECK(zf_gram(h)(0, 0).real() == doctest::Approx(1.0 / h.squaredNorm()));

    auto J = zf_gram(sample_gaussian_channel(64, 128, 3));
    CHECK((J - J.adjoint()).norm() <= 1e-12 * J.norm());
    CHECK(Eigen::LLT<ComplexMatrix>(J).info() == Eigen::Success);
    CHECK(J.trace().real() / 64 == doctest::Approx(2.0).epsilon(0.05));

    double tr = 0.0;
    for (int t = 0; t < 50; ++t) tr += zf_gram(sample_gaussian_channel(128, 256, 500 + t)).trace().real() / 128;
    CHECK(tr / 50 == doctest::Approx(2.0).epsilon(0.03));

    CHECK_THROWS(zf_gram(sample_gaussian_channel(3, 2, 1)));
    ComplexMatrix rank1(2, 2);
    rank1 << 1.0, 1.0, 1.0, 1.0;
    CHECK_THROWS_AS(zf_gram(rank1), SingularChannelError);
}

TEST_CASE("R-transform closed forms") {
    CHECK(r_gaussian(-1.0, 1.0) == doctest::Approx(1.0));
    CHECK(r_gaussian(-4.0, 1.0) == doctest::Approx(0.5));
    CHECK(r_gaussian(0.0, 0.5) == doctest::Approx(2.0));
    CHECK(r_gaussian(-1e-12, 0.5) == doctest::Approx(2.0));
    CHECK(r_gaussian_antiderivative(4.0, 1.0) == doctest::Approx(4.0));
    CHECK(r_gaussian_antiderivative(0.0, 0.3) == 0.0);
    // antiderivative against quadrature
    for (double a : {0.2, 0.5, 0.9}) {
        const double q = integrate_adaptive([a](double w) { return r_gaussian(-w, a); }, 0.0, 2.5, 1e-13).value;
        CHECK(r_gaussian_antiderivative(2.5, a) == doctest::Approx(q).epsilon(1e-10));
    }
    CHECK_THROWS_AS(r_gaussian(0.5, 1.0), std::invalid_argument);
}

TEST_CASE("R-transform is strictly increasing and its derivative matches finite differences") {
    for (int i = 1; i <= 10; ++i) {
        const double a = 0.1 * i;
        double prev = -INFINITY;
        for (double w = -20.0; w <= -1e-3; w += 0.05) {
            const double r = r_gaussian(w, a);
            CHECK(r > prev);
            prev = r;
            const double h = 1e-5 * std::max(1.0, std::abs(w));
            const double fd = (r_gaussian(w + h, a) - r_gaussian(w - h, a)) / (2 * h);
            INFO("alpha=" << a << " w=" << w);
            CHECK(std::abs(r_gaussian_prime(w, a) - fd) <= 1e-6 * std::abs(fd));
        }
    }
    GaussianRTransform R(0.7);
    CHECK(R.value_neg(0.3) == doctest::Approx(r_gaussian(-0.3, 0.7)));
    CHECK(R.derivative_neg(0.3) == doctest::Approx(r_gaussian_prime(-0.3, 0.7)));
    CHECK(R.integral(0.3) == doctest::Approx(r_gaussian_antiderivative(0.3, 0.7)));
}

TEST_CASE("lattice lower bound") {
    CHECK(lattice_lower_bound(1.0) == doctest::Approx(16.0 / std::numbers::pi));
    CHECK(to_db(lattice_lower_bound(1.0)) == doctest::Approx(7.0697).epsilon(1e-5));
    CHECK(lattice_lower_bound(0.5) == doctest::Approx(8.0 / std::numbers::pi));
    CHECK(lattice_lower_bound(1e-7) == doctest::Approx(16.0 / (std::numbers::pi * std::numbers::e)).epsilon(1e-6));
    CHECK_THROWS_AS(lattice_lower_bound(0.0), std::invalid_argument);
    CHECK_THROWS_AS(lattice_lower_bound(1.1), std::invalid_argument);
}
