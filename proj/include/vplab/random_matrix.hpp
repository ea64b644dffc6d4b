#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vplab {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

class SingularChannelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Name of the generator recorded in run manifests.
inline constexpr const char* kRngAlgorithm = "mt19937_64 + splitmix64 seeding + boost ziggurat normal";

// Deterministic 64-bit mixing used to derive per-trial streams.
std::uint64_t splitmix64(std::uint64_t x);

// K x N, i.i.d. circularly symmetric complex Gaussian entries of variance 1/N.
ComplexMatrix sample_gaussian_channel(int K, int N, std::uint64_t seed);

// J = (H H^H)^{-1} via Cholesky of H H^H. Requires K <= N.
ComplexMatrix zf_gram(const ComplexMatrix& H, double max_condition = 1e12);

// R-transform of the limiting spectrum of J for Gaussian H at load alpha.
// The shipped functions take the negated argument x = -w >= 0, which is the
// only region the fixed-point equations touch.
struct GaussianRTransform {
    double alpha;

    explicit GaussianRTransform(double a);

    double value_neg(double x) const;       // R(-x)
    double derivative_neg(double x) const;  // R'(-x)
    double integral(double x) const;        // int_0^x R(-w) dw  (alpha <= 1)
};

// R(w) with w <= 0.
double r_gaussian(double w, double alpha);
double r_gaussian_prime(double w, double alpha);
double r_gaussian_antiderivative(double x, double alpha);

double lattice_lower_bound(double alpha);

}  // namespace vplab
