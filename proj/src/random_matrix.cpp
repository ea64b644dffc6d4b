#include "vplab/random_matrix.hpp"

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include <cmath>
#include <numbers>

namespace vplab {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

ComplexMatrix sample_gaussian_channel(int K, int N, std::uint64_t seed) {
    if (K < 1 || N < 1) throw std::invalid_argument("sample_gaussian_channel: K and N must be positive");
    boost::random::mt19937_64 eng(splitmix64(seed));
    boost::random::normal_distribution<double> nd(0.0, 1.0);
    const double s = 1.0 / std::sqrt(2.0 * N);
    ComplexMatrix H(K, N);
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < N; ++j) {
            double re = nd(eng);
            double im = nd(eng);
            H(i, j) = {s * re, s * im};
        }
    return H;
}

ComplexMatrix zf_gram(const ComplexMatrix& H, double max_condition) {
    const auto K = H.rows();
    if (K > H.cols()) throw std::invalid_argument("zf_gram: need K <= N");
    ComplexMatrix G = H * H.adjoint();
    Eigen::LLT<ComplexMatrix> llt(G);
    if (llt.info() != Eigen::Success) throw SingularChannelError("zf_gram: Cholesky of H H^H failed");
    // cheap condition estimate from the Cholesky diagonal
    const Eigen::VectorXd d = llt.matrixLLT().diagonal().real().cwiseAbs2();
    if (d.minCoeff() <= 0.0 || d.maxCoeff() / d.minCoeff() > max_condition)
        throw SingularChannelError("zf_gram: H H^H is numerically singular");
    ComplexMatrix J = llt.solve(ComplexMatrix::Identity(K, K));
    return 0.5 * (J + J.adjoint());
}

GaussianRTransform::GaussianRTransform(double a) : alpha(a) {
    if (!(a > 0.0 && a < 2.0)) throw std::invalid_argument("GaussianRTransform: alpha must lie in (0,2)");
}

double GaussianRTransform::value_neg(double x) const {
    if (!(x >= 0.0)) throw std::invalid_argument("R-transform: argument outside the admissible domain");
    const double A = 1.0 - alpha;
    if (x == 0.0) {
        if (A <= 0.0) throw std::invalid_argument("R-transform: R(0) diverges for alpha >= 1");
        return 1.0 / A;
    }
    const double s = std::sqrt(A * A + 4.0 * alpha * x);
    return 2.0 / (A + s);
}

double GaussianRTransform::derivative_neg(double x) const {
    if (!(x >= 0.0)) throw std::invalid_argument("R-transform: argument outside the admissible domain");
    const double A = 1.0 - alpha;
    if (x == 0.0) {
        if (A <= 0.0) throw std::invalid_argument("R-transform: R'(0) diverges for alpha >= 1");
        return alpha / (A * A * A);
    }
    const double s = std::sqrt(A * A + 4.0 * alpha * x);
    const double r = 2.0 / (A + s);
    return alpha * r * r / s;
}

double GaussianRTransform::integral(double x) const {
    if (!(x >= 0.0)) throw std::invalid_argument("R-transform: argument outside the admissible domain");
    if (alpha > 1.0) throw std::invalid_argument("R-transform: integral from 0 diverges for alpha > 1");
    if (x == 0.0) return 0.0;
    const double A = 1.0 - alpha;
    const double s = std::sqrt(A * A + 4.0 * alpha * x);
    if (A == 0.0) return s / alpha;
    // s - A = 4 alpha x / (A + s) avoids cancellation at small x
    return (4.0 * alpha * x / (A + s) - A * std::log1p((s - A) / (2.0 * A))) / alpha;
}

double r_gaussian(double w, double alpha) { return GaussianRTransform(alpha).value_neg(-w); }
double r_gaussian_prime(double w, double alpha) { return GaussianRTransform(alpha).derivative_neg(-w); }
double r_gaussian_antiderivative(double x, double alpha) { return GaussianRTransform(alpha).integral(x); }

double lattice_lower_bound(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("lattice_lower_bound: alpha must lie in (0,1]");
    if (alpha == 1.0) return 16.0 / std::numbers::pi;
    return 16.0 / std::numbers::pi * std::pow(1.0 - alpha, 1.0 / alpha - 1.0);
}

}  // namespace vplab
