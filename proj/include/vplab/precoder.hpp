#pragma once

#include "vplab/random_matrix.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace vplab {

enum class SchemeKind { LatticeQpsk, ConvexQpsk };

struct RelaxationScheme {
    SchemeKind kind = SchemeKind::LatticeQpsk;
    int L = 2;

    static RelaxationScheme lattice(int L);
    static RelaxationScheme convex();

    // First L terms of +1, -3, +5, -7, ... in that order.
    std::vector<double> c_natural_order() const;
    // Same values, ascending.
    std::vector<double> c_sorted() const;
};

class TooLargeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PrecoderResult {
    ComplexVector x;
    double energy_total = 0.0;
    double energy_per_symbol = 0.0;
    long long node_count = 0;
};

// Discrete distribution of the precoder output given one input symbol.
struct ConditionalDist {
    std::complex<double> u{1.0, 1.0};
    std::vector<std::complex<double>> points;
    std::vector<double> probabilities;
    // Mass not carried by the listed atoms (convex relaxation only).
    double continuous_mass = 0.0;
};

std::vector<std::complex<double>> enumerate_points(const RelaxationScheme& scheme,
                                                   std::complex<double> u);
// Interior Voronoi boundaries between consecutive sorted c values.
std::vector<double> voronoi_boundaries(const RelaxationScheme& scheme);

// Draws a uniform QPSK vector (entries +-1 +-j).
ComplexVector sample_qpsk(int K, std::uint64_t seed);

PrecoderResult min_energy_exhaustive(const ComplexMatrix& J, const ComplexVector& u,
                                     const RelaxationScheme& scheme,
                                     long long cap = (1LL << 24));
PrecoderResult min_energy_branch_bound(const ComplexMatrix& J, const ComplexVector& u,
                                       const RelaxationScheme& scheme);
PrecoderResult min_energy_convex(const ComplexMatrix& J, const ComplexVector& u,
                                 double tol = 1e-9);

// Max KKT violation of a convex-relaxation output, measured on the gradient
// of x^H J x in the sign-flipped real coordinates.
double convex_kkt_residual(const ComplexMatrix& J, const ComplexVector& u, const ComplexVector& x);

PrecoderResult min_energy(const ComplexMatrix& J, const ComplexVector& u,
                          const RelaxationScheme& scheme);

struct McConfig {
    int K = 8;
    double alpha = 0.5;
    int trials = 1000;
    RelaxationScheme scheme = RelaxationScheme::lattice(2);
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = library default
};

struct McResult {
    int K = 0;
    int N = 0;
    double mean = 0.0;       // mean energy per symbol, linear
    double std_error = 0.0;  // of the mean
    std::vector<double> per_trial;
    std::vector<int> trial_ids;  // index of each per_trial entry
    std::vector<int> failed_trials;
    int failures = 0;
    int resampled_channels = 0;
    long long total_nodes = 0;

    // Sign-normalized real-dimension statistics (u component mapped to +1).
    // lattice: counts per sorted c value, and joint (re, im) counts.
    std::vector<double> c_values;
    std::vector<long long> marginal_counts;
    std::vector<std::vector<long long>> joint_counts;
    // convex: how often a real dimension sits on its bound, how often both do,
    // and the interior values.
    long long boundary_dims = 0;
    long long boundary_both = 0;
    long long total_dims = 0;
    long long total_symbols = 0;
    std::vector<double> interior_values;
};

int mc_antennas(int K, double alpha);
McResult run_mc(const McConfig& cfg);
McResult mc_energy_penalty(int K, double alpha, int trials, const RelaxationScheme& scheme,
                           std::uint64_t seed);
// Empirical conditional law for u = 1+j built from the sign-normalized counts.
ConditionalDist mc_conditional_hist(const McResult& mc);

}  // namespace vplab
