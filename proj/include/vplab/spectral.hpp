#pragma once

#include "vplab/numerics.hpp"
#include "vplab/precoder.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vplab {

enum class SeScheme { Dpc, ZfGaussian, ZfQpsk, Lattice, CrQpsk, Gthp };

std::string se_scheme_name(SeScheme s);
// Accepts dpc, zf-gauss, zf-qpsk, lattice, cr-qpsk, gthp.
SeScheme parse_se_scheme(const std::string& name);
// Largest admissible load for the scheme (2 for CR-QPSK, 1 otherwise).
double se_scheme_max_alpha(SeScheme s);

struct GthpConfig {
    std::optional<double> inflation;  // empty means optimize per (nu, snr)
    int truncation = 3;               // initial modulo image radius
    double noise_level = 0.5;         // per real dimension
    int nu_points = 16;

    void validate() const;
};

struct SpectralOptions {
    int L = 2;
    SolverConfig solver;
    GthpConfig gthp;
};

// Per-real-dimension equivalent channel y = x + n, n ~ N(0, 1/(2 rho)),
// with x drawn from cond given u = 1 (the other sign by symmetry).
struct EquivalentChannel {
    double rho = 0.0;
    std::vector<double> points;         // real output values
    std::vector<double> probabilities;  // their masses
    SeScheme scheme = SeScheme::Lattice;
};

struct SePoint {
    SeScheme scheme = SeScheme::Lattice;
    double ebno_db = 0.0;
    double snr_db = 0.0;
    double alpha = 0.0;
    double C = 0.0;
    double energy_db = 0.0;  // scheme energy penalty where defined, else NaN
    double rho = 0.0;
    bool multivalued = false;
};

double se_dpc(double snr, double alpha);
double se_zf_gaussian(double snr, double alpha);
double se_zf_bpsk(double snr, double alpha);
double se_zf_qpsk(double snr, double alpha);

// Mutual information in bits per real dimension of the symmetric mixture
// channel with components c_k (masses P_k) given u = 1.
double bpsk_mixture_mi(double rho, const std::vector<double>& c, const std::vector<double>& P);

EquivalentChannel equivalent_channel_lattice(double snr, double alpha, int L, const SolverConfig& cfg = {});
double se_from_channel(const EquivalentChannel& ch, double alpha);
double se_lattice_qpsk(double snr, double alpha, int L, const SolverConfig& cfg = {});

// Output density per real dimension of the CR-QPSK equivalent channel given u = 1.
double crqpsk_output_density(double y, double rho, double alpha, double energy);
// MI of the CR-QPSK equivalent channel per real dimension at given rho.
double crqpsk_channel_mi(double rho, double alpha, double energy);
double se_crqpsk(double snr, double alpha, const SolverConfig& cfg = {});

// Direct Monte-Carlo estimate of the spectral efficiency of an equivalent
// channel: samples u, then x | u, then y | x, and averages log f(y|u)/f(y).
double mc_channel_se(const EquivalentChannel& ch, double alpha, std::int64_t samples, std::uint64_t seed);

// Effective-noise and output densities of the inflated modulo channel.
struct GthpDensities {
    double delta = 0.0;
    double inflation = 1.0;
    double sigma = 0.0;  // std of the scaled Gaussian noise
    int images = 3;

    double pre_modulo(double z) const;  // f of the self noise plus scaled AWGN
    double noise(double z) const;       // wrapped onto [-delta, delta)
    double output(double z) const;      // binary input, wrapped
};

GthpDensities gthp_densities(double Px, double inflation, const GthpConfig& cfg = {});
double gthp_rate_binary(double Px, double inflation, const GthpConfig& cfg = {});
double gthp_rate_continuous(double Px, double inflation, const GthpConfig& cfg = {});
// Golden-section search over the inflation factor; returns {inflation, rate}.
std::pair<double, double> gthp_optimize_inflation(double Px, bool binary, const GthpConfig& cfg = {});
double se_gthp_qpsk(double snr, double alpha, const GthpConfig& cfg = {});

// Spectral efficiency of any scheme at (snr, alpha).
double se_at_snr(SeScheme scheme, double snr, double alpha, const SpectralOptions& opt = {});
// Energy penalty in dB used to form rho, NaN for dpc / zf-gauss / gthp.
double se_energy_db(SeScheme scheme, double alpha, const SpectralOptions& opt = {});

// Solves C = C_scheme(C ebno / alpha) and returns the largest solution.
SePoint se_at_ebno(SeScheme scheme, double ebno_db, double alpha, const SpectralOptions& opt = {});

struct LoadOptimum {
    double alpha_star = 0.0;
    double C_star = 0.0;
    SePoint point;
};

// Grid argmax followed by golden-section refinement; ties go to the smaller alpha.
LoadOptimum optimize_load(SeScheme scheme, double ebno_db, const std::vector<double>& alpha_grid,
                          const SpectralOptions& opt = {});
std::vector<double> default_alpha_grid(SeScheme scheme, int points = 64);

// Eb/N0 in dB at which the scheme reaches rate C at load alpha; +inf when
// C is above the scheme's cap.
double ebno_for_rate(SeScheme scheme, double C, double alpha, const SpectralOptions& opt = {});
// Minimum over alpha, i.e. where the load-optimized curve reaches C.
LoadOptimum min_ebno_for_rate(SeScheme scheme, double C, const std::vector<double>& alpha_grid,
                              const SpectralOptions& opt = {});

// Eb/N0 values in dB where the load-optimized curves of a and b cross,
// located by a scan with the given step and bisection to 1e-3 dB.
std::vector<double> se_crossovers(SeScheme a, SeScheme b, double lo_db, double hi_db, double step_db,
                                  const SpectralOptions& opt = {}, int grid_points = 64);

}  // namespace vplab
