#pragma once

#include "vplab/numerics.hpp"
#include "vplab/precoder.hpp"
#include "vplab/random_matrix.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace vplab {

struct RsSolution {
    double alpha = 0.0;
    double q0 = 0.0;
    double chi0 = 0.0;
    double energy = 0.0;  // linear
    std::vector<double> residuals;

    double energy_db() const { return to_db(energy); }
};

struct OneRsbSolution {
    double alpha = 0.0;
    int L = 0;
    double q1 = 0.0, p1 = 0.0, chi1 = 0.0, mu1 = 0.0;
    double eps1 = 0.0, g1 = 0.0, f1 = 0.0;
    double energy = 0.0;  // linear
    std::vector<double> residuals;
    // "full", "near-unit", "unit-load", or "rs-reduced" when no separate
    // 1RSB root exists and the ansatz collapses onto the RS solution.
    std::string method;

    double energy_db() const { return to_db(energy); }
};

struct EntropyValue {
    double chi = 0.0;
    double entropy = 0.0;
};

// RS fixed point for the lattice or convex QPSK relaxation.
RsSolution solve_rs(const RelaxationScheme& scheme, double alpha, const SolverConfig& cfg = {});

// Scalar fixed point of the convex (CR-QPSK) relaxation, linear energy.
double solve_crqpsk_energy(double alpha, const SolverConfig& cfg = {});

// Full four-equation lattice solver. Tries the warm start and the default
// starts, then falls back to continuation in alpha. Throws ConvergenceError.
OneRsbSolution solve_1rsb_lattice_full(double alpha, int L, const SolverConfig& cfg = {},
                                       const OneRsbSolution* warm = nullptr);

// Dispatching solver: full system below 0.98, the small-chi reductions above.
OneRsbSolution solve_1rsb_lattice(double alpha, int L, const SolverConfig& cfg = {},
                                  const OneRsbSolution* warm = nullptr);

OneRsbSolution solve_1rsb_unit_load(int L, const SolverConfig& cfg = {});
OneRsbSolution solve_1rsb_near_unit(double alpha, int L, const SolverConfig& cfg = {},
                                    const OneRsbSolution* warm = nullptr);

// Ascending-alpha sweep with warm starts.
std::vector<std::optional<OneRsbSolution>> sweep_1rsb_lattice(const std::vector<double>& alphas, int L,
                                                              const SolverConfig& cfg = {});

// Residuals of the four lattice equations at a given parameter set, in
// relative form. Used for certification and tests.
std::vector<double> residuals_1rsb_lattice(double alpha, int L, double q, double p, double chi, double mu,
                                           const SolverConfig& cfg = {});
double energy_1rsb(double alpha, double q, double p, double chi, double mu);

// S = chi R(-chi) - int_0^chi R(-w) dw for a generic R given as x -> R(-x).
EntropyValue entropy_zero_temp(double chi, const std::function<double(double)>& r_neg);
// Closed form for Gaussian H.
EntropyValue entropy_gaussian(double chi, double alpha);

// Per-real-dimension law of the output given the input component +1,
// ordered as RelaxationScheme::c_sorted().
std::vector<double> marginal_1rsb_lattice(const OneRsbSolution& sol, const SolverConfig& cfg = {});
std::vector<double> marginal_rs_lattice(const RsSolution& sol, int L);

// Two-dimensional law for u, the product of the two real marginals.
ConditionalDist cond_dist_1rsb_lattice(const OneRsbSolution& sol, std::complex<double> u = {1.0, 1.0},
                                       const SolverConfig& cfg = {});
ConditionalDist cond_dist_rs(const RelaxationScheme& scheme, const RsSolution& sol,
                             std::complex<double> u = {1.0, 1.0});

// Output law of the convex relaxation for u = 1+j. Per real dimension there
// is an atom Q1 at 1 and the density exp(-x^2/(alpha E))/sqrt(pi alpha E) on x > 1.
struct CrQpskComponents {
    double alpha = 0.0;
    double energy = 0.0;
    double Q1 = 0.0;

    double density(double x) const;  // continuous part, x > 1
    double cdf(double x) const;      // per real dimension, including the atom
    // Masses of the four terms: atom at 1+j, the two half-lines, the interior.
    double mass_atom() const { return Q1 * Q1; }
    double mass_half_lines() const { return 2.0 * Q1 * (1.0 - Q1); }
    double mass_interior() const { return (1.0 - Q1) * (1.0 - Q1); }
};

CrQpskComponents crqpsk_pdf_components(double alpha, const SolverConfig& cfg = {});

}  // namespace vplab
