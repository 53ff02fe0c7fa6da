#ifndef SQUEEZE_BRUTE_FORCE_HPP
#define SQUEEZE_BRUTE_FORCE_HPP

#include <Eigen/Dense>

#include "squeeze/dicke.hpp"
#include "squeeze/params.hpp"
#include "squeeze/stochastic.hpp"

namespace squeeze {

struct BruteForceResult {
    SpinMoments moments;
    double purity = 0.0;               // Tr(rho^2) of the conditional state
    double top_fock_population = 0.0;  // max over the run
    Eigen::MatrixXcd rho;              // final joint density matrix, basis |n> (x) |fock>
};

// Direct integration of the linearized stochastic master equation on the
// joint Hilbert space |J=N/2, n> (x) Fock(y mode), conditioned on a stored
// signal record. Used as the independent oracle for the closed-form Dicke
// evolution: it knows nothing about the coefficient factorization, only the
// Hamiltonian with the classical drive amplitude (integrated alongside by
// Euler), cavity damping, and the homodyne conditioning term.
//
// Stepping: Hamiltonian + damping by explicit Euler, the measurement term by
// its exact per-step propagator exp(dy T - dt/2 T^2) with
// T(rho) = sqrt(eta_d k_det)(a rho + rho a^dag). A plain Euler treatment of
// the measurement term converges only like sqrt(dt) pathwise (the realized
// quadratic variation of the record enters), which would defeat step-size
// extrapolation; the exact propagator leaves smooth O(dt) splitting errors.
//
// Throws NumericalError when the top Fock level population exceeds 1e-8
// (raise fock_cutoff), std::invalid_argument for n_atoms > 4 or a joint
// dimension beyond ~2000.
BruteForceResult brute_force_evolve(int n_atoms, int fock_cutoff, const PhysicalParams& p,
                                    const MeasurementRecord& record);

} // namespace squeeze

#endif
