#ifndef SQUEEZE_DICKE_HPP
#define SQUEEZE_DICKE_HPP

#include <string>
#include <vector>

#include "squeeze/params.hpp"
#include "squeeze/stochastic.hpp"

namespace squeeze {

// First and second moments of the collective spin (units of hbar) and of the
// y-polarized mode quadratures. A coherent spin state along x has
// var_jz = var_jy = N/4 and vacuum quadratures var = 1/2.
struct SpinMoments {
    double mean_jz = 0.0, var_jz = 0.0;
    double mean_jy = 0.0, var_jy = 0.0;
    double mean_xph = 0.0, mean_pph = 0.0;
    double var_xph = 0.0, var_pph = 0.0;
};

// Initial coefficient weights: the exact binomial amplitudes of the coherent
// spin state, or their large-N Gaussian approximation. The Gaussian option
// makes the conditional Var(J_z) strictly record-independent; the binomial
// one leaves an O(1/N) readout dependence.
enum class InitialWeights { Exact, Gaussian };

// Exact conditional state of the J = N/2 Dicke ladder under continuous
// probing. The coefficient matrix factorizes as
//   log C_nm(t) = log C_nm(0) + sqrt(eta_d k_det) (n+m) i1
//                 - [kappa/2 (n-m)^2 + eta_d k_det/2 (n+m)^2] i2
// so the state is carried by the two accumulators i1 = int alpha dy_s and
// i2 = int alpha^2 dt plus the initial log-amplitudes. Everything is stored
// in the log domain; exponents reach |10^4| at N ~ 10^3 and would overflow
// plain doubles. Normalization subtracts the log of the diagonal sum.
class DickeState {
  public:
    int n_atoms() const { return n_atoms_; }
    std::size_t dim() const { return log_amp_.size(); }  // N + 1
    double spin_j() const { return 0.5 * n_atoms_; }
    double n_of(std::size_t k) const { return static_cast<double>(k) - spin_j(); }

    double t() const { return t_; }
    double alpha() const { return alpha_; }
    double ax() const { return ax_; }
    double i1() const { return i1_; }
    double i2() const { return i2_; }
    double kappa() const { return kappa_; }
    double eta_kdet() const { return eta_kdet_; }

    // log of the unnormalized coefficient C_{n_k, n_l}(t)
    double log_coeff_unnormalized(std::size_t k, std::size_t l) const;
    double log_norm() const;  // log sum_k C_kk
    double coeff(std::size_t k, std::size_t l) const;  // normalized
    std::vector<double> diag_weights() const;          // normalized C_nn, sums to 1

  private:
    friend DickeState init_css(int, InitialWeights, int);
    friend void advance(DickeState&, double, double, const PhysicalParams&);

    int n_atoms_ = 0;
    std::vector<double> log_amp_;  // log b_n with C_nm(0) = b_n b_m
    double t_ = 0.0, i1_ = 0.0, i2_ = 0.0;
    double alpha_ = 0.0, ax_ = 0.0;
    double kappa_ = 0.0, eta_kdet_ = 0.0;  // rates from the last advance()
    bool tracker_valid_ = false;
    CavityFieldTracker tracker_{};  // used only for tabulated flux profiles
};

// Coherent spin state along x. Throws std::invalid_argument when n_atoms
// exceeds dense_cap (use the Gaussian covariance module for large ensembles).
DickeState init_css(int n_atoms, InitialWeights weights = InitialWeights::Exact,
                    int dense_cap = 4096);

// One conditioning step: i1 += alpha(t) dy_s, i2 += int alpha^2 over the
// step, alpha and <a_x> advanced to t + dt. With a tabulated flux profile
// the same PhysicalParams object must be passed on every call and must
// outlive the state.
void advance(DickeState& state, double dt, double dy_s, const PhysicalParams& p);

// Draw the homodyne increment over dt from the physical signal law
//   dy_s = 2 sqrt(eta_d k_det) alpha(t) <n> dt + dW.
double sample_signal(const DickeState& state, double dt, NoiseStream& stream,
                     const PhysicalParams& p);

// Spin and field moments. J_z moments come from the diagonal; J_y moments
// need the first and second off-diagonals multiplied by the coherent-state
// overlap <alpha_m|alpha_n> = exp(-(n-m)^2 alpha^2 / 2) from tracing out the
// field (the x-mode overlap is 1 for a classical drive). The y-mode is the
// C_nn-weighted mixture of coherent states |n alpha>.
SpinMoments spin_moments(const DickeState& state);

// Probability density of the integrated signal Y_s = int_0^t dy_s for a
// measurement of duration t starting from state0 (steady-alpha regime):
// a mixture of Gaussians with means 2 sqrt(eta_d k_det) n alpha t, variance t.
double signal_pdf(const DickeState& state0, const PhysicalParams& p, double t, double y_s);

// Snapshot exports: CSV of the diagonal (n, C_nn), and a JSON document with
// the full normalized matrix (n_atoms <= 128 only; it is dense).
void write_diag_csv(const DickeState& state, std::ostream& os);
std::string to_json(const DickeState& state);

} // namespace squeeze

#endif
