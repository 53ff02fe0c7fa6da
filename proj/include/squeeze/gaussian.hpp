#ifndef SQUEEZE_GAUSSIAN_HPP
#define SQUEEZE_GAUSSIAN_HPP

#include <Eigen/Dense>
#include <vector>

#include "squeeze/dicke.hpp"
#include "squeeze/params.hpp"
#include "squeeze/stochastic.hpp"

namespace squeeze {

// Drive amplitude model for the Riccati coefficients: the full transient
// <a_x(t)> or the frozen steady value (used by the M K^-1 cross-check).
enum class DriveModel { Transient, Steady };

// Gaussian state of (x_at, p_at, x_ph, p_ph). Normalization: V = 2 Cov, so
// the coherent-spin/vacuum initial state has V = I and Delta p_at =
// sqrt(V22/2). jx tracks <J_x(t)>/hbar, which decays under spontaneous
// emission and rescales the atomic quadratures.
struct CovarianceState {
    Eigen::Vector4d mean = Eigen::Vector4d::Zero();
    Eigen::Matrix4d v = Eigen::Matrix4d::Identity();
    double jx = 0.0;
    double t = 0.0;

    double dp_at() const { return std::sqrt(v(1, 1) / 2.0); }
    double dx_at() const { return std::sqrt(v(0, 0) / 2.0); }
};

CovarianceState initial_covariance_state(const PhysicalParams& p);

// dV/dt = G - D V - V E - V F V with E = D^T.
struct RiccatiMatrices {
    Eigen::Matrix4d g_mat, d_mat, e_mat, f_mat;
};

RiccatiMatrices riccati_matrices(const PhysicalParams& p, double t, bool lossy, double jx,
                                 DriveModel drive = DriveModel::Transient);

// One RK4 step of the deterministic Riccati flow; jx advances alongside with
// d jx/dt = -eta(t) jx. Symmetry is re-imposed each step; in the lossy case
// V12, V13, V24, V34 are projected to zero (they stay zero without
// spontaneous emission and couple only through O(eta) terms).
// Throws NumericalError if V loses positive definiteness.
void step_covariance(CovarianceState& state, const PhysicalParams& p, double dt, bool lossy,
                     DriveModel drive = DriveModel::Transient);

// Euler-Maruyama update of the means conditioned on one Wiener increment:
// d<y> = A <y> dt + sqrt(eta_d k_det / 2) (V - I) e3 dW_s.
void step_mean(CovarianceState& state, double dW, const PhysicalParams& p, double dt,
               bool lossy = false, DriveModel drive = DriveModel::Transient);

// Homodyne increment implied by the current means: dy_s = dW + sqrt(2 eta_d
// k_det) <x_ph> dt.
double signal_increment(const CovarianceState& state, const PhysicalParams& p, double dW,
                        double dt);

// Linearization V = M K^{-1}: integrates Mdot = -D M + G K, Kdot = F M + E K
// with steady g~ (lossless) and returns M K^{-1}. The factor pair carries
// modes growing like e^{+kappa t/2} and decaying like e^{-kappa t/2}, so K's
// columns align and the inversion degrades beyond kappa t ~ 40; a singular K
// raises NumericalError.
Eigen::Matrix4d solve_mk(const PhysicalParams& p, double t, std::size_t n_steps = 8192);

// Lossless closed forms with the cavity-buildup time correction; means are
// the record-free ensemble values (zero).
SpinMoments closed_form_variances(const PhysicalParams& p, double t);

// Analytic minimum uncertainties: the single-pass quarter-power formula and
// the cavity prediction obtained from it via ((kappa+eps)^2 tau /
// (4 k_det))^{1/4}. zero_loss flags Gamma = 0, where both minima are 0.
struct MinUncertainty {
    double cavity_min = 0.0;
    double singlepass_min = 0.0;
    bool zero_loss = false;
};

MinUncertainty predicted_min_uncertainty(const PhysicalParams& p);

// Deterministic covariance propagation over consecutive grid segments,
// tracking the Delta p_at minimum (parabolic refinement around the discrete
// minimum). Series points are emitted every output_stride steps.
struct CovariancePoint {
    double t = 0.0;
    double v11 = 0.0, v22 = 0.0, v33 = 0.0, v44 = 0.0;
    double jx = 0.0, g_tilde = 0.0, eta = 0.0;
};

struct CovarianceRun {
    std::vector<CovariancePoint> series;
    double min_dp = 0.0;
    double t_min = 0.0;
    CovarianceState final_state;
};

CovarianceRun propagate_covariance(const PhysicalParams& p, const std::vector<TimeGrid>& segments,
                                   bool lossy, DriveModel drive = DriveModel::Transient,
                                   std::size_t output_stride = 1);

// Default two-timescale grid for cavity runs: the transient below 40/kappa
// resolved with dt = 0.02/kappa, the slow squeezing stage with dt ~
// 0.2/kappa.
std::vector<TimeGrid> default_cavity_grid(const PhysicalParams& p, double t_end);

} // namespace squeeze

#endif
