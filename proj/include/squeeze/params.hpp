#ifndef SQUEEZE_PARAMS_HPP
#define SQUEEZE_PARAMS_HPP

#include <optional>
#include <string>
#include <vector>

namespace squeeze {

// Physical constants (SI, CODATA 2018)
inline constexpr double kSpeedOfLight = 2.99792458e8;        // m/s
inline constexpr double kHbar = 1.054571817e-34;             // J s
inline constexpr double kVacuumPermittivity = 8.8541878128e-12; // F/m

enum class DetectionPort { Transmission, Reflection };

// Optional tabulated photon-flux profile Phi(t) [photons/s], piecewise
// linear between samples, 0 for t < times.front(), clamped to the last
// value beyond times.back(). The default everywhere else is the step
// profile: 0 for t < 0 and the constant PhysicalParams::photon_flux after.
struct TabulatedFlux {
    std::vector<double> times;  // strictly increasing, seconds
    std::vector<double> flux;   // photons/s, >= 0

    double at(double t) const;
    void validate() const;
};

// Full experimental configuration of the cavity probing setup.
struct PhysicalParams {
    double n_atoms = 0.0;          // N_at
    double photon_flux = 0.0;      // Phi for t >= 0, photons/s
    double beam_area = 0.0;        // A, m^2
    double round_trip_time = 0.0;  // tau, s
    double detuning = 0.0;         // Delta, rad/s
    double wavelength = 0.0;       // lambda, m
    double spont_rate = 0.0;       // Gamma, 1/s
    double dipole_moment = 0.0;    // d, C m
    double kappa1 = 0.0;           // input mirror decay rate, 1/s
    double kappa2 = 0.0;           // output mirror decay rate, 1/s
    double kappa_loss = 0.0;       // intracavity loss rate, 1/s
    double detector_efficiency = 1.0;  // eta_d in [0,1]
    DetectionPort port = DetectionPort::Transmission;

    // Mode volume V = mode_volume_factor * A * c * tau. The factor 1
    // (ring-cavity convention) reproduces the quoted reference numbers;
    // exposed so other conventions can be dialed in from a config.
    double mode_volume_factor = 1.0;

    std::optional<TabulatedFlux> flux_profile;

    // Throws std::invalid_argument on out-of-range fields.
    void validate() const;

    // Total cavity decay rate. For the reflection port the right mirror is
    // perfectly reflecting and kappa2 drops out of the total.
    double kappa() const;
    // Decay rate of the monitored port (kappa2 transmission, kappa1 reflection).
    double kappa_det() const;

    double flux_at(double t) const;
    bool step_profile() const { return !flux_profile.has_value(); }
};

// Every derived rate and dimensionless figure used by the solvers.
struct DerivedCouplings {
    double omega = 0.0;           // 2 pi c / lambda, rad/s
    double mode_volume = 0.0;     // m^3
    double g = 0.0;               // single-photon coupling, 1/s
    double kappa = 0.0;           // total cavity decay, 1/s
    double kappa_det = 0.0;       // detected-port decay, 1/s
    double epsilon = 0.0;         // photon absorption rate, 1/s
    double ax_steady = 0.0;       // steady <a_x>, dimensionless
    double alpha_steady = 0.0;    // steady alpha, dimensionless
    double g_tilde_steady = 0.0;  // effective coupling, 1/s
    double eta_steady = 0.0;      // atomic decay rate at steady drive, 1/s
    double q_factor = 0.0;        // cavity enhancement, dimensionless
};

DerivedCouplings derive_couplings(const PhysicalParams& p);

// Cavity enhancement of the squeezing rate, 16 kappa1 kappa_det / (kappa^4 tau^2).
double q_factor(const PhysicalParams& p);

// Classical x-polarized amplitude <a_x(t)> for the configured flux profile.
// With lossy = true, spontaneous emission gives kappa -> kappa + epsilon.
double cavity_amp_x(double t, const PhysicalParams& p, bool lossy = false);

// alpha(t): per-eigenstate displacement rate of the y mode divided by n.
double alpha_of_t(double t, const PhysicalParams& p);

// Integral of alpha(t')^2 from 0 to t.
double alpha_sq_integral(double t, const PhysicalParams& p);

// Incremental tracker for (<a_x>, alpha, int alpha^2) used by the
// propagators; avoids re-integrating tabulated profiles from t = 0.
class CavityFieldTracker {
  public:
    CavityFieldTracker() = default;  // unusable until assigned from a real one
    explicit CavityFieldTracker(const PhysicalParams& p, bool lossy = false);

    void step(double dt);  // advance by dt (substeps <= tau for tabulated flux)

    double t() const { return t_; }
    double ax() const { return ax_; }
    double alpha() const { return alpha_; }
    double alpha_sq_int() const { return i2_; }

  private:
    const PhysicalParams* p_ = nullptr;
    bool lossy_ = false;
    double kappa_eff_ = 0.0;  // kappa (+ epsilon when lossy)
    double kappa_ = 0.0;      // y-mode filter rate (always the bare kappa)
    double coupling_ = 0.0;   // g^2/Delta
    double t_ = 0.0, ax_ = 0.0, alpha_ = 0.0, i2_ = 0.0;
};

} // namespace squeeze

#endif
