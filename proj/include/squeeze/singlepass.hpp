#ifndef SQUEEZE_SINGLEPASS_HPP
#define SQUEEZE_SINGLEPASS_HPP

#include <vector>

#include "squeeze/params.hpp"
#include "squeeze/stochastic.hpp"

namespace squeeze {

// Free-space probing baseline: each beam segment of duration tau interacts
// once with the ensemble, so the effective drive amplitude is
// <a_x> = sqrt(Phi tau) for all t > 0. Cavity mirror fields are unused.
struct SinglePassParams {
    double n_atoms = 0.0;
    double photon_flux = 0.0;
    double beam_area = 0.0;
    double round_trip_time = 0.0;
    double detuning = 0.0;
    double wavelength = 0.0;
    double spont_rate = 0.0;
    double dipole_moment = 0.0;
    double detector_efficiency = 1.0;

    static SinglePassParams from(const PhysicalParams& p);
    // Phi tau >> 1 is required for the classical-field treatment.
    bool classical_field_ok() const { return photon_flux * round_trip_time > 100.0; }
};

struct SinglePassVariance {
    double variance = 0.5;     // Var(J_z/hbar)/(N/2), starts at 1/2
    double rate_ratio = 0.0;   // cavity coefficient / single-pass coefficient (= Q)
};

// Lossless closed form, Var_sp(t) = 1/2 (1 + N Phi g^4 tau^2/Delta^2 eta_d t)^{-1}.
SinglePassVariance singlepass_variance(const PhysicalParams& p, double t);

struct SinglePassRun {
    std::vector<double> t;
    std::vector<double> dp_at;   // sqrt(Var(p_at)), paper units (CSS -> 1/sqrt(2))
    double min_dp = 0.0;
    double t_min = 0.0;
    bool capped = false;         // grid truncated at 3/eta
};

// Lossy scalar ODE
//   dVar/dt = -2 N Phi g^4 tau^2/Delta^2 eta_d Var^2 e^{-eta t}
//             - eta/3 Var + 2/3 eta e^{eta t}
// with Var(0) = 1/2. The e^{+eta t} source grows, so integration is capped
// at t <= 3/eta (the Gaussian treatment is meaningless once <J_x> has
// decayed substantially); capped is set when the cap truncates the grid.
SinglePassRun singlepass_decay_integrate(const PhysicalParams& p, const TimeGrid& grid);

struct SinglePassMin {
    double value = 0.0;
    bool zero_loss = false;
};

// Quarter-power analytic minimum (eta Delta^2 / (3 N Phi g^4 tau^2 eta_d))^{1/4}
// with the 2/3 branching correction folded in; 0 with zero_loss for Gamma = 0.
SinglePassMin singlepass_min(const PhysicalParams& p);

} // namespace squeeze

#endif
