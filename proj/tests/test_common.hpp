#ifndef SQUEEZE_TEST_COMMON_HPP
#define SQUEEZE_TEST_COMMON_HPP

#include <cmath>

#include "squeeze/params.hpp"

namespace squeeze::testing {

// Caesium-cell reference configuration (reflection port): N = 10^12,
// Phi = 10^14/s, A = 2 cm^2, tau = 0.3 ns, Delta = 2pi 10 GHz, 852 nm,
// Gamma = 3.1e7/s, d = 2.61e-29 Cm, kappa = kappa1 = 2pi 3 MHz, eta_d = 1.
inline PhysicalParams reference_params() {
    PhysicalParams p;
    p.n_atoms = 1e12;
    p.photon_flux = 1e14;
    p.beam_area = 2e-4;
    p.round_trip_time = 3e-10;
    p.detuning = 2.0 * M_PI * 1e10;
    p.wavelength = 852e-9;
    p.spont_rate = 3.1e7;
    p.dipole_moment = 2.61e-29;
    p.kappa1 = 2.0 * M_PI * 3e6;
    p.kappa2 = 0.0;
    p.kappa_loss = 0.0;
    p.detector_efficiency = 1.0;
    p.port = DetectionPort::Reflection;
    return p;
}

// Dimensionless-ish small-system parameters for Dicke/oracle tests:
// kappa = kappa1 = 1/s (reflection, so kappa_det = kappa), Phi = 1/s,
// Gamma = 0, and the dipole moment back-solved so that g^2/Delta hits the
// requested coupling. Steady state then has <a_x> = 2 and
// alpha = 4 * coupling.
inline PhysicalParams small_system_params(double coupling, int n_atoms,
                                          double detector_efficiency = 1.0) {
    PhysicalParams p;
    p.n_atoms = n_atoms;
    p.photon_flux = 1.0;
    p.beam_area = 1e-4;
    p.round_trip_time = 1e-9;
    p.detuning = 1e6;
    p.wavelength = 1e-6;
    p.spont_rate = 0.0;
    p.dipole_moment = 0.0;  // set below
    p.kappa1 = 1.0;
    p.kappa2 = 0.0;
    p.kappa_loss = 0.0;
    p.detector_efficiency = detector_efficiency;
    p.port = DetectionPort::Reflection;

    // g = d E0 / hbar with E0 = sqrt(hbar omega / (V eps0)); want g^2 = coupling * Delta
    double omega = 2.0 * M_PI * kSpeedOfLight / p.wavelength;
    double vol = p.beam_area * kSpeedOfLight * p.round_trip_time;
    double e0 = std::sqrt(kHbar * omega / (vol * kVacuumPermittivity));
    double g = std::sqrt(coupling * p.detuning);
    p.dipole_moment = g * kHbar / e0;
    return p;
}

} // namespace squeeze::testing

#endif
