#include "squeeze/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace squeeze {

double TabulatedFlux::at(double t) const {
    if (times.empty()) return 0.0;
    if (t < times.front()) return 0.0;
    if (t >= times.back()) return flux.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
    double w = (t - times[i]) / (times[i + 1] - times[i]);
    return flux[i] + w * (flux[i + 1] - flux[i]);
}

void TabulatedFlux::validate() const {
    if (times.size() < 2 || times.size() != flux.size())
        throw std::invalid_argument("tabulated flux needs >= 2 samples with matching sizes");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("tabulated flux times must be strictly increasing");
    for (double f : flux)
        if (!(f >= 0.0) || !std::isfinite(f))
            throw std::invalid_argument("tabulated flux values must be finite and >= 0");
}

void PhysicalParams::validate() const {
    if (!(n_atoms >= 1.0)) throw std::invalid_argument("n_atoms must be >= 1");
    if (!(photon_flux >= 0.0)) throw std::invalid_argument("photon_flux must be >= 0");
    if (!(beam_area > 0.0)) throw std::invalid_argument("beam_area must be > 0");
    if (!(round_trip_time > 0.0)) throw std::invalid_argument("round_trip_time must be > 0");
    if (detuning == 0.0 || !std::isfinite(detuning))
        throw std::invalid_argument("detuning must be nonzero and finite");
    if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be > 0");
    if (!(spont_rate >= 0.0)) throw std::invalid_argument("spont_rate must be >= 0");
    if (!(dipole_moment >= 0.0)) throw std::invalid_argument("dipole_moment must be >= 0");
    if (!(kappa1 >= 0.0) || !(kappa2 >= 0.0) || !(kappa_loss >= 0.0))
        throw std::invalid_argument("cavity decay rates must be >= 0");
    if (!(kappa() > 0.0))
        throw std::invalid_argument("total cavity decay rate must be > 0");
    if (!(detector_efficiency >= 0.0 && detector_efficiency <= 1.0))
        throw std::invalid_argument("detector_efficiency must be in [0,1]");
    if (!(mode_volume_factor > 0.0))
        throw std::invalid_argument("mode_volume_factor must be > 0");
    if (flux_profile) flux_profile->validate();
}

double PhysicalParams::kappa() const {
    // Reflection port assumes a perfectly reflecting right mirror, so kappa2
    // does not contribute to the total decay.
    if (port == DetectionPort::Reflection) return kappa1 + kappa_loss;
    return kappa1 + kappa2 + kappa_loss;
}

double PhysicalParams::kappa_det() const {
    return port == DetectionPort::Reflection ? kappa1 : kappa2;
}

double PhysicalParams::flux_at(double t) const {
    if (flux_profile) return flux_profile->at(t);
    return t < 0.0 ? 0.0 : photon_flux;
}

DerivedCouplings derive_couplings(const PhysicalParams& p) {
    p.validate();
    DerivedCouplings dc;
    dc.omega = 2.0 * M_PI * kSpeedOfLight / p.wavelength;
    dc.mode_volume = p.mode_volume_factor * p.beam_area * kSpeedOfLight * p.round_trip_time;
    double e0 = std::sqrt(kHbar * dc.omega / (dc.mode_volume * kVacuumPermittivity));
    dc.g = p.dipole_moment * e0 / kHbar;
    dc.kappa = p.kappa();
    dc.kappa_det = p.kappa_det();
    double g2 = dc.g * dc.g;
    double lor = g2 / (p.detuning * p.detuning + p.spont_rate * p.spont_rate / 4.0);
    dc.epsilon = p.n_atoms * (p.spont_rate / 2.0) * lor;
    dc.ax_steady = 2.0 * std::sqrt(p.kappa1 * p.photon_flux) / dc.kappa;
    dc.alpha_steady = 2.0 * g2 * dc.ax_steady / (dc.kappa * p.detuning);
    dc.g_tilde_steady = 2.0 * g2 / p.detuning * std::sqrt(p.n_atoms / 2.0) * dc.ax_steady / std::sqrt(2.0);
    dc.eta_steady = dc.ax_steady * dc.ax_steady * (p.spont_rate / 2.0) * lor;
    dc.q_factor = 16.0 * p.kappa1 * dc.kappa_det /
                  (std::pow(dc.kappa, 4) * p.round_trip_time * p.round_trip_time);
    return dc;
}

double q_factor(const PhysicalParams& p) {
    return derive_couplings(p).q_factor;
}

namespace {

// Effective probing time for the step drive: int_0^t (alpha/alpha_inf)^2 dt'
// = t - 11/(2k) + (2kt+8)/k e^{-kt/2} - (k^2 t^2 + 6kt + 10)/(4k) e^{-kt}.
double effective_time(double t, double k) {
    double x = k * t;
    return t - 11.0 / (2.0 * k) + (2.0 * x + 8.0) / k * std::exp(-x / 2.0) -
           (x * x + 6.0 * x + 10.0) / (4.0 * k) * std::exp(-x);
}

double require_nonnegative_time(double t, const char* who) {
    if (t < 0.0) throw std::domain_error(std::string(who) + ": t must be >= 0");
    return t;
}

} // namespace

double cavity_amp_x(double t, const PhysicalParams& p, bool lossy) {
    require_nonnegative_time(t, "cavity_amp_x");
    DerivedCouplings dc = derive_couplings(p);
    double k = dc.kappa + (lossy ? dc.epsilon : 0.0);
    if (p.step_profile()) {
        double a_inf = 2.0 * std::sqrt(p.kappa1 * p.photon_flux) / k;
        return a_inf * (1.0 - std::exp(-k * t / 2.0));
    }
    CavityFieldTracker tr(p, lossy);
    tr.step(t);
    return tr.ax();
}

double alpha_of_t(double t, const PhysicalParams& p) {
    require_nonnegative_time(t, "alpha_of_t");
    DerivedCouplings dc = derive_couplings(p);
    double k = dc.kappa;
    if (p.step_profile()) {
        double a_inf = 2.0 * std::sqrt(p.kappa1 * p.photon_flux) / k;
        double al_inf = 2.0 * dc.g * dc.g * a_inf / (k * p.detuning);
        double x = k * t / 2.0;
        return al_inf * (1.0 - std::exp(-x) - x * std::exp(-x));
    }
    CavityFieldTracker tr(p);
    tr.step(t);
    return tr.alpha();
}

double alpha_sq_integral(double t, const PhysicalParams& p) {
    require_nonnegative_time(t, "alpha_sq_integral");
    DerivedCouplings dc = derive_couplings(p);
    if (p.step_profile()) {
        double al_inf = dc.alpha_steady;
        return al_inf * al_inf * effective_time(t, dc.kappa);
    }
    CavityFieldTracker tr(p);
    tr.step(t);
    return tr.alpha_sq_int();
}

CavityFieldTracker::CavityFieldTracker(const PhysicalParams& p, bool lossy)
    : p_(&p), lossy_(lossy) {
    DerivedCouplings dc = derive_couplings(p);
    kappa_ = dc.kappa;
    kappa_eff_ = dc.kappa + (lossy ? dc.epsilon : 0.0);
    coupling_ = dc.g * dc.g / p.detuning;
}

void CavityFieldTracker::step(double dt) {
    if (p_ == nullptr) throw std::logic_error("CavityFieldTracker: not bound to parameters");
    if (dt < 0.0) throw std::domain_error("CavityFieldTracker::step: dt must be >= 0");
    if (dt == 0.0) return;
    if (p_->step_profile()) {
        // Closed forms; evaluate at the new time and update the integral by
        // the difference of effective times.
        double t1 = t_ + dt;
        double a_inf = 2.0 * std::sqrt(p_->kappa1 * p_->photon_flux) / kappa_eff_;
        double al_inf = 2.0 * coupling_ * a_inf / kappa_;
        ax_ = a_inf * (1.0 - std::exp(-kappa_eff_ * t1 / 2.0));
        if (kappa_eff_ == kappa_) {
            double x = kappa_ * t1 / 2.0;
            alpha_ = al_inf * (1.0 - std::exp(-x) - x * std::exp(-x));
            i2_ += al_inf * al_inf * (effective_time(t1, kappa_) - effective_time(t_, kappa_));
        } else {
            // alpha filtered at kappa while <a_x> decays at kappa+epsilon:
            // integrate the small remaining ODE numerically.
            int n = std::max(8, static_cast<int>(std::ceil(dt * kappa_eff_ / 0.05)));
            double h = dt / n;
            double t = t_;
            for (int i = 0; i < n; ++i) {
                auto axf = [&](double s) {
                    return a_inf * (1.0 - std::exp(-kappa_eff_ * s / 2.0));
                };
                auto rhs = [&](double s, double a) { return -kappa_ / 2.0 * a + coupling_ * axf(s); };
                double a0 = alpha_;
                double k1 = rhs(t, a0);
                double k2 = rhs(t + h / 2.0, a0 + h / 2.0 * k1);
                double k3 = rhs(t + h / 2.0, a0 + h / 2.0 * k2);
                double k4 = rhs(t + h, a0 + h * k3);
                double a1 = a0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                double am = a0 + h / 8.0 * (k1 + k2 + k3 + k4);  // midpoint estimate
                i2_ += h / 6.0 * (a0 * a0 + 4.0 * am * am + a1 * a1);
                alpha_ = a1;
                t += h;
            }
        }
        t_ = t1;
        return;
    }
    // Tabulated profile: RK4 on (ax, alpha), Simpson on alpha^2. The substep
    // resolves the cavity response and the profile sampling; tying it to tau
    // would be prohibitive in the high-finesse regime tau << 1/kappa.
    double h_max = 0.02 / kappa_eff_;
    const auto& prof = *p_->flux_profile;
    for (std::size_t i = 1; i < prof.times.size(); ++i)
        h_max = std::min(h_max, prof.times[i] - prof.times[i - 1]);
    int n = std::max(1, static_cast<int>(std::ceil(dt / h_max)));
    double h = dt / n;
    for (int i = 0; i < n; ++i) {
        auto rhs = [&](double s, double a, double al, double& da, double& dal) {
            da = -kappa_eff_ / 2.0 * a + std::sqrt(p_->kappa1 * p_->flux_at(s));
            dal = -kappa_ / 2.0 * al + coupling_ * a;
        };
        double a0 = ax_, al0 = alpha_;
        double da1, dal1, da2, dal2, da3, dal3, da4, dal4;
        rhs(t_, a0, al0, da1, dal1);
        rhs(t_ + h / 2.0, a0 + h / 2.0 * da1, al0 + h / 2.0 * dal1, da2, dal2);
        rhs(t_ + h / 2.0, a0 + h / 2.0 * da2, al0 + h / 2.0 * dal2, da3, dal3);
        rhs(t_ + h, a0 + h * da3, al0 + h * dal3, da4, dal4);
        double a1 = a0 + h / 6.0 * (da1 + 2.0 * da2 + 2.0 * da3 + da4);
        double al1 = al0 + h / 6.0 * (dal1 + 2.0 * dal2 + 2.0 * dal3 + dal4);
        double alm = al0 + h / 8.0 * (dal1 + dal2 + dal3 + dal4);
        i2_ += h / 6.0 * (al0 * al0 + 4.0 * alm * alm + al1 * al1);
        ax_ = a1;
        alpha_ = al1;
        t_ += h;
    }
}

} // namespace squeeze
