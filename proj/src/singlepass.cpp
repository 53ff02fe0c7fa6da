#include "squeeze/singlepass.hpp"

#include <cmath>
#include <stdexcept>

#include "squeeze/errors.hpp"

namespace squeeze {

namespace {

struct SpRates {
    double eta_sp;    // decay rate with <a_x>^2 = Phi tau
    double rate_sp;   // N Phi g^4 tau^2/Delta^2 eta_d (coefficient of t in Eq.-21 form)
    double rate_cav;  // N eta_d kappa_det alpha_steady^2
};

SpRates make_sp_rates(const PhysicalParams& p) {
    DerivedCouplings dc = derive_couplings(p);
    double g2 = dc.g * dc.g;
    double den = p.detuning * p.detuning + p.spont_rate * p.spont_rate / 4.0;
    SpRates r;
    r.eta_sp = p.photon_flux * p.round_trip_time * (p.spont_rate / 2.0) * g2 / den;
    r.rate_sp = p.n_atoms * p.photon_flux * g2 * g2 * p.round_trip_time * p.round_trip_time /
                (p.detuning * p.detuning) * p.detector_efficiency;
    double ekd = p.detector_efficiency * dc.kappa_det;
    r.rate_cav = p.n_atoms * ekd * dc.alpha_steady * dc.alpha_steady;
    return r;
}

} // namespace

SinglePassParams SinglePassParams::from(const PhysicalParams& p) {
    SinglePassParams s;
    s.n_atoms = p.n_atoms;
    s.photon_flux = p.photon_flux;
    s.beam_area = p.beam_area;
    s.round_trip_time = p.round_trip_time;
    s.detuning = p.detuning;
    s.wavelength = p.wavelength;
    s.spont_rate = p.spont_rate;
    s.dipole_moment = p.dipole_moment;
    s.detector_efficiency = p.detector_efficiency;
    return s;
}

SinglePassVariance singlepass_variance(const PhysicalParams& p, double t) {
    if (!(t >= 0.0)) throw std::domain_error("singlepass_variance: t must be >= 0");
    SpRates r = make_sp_rates(p);
    SinglePassVariance out;
    out.variance = 0.5 / (1.0 + r.rate_sp * t);
    out.rate_ratio = r.rate_cav / r.rate_sp;
    return out;
}

SinglePassRun singlepass_decay_integrate(const PhysicalParams& p, const TimeGrid& grid) {
    grid.validate();
    SpRates r = make_sp_rates(p);
    const double eta = r.eta_sp;

    TimeGrid g = grid;
    SinglePassRun run;
    if (eta > 0.0 && grid.t1() > 3.0 / eta) {
        double t_cap = 3.0 / eta;
        std::size_t n = std::max<std::size_t>(
            1, static_cast<std::size_t>((t_cap - grid.t0) / grid.dt));
        g = TimeGrid{grid.t0, grid.dt, n};
        run.capped = true;
    }

    OdeRhs rhs = [&](double t, const StateVec& y, StateVec& dy) {
        double var = y[0];
        dy[0] = -2.0 * r.rate_sp * var * var * std::exp(-eta * t) - eta / 3.0 * var +
                2.0 / 3.0 * eta * std::exp(eta * t);
    };
    std::vector<StateVec> series = integrate_ode(rhs, {0.5}, g);

    run.t.reserve(series.size());
    run.dp_at.reserve(series.size());
    run.min_dp = std::sqrt(series[0][0]);
    run.t_min = g.t0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        double t = g.time(i);
        double var = series[i][0];
        if (var < 0.0)
            throw NumericalError("singlepass_decay_integrate: variance went negative");
        double dp = std::sqrt(var);
        run.t.push_back(t);
        run.dp_at.push_back(dp);
        if (dp < run.min_dp) {
            run.min_dp = dp;
            run.t_min = t;
        }
    }
    return run;
}

SinglePassMin singlepass_min(const PhysicalParams& p) {
    SinglePassMin out;
    if (p.spont_rate == 0.0) {
        out.zero_loss = true;
        return out;
    }
    SpRates r = make_sp_rates(p);
    out.value = std::pow(r.eta_sp / (3.0 * r.rate_sp), 0.25);
    return out;
}

} // namespace squeeze
