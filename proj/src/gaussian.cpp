#include "squeeze/gaussian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "squeeze/errors.hpp"

namespace squeeze {

namespace {

struct Rates {
    double kappa, kappa_det, ekd;  // ekd = eta_d * kappa_det
    double epsilon, kappa_eff;     // kappa_eff = kappa (+ epsilon when lossy)
    double coupling;               // g^2 Delta / (Delta^2 + Gamma^2/4), or g^2/Delta lossless
    double lor_gamma;              // (Gamma/2) g^2 / (Delta^2 + Gamma^2/4)
    double a_inf;                  // steady <a_x> at kappa_eff damping
};

Rates make_rates(const PhysicalParams& p, bool lossy) {
    DerivedCouplings dc = derive_couplings(p);
    Rates r;
    r.kappa = dc.kappa;
    r.kappa_det = dc.kappa_det;
    r.ekd = p.detector_efficiency * dc.kappa_det;
    r.epsilon = lossy ? dc.epsilon : 0.0;
    r.kappa_eff = r.kappa + r.epsilon;
    double g2 = dc.g * dc.g;
    if (lossy) {
        double den = p.detuning * p.detuning + p.spont_rate * p.spont_rate / 4.0;
        r.coupling = g2 * p.detuning / den;
        r.lor_gamma = (p.spont_rate / 2.0) * g2 / den;
    } else {
        r.coupling = g2 / p.detuning;
        r.lor_gamma = 0.0;
    }
    r.a_inf = 2.0 * std::sqrt(p.kappa1 * p.photon_flux) / r.kappa_eff;
    return r;
}

// step-profile closed form; tabulated profiles go through CavityFieldTracker
double amp_at(const Rates& r, double t, DriveModel drive) {
    if (drive == DriveModel::Steady) return r.a_inf;
    return r.a_inf * (1.0 - std::exp(-r.kappa_eff * t / 2.0));
}

double amp_at(const PhysicalParams& p, const Rates& r, double t, bool lossy, DriveModel drive) {
    if (p.step_profile()) return amp_at(r, t, drive);
    return cavity_amp_x(t, p, lossy);
}

void fill_matrices(const Rates& r, double ax, double n_atoms, double jx, bool lossy,
                   RiccatiMatrices& m) {
    double eta = lossy ? ax * ax * r.lor_gamma : 0.0;
    double g_tilde = std::sqrt(2.0) * r.coupling * std::sqrt(jx) * ax;

    m.g_mat.setZero();
    if (lossy && jx > 0.0) {
        m.g_mat(0, 0) = (n_atoms / jx) * eta;
        m.g_mat(1, 1) = (n_atoms / jx) * (2.0 / 3.0) * eta;
    }
    m.g_mat(2, 2) = r.kappa_eff - r.ekd;
    m.g_mat(3, 3) = r.kappa_eff;

    m.d_mat.setZero();
    m.d_mat(0, 0) = eta / 2.0;
    m.d_mat(1, 1) = eta / 6.0;
    m.d_mat(0, 3) = -g_tilde;
    m.d_mat(2, 1) = -g_tilde;
    m.d_mat(2, 2) = r.kappa_eff / 2.0 - r.ekd;
    m.d_mat(3, 3) = r.kappa_eff / 2.0;
    m.e_mat = m.d_mat.transpose();

    m.f_mat.setZero();
    m.f_mat(2, 2) = r.ekd;
}

Eigen::Matrix4d riccati_rhs(const RiccatiMatrices& m, const Eigen::Matrix4d& v) {
    return m.g_mat - m.d_mat * v - v * m.e_mat - v * m.f_mat * v;
}

void check_positive(const Eigen::Matrix4d& v, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(v, Eigen::EigenvaluesOnly);
    double mn = es.eigenvalues().minCoeff();
    if (mn < -1e-9)
        throw NumericalError("covariance matrix lost positive definiteness at t = " +
                             std::to_string(t) + " (min eigenvalue " + std::to_string(mn) + ")");
}

} // namespace

CovarianceState initial_covariance_state(const PhysicalParams& p) {
    p.validate();
    CovarianceState s;
    s.jx = p.n_atoms / 2.0;
    return s;
}

RiccatiMatrices riccati_matrices(const PhysicalParams& p, double t, bool lossy, double jx,
                                 DriveModel drive) {
    if (lossy && !(jx > 0.0))
        throw std::invalid_argument("riccati_matrices: jx must be > 0 in the lossy case");
    Rates r = make_rates(p, lossy);
    RiccatiMatrices m;
    fill_matrices(r, amp_at(p, r, t, lossy, drive), p.n_atoms, jx, lossy, m);
    return m;
}

namespace {

// RK4 step with the drive amplitude supplied at the three stage times.
void step_covariance_core(CovarianceState& state, const Rates& r, double n_atoms, double dt,
                          bool lossy, double ax0, double ax_mid, double ax1) {
    RiccatiMatrices m;
    auto deriv = [&](double ax, const Eigen::Matrix4d& v, double jx, Eigen::Matrix4d& dv,
                     double& djx) {
        fill_matrices(r, ax, n_atoms, jx, lossy, m);
        dv = riccati_rhs(m, v);
        djx = lossy ? -(ax * ax * r.lor_gamma) * jx : 0.0;
    };

    Eigen::Matrix4d k1, k2, k3, k4;
    double j1, j2, j3, j4;
    deriv(ax0, state.v, state.jx, k1, j1);
    deriv(ax_mid, state.v + dt / 2.0 * k1, state.jx + dt / 2.0 * j1, k2, j2);
    deriv(ax_mid, state.v + dt / 2.0 * k2, state.jx + dt / 2.0 * j2, k3, j3);
    deriv(ax1, state.v + dt * k3, state.jx + dt * j3, k4, j4);
    state.v += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    state.jx += dt / 6.0 * (j1 + 2.0 * j2 + 2.0 * j3 + j4);
    state.t += dt;
}

void post_step_projection(CovarianceState& state, bool lossy) {
    double asym = (state.v - state.v.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * (1.0 + state.v.cwiseAbs().maxCoeff()))
        throw NumericalError("covariance symmetry drift " + std::to_string(asym) + " at t = " +
                             std::to_string(state.t));
    state.v = 0.5 * (state.v + state.v.transpose()).eval();
    if (lossy) {
        state.v(0, 1) = state.v(1, 0) = 0.0;
        state.v(0, 2) = state.v(2, 0) = 0.0;
        state.v(1, 3) = state.v(3, 1) = 0.0;
        state.v(2, 3) = state.v(3, 2) = 0.0;
    }

    // cheap guard every step, full eigenvalue check every 64th
    for (int i = 0; i < 4; ++i)
        if (state.v(i, i) < -1e-9)
            throw NumericalError("covariance diagonal went negative at t = " +
                                 std::to_string(state.t));
    static thread_local unsigned counter = 0;
    if ((++counter & 63u) == 0) check_positive(state.v, state.t);
}

} // namespace

void step_covariance(CovarianceState& state, const PhysicalParams& p, double dt, bool lossy,
                     DriveModel drive) {
    Rates r = make_rates(p, lossy);
    const double t = state.t;
    double ax0 = amp_at(p, r, t, lossy, drive);
    double axm = amp_at(p, r, t + dt / 2.0, lossy, drive);
    double ax1 = amp_at(p, r, t + dt, lossy, drive);
    step_covariance_core(state, r, p.n_atoms, dt, lossy, ax0, axm, ax1);
    post_step_projection(state, lossy);
}

void step_mean(CovarianceState& state, double dW, const PhysicalParams& p, double dt, bool lossy,
               DriveModel drive) {
    Rates r = make_rates(p, lossy);
    double ax = amp_at(p, r, state.t, lossy, drive);
    double g_tilde = std::sqrt(2.0) * r.coupling * std::sqrt(state.jx) * ax;

    Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
    a(0, 3) = g_tilde;
    a(2, 1) = g_tilde;
    a(2, 2) = -r.kappa_eff / 2.0;
    a(3, 3) = -r.kappa_eff / 2.0;

    Eigen::Vector4d kick = std::sqrt(r.ekd / 2.0) *
                           (state.v - Eigen::Matrix4d::Identity()).col(2);
    state.mean += a * state.mean * dt + kick * dW;
}

double signal_increment(const CovarianceState& state, const PhysicalParams& p, double dW,
                        double dt) {
    DerivedCouplings dc = derive_couplings(p);
    double ekd = p.detector_efficiency * dc.kappa_det;
    return dW + std::sqrt(2.0 * ekd) * state.mean(2) * dt;
}

Eigen::Matrix4d solve_mk(const PhysicalParams& p, double t, std::size_t n_steps) {
    if (!(t >= 0.0)) throw std::domain_error("solve_mk: t must be >= 0");
    Rates r = make_rates(p, false);
    RiccatiMatrices m;
    fill_matrices(r, r.a_inf, p.n_atoms, p.n_atoms / 2.0, false, m);

    // d/dt [M; K] = [[-D, G], [F, E]] [M; K], constant coefficients
    Eigen::Matrix<double, 8, 8> blk = Eigen::Matrix<double, 8, 8>::Zero();
    blk.block<4, 4>(0, 0) = -m.d_mat;
    blk.block<4, 4>(0, 4) = m.g_mat;
    blk.block<4, 4>(4, 0) = m.f_mat;
    blk.block<4, 4>(4, 4) = m.e_mat;

    Eigen::Matrix<double, 8, 4> y;
    y.block<4, 4>(0, 0) = Eigen::Matrix4d::Identity();  // M(0) = V(0) = I
    y.block<4, 4>(4, 0) = Eigen::Matrix4d::Identity();  // K(0) = I
    if (t > 0.0) {
        double h = t / static_cast<double>(n_steps);
        for (std::size_t i = 0; i < n_steps; ++i) {
            Eigen::Matrix<double, 8, 4> k1 = blk * y;
            Eigen::Matrix<double, 8, 4> k2 = blk * (y + h / 2.0 * k1);
            Eigen::Matrix<double, 8, 4> k3 = blk * (y + h / 2.0 * k2);
            Eigen::Matrix<double, 8, 4> k4 = blk * (y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    Eigen::Matrix4d mm = y.block<4, 4>(0, 0);
    Eigen::Matrix4d kk = y.block<4, 4>(4, 0);
    Eigen::FullPivLU<Eigen::Matrix4d> lu(kk);
    if (!lu.isInvertible())
        throw NumericalError("solve_mk: K factor is singular at t = " + std::to_string(t));
    return mm * lu.inverse();
}

SpinMoments closed_form_variances(const PhysicalParams& p, double t) {
    if (!(t >= 0.0)) throw std::domain_error("closed_form_variances: t must be >= 0");
    DerivedCouplings dc = derive_couplings(p);
    double n = p.n_atoms;
    double ekd = p.detector_efficiency * dc.kappa_det;
    double i2 = alpha_sq_integral(t, p);
    double al = alpha_of_t(t, p);

    SpinMoments m;
    m.var_jz = (n / 4.0) / (1.0 + n * ekd * i2);
    m.var_jy = (n / 4.0) * (1.0 + n * dc.kappa * i2 + n * al * al);
    m.var_xph = 0.5 * (1.0 + n * al * al + n * ekd * i2) / (1.0 + n * ekd * i2);
    m.var_pph = 0.5;
    // means are the ensemble (record-free) values
    return m;
}

MinUncertainty predicted_min_uncertainty(const PhysicalParams& p) {
    DerivedCouplings dc = derive_couplings(p);
    MinUncertainty out;
    if (p.spont_rate == 0.0) {
        out.zero_loss = true;
        return out;
    }
    double g2 = dc.g * dc.g;
    double den = p.detuning * p.detuning + p.spont_rate * p.spont_rate / 4.0;
    double eta_sp = p.photon_flux * p.round_trip_time * (p.spont_rate / 2.0) * g2 / den;
    double rate_sp = p.n_atoms * p.photon_flux * g2 * g2 * p.round_trip_time *
                     p.round_trip_time / (p.detuning * p.detuning) * p.detector_efficiency;
    out.singlepass_min = std::pow(eta_sp / (3.0 * rate_sp), 0.25);
    double factor = std::pow((dc.kappa + dc.epsilon) * (dc.kappa + dc.epsilon) *
                                 p.round_trip_time / (4.0 * dc.kappa_det),
                             0.25);
    out.cavity_min = out.singlepass_min * factor;
    return out;
}

CovarianceRun propagate_covariance(const PhysicalParams& p, const std::vector<TimeGrid>& segments,
                                   bool lossy, DriveModel drive, std::size_t output_stride) {
    if (segments.empty()) throw std::invalid_argument("propagate_covariance: no grid segments");
    if (output_stride == 0) output_stride = 1;
    Rates r = make_rates(p, lossy);

    CovarianceRun run;
    CovarianceState s = initial_covariance_state(p);
    s.t = segments.front().t0;

    // for tabulated flux the amplitude is tracked incrementally
    const bool tabulated = !p.step_profile();
    CavityFieldTracker tracker;
    if (tabulated) {
        tracker = CavityFieldTracker(p, lossy);
        tracker.step(s.t);
    }
    double ax_cur = tabulated ? tracker.ax() : amp_at(r, s.t, drive);

    auto emit = [&](const CovarianceState& st) {
        double ax = ax_cur;
        CovariancePoint pt;
        pt.t = st.t;
        pt.v11 = st.v(0, 0);
        pt.v22 = st.v(1, 1);
        pt.v33 = st.v(2, 2);
        pt.v44 = st.v(3, 3);
        pt.jx = st.jx;
        pt.g_tilde = std::sqrt(2.0) * r.coupling * std::sqrt(st.jx) * ax;
        pt.eta = lossy ? ax * ax * r.lor_gamma : 0.0;
        run.series.push_back(pt);
    };
    emit(s);

    // minimum tracking with one point of history for parabolic refinement
    double best_dp = s.dp_at(), best_t = s.t;
    double prev_dp = best_dp, prev_t = best_t;
    double best_prev_dp = 0.0, best_prev_t = 0.0, best_next_dp = -1.0, best_next_t = 0.0;
    bool last_was_min = false;

    std::size_t emitted = 0;
    for (const TimeGrid& g : segments) {
        g.validate();
        for (std::size_t i = 0; i < g.n_steps; ++i) {
            double ax0 = ax_cur, axm, ax1;
            if (tabulated) {
                tracker.step(g.dt / 2.0);
                axm = tracker.ax();
                tracker.step(g.dt / 2.0);
                ax1 = tracker.ax();
            } else {
                axm = amp_at(r, s.t + g.dt / 2.0, drive);
                ax1 = amp_at(r, s.t + g.dt, drive);
            }
            step_covariance_core(s, r, p.n_atoms, g.dt, lossy, ax0, axm, ax1);
            post_step_projection(s, lossy);
            ax_cur = ax1;
            double dp = s.dp_at();
            if (dp < best_dp) {
                best_dp = dp;
                best_t = s.t;
                best_prev_dp = prev_dp;
                best_prev_t = prev_t;
                best_next_dp = -1.0;
                last_was_min = true;
            } else if (last_was_min) {
                best_next_dp = dp;
                best_next_t = s.t;
                last_was_min = false;
            }
            prev_dp = dp;
            prev_t = s.t;
            if (++emitted % output_stride == 0) emit(s);
        }
    }
    if (run.series.empty() || run.series.back().t != s.t) emit(s);

    run.min_dp = best_dp;
    run.t_min = best_t;
    // parabola through the three samples bracketing the discrete minimum
    if (best_next_dp >= 0.0 && best_prev_t < best_t && best_t < best_next_t) {
        double x0 = best_prev_t, x1 = best_t, x2 = best_next_t;
        double y0 = best_prev_dp, y1 = best_dp, y2 = best_next_dp;
        double d1 = (y0 - y1) / (x0 - x1);
        double d2 = (y2 - y1) / (x2 - x1);
        double a = (d2 - d1) / (x2 - x0);
        if (a > 0.0) {
            double tv = 0.5 * (x0 + x1 - d1 / a);
            if (tv > x0 && tv < x2) {
                double b = d1 - a * (x0 + x1);
                double c = y1 - a * x1 * x1 - b * x1;
                run.t_min = tv;
                run.min_dp = std::min(best_dp, a * tv * tv + b * tv + c);
            }
        }
    }
    run.final_state = s;
    return run;
}

std::vector<TimeGrid> default_cavity_grid(const PhysicalParams& p, double t_end) {
    double kappa = p.kappa();
    double t_trans = std::min(40.0 / kappa, t_end);
    std::vector<TimeGrid> segs;
    std::size_t n1 = static_cast<std::size_t>(std::ceil(t_trans * kappa / 0.02));
    segs.push_back(TimeGrid::from_range(0.0, t_trans, std::max<std::size_t>(n1, 1)));
    if (t_end > t_trans) {
        std::size_t n2 = static_cast<std::size_t>(std::ceil((t_end - t_trans) * kappa / 0.2));
        segs.push_back(TimeGrid::from_range(t_trans, t_end, std::max<std::size_t>(n2, 1)));
    }
    return segs;
}

} // namespace squeeze
