#include "squeeze/dicke.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace squeeze {

namespace {

double log_sum_exp(const std::vector<double>& v) {
    double m = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// J_+|j,n> = c_plus(n)|j,n+1>, c_plus(n) = sqrt(j(j+1) - n(n+1))
double c_plus(double j, double n) {
    double v = j * (j + 1.0) - n * (n + 1.0);
    return v > 0.0 ? std::sqrt(v) : 0.0;
}

} // namespace

double DickeState::log_coeff_unnormalized(std::size_t k, std::size_t l) const {
    double n = n_of(k), m = n_of(l);
    double sum = n + m, diff = n - m;
    return log_amp_[k] + log_amp_[l] + std::sqrt(eta_kdet_) * sum * i1_ -
           (0.5 * kappa_ * diff * diff + 0.5 * eta_kdet_ * sum * sum) * i2_;
}

double DickeState::log_norm() const {
    std::vector<double> d(dim());
    for (std::size_t k = 0; k < dim(); ++k) d[k] = log_coeff_unnormalized(k, k);
    return log_sum_exp(d);
}

double DickeState::coeff(std::size_t k, std::size_t l) const {
    return std::exp(log_coeff_unnormalized(k, l) - log_norm());
}

std::vector<double> DickeState::diag_weights() const {
    std::vector<double> w(dim());
    for (std::size_t k = 0; k < dim(); ++k) w[k] = log_coeff_unnormalized(k, k);
    double lz = log_sum_exp(w);
    for (double& x : w) x = std::exp(x - lz);
    return w;
}

DickeState init_css(int n_atoms, InitialWeights weights, int dense_cap) {
    if (n_atoms < 1) throw std::invalid_argument("init_css: n_atoms must be >= 1");
    if (n_atoms > dense_cap)
        throw std::invalid_argument(
            "init_css: n_atoms exceeds the dense-matrix cap (" + std::to_string(dense_cap) +
            "); use the Gaussian covariance module for large ensembles");
    DickeState s;
    s.n_atoms_ = n_atoms;
    s.log_amp_.resize(static_cast<std::size_t>(n_atoms) + 1);
    const double nd = n_atoms;
    if (weights == InitialWeights::Exact) {
        // C_nm(0) = b_n b_m with b_n = 2^{-N/2} sqrt(binom(N, N/2+n))
        for (std::size_t k = 0; k <= static_cast<std::size_t>(n_atoms); ++k) {
            double kk = static_cast<double>(k);
            double logbinom = std::lgamma(nd + 1.0) - std::lgamma(kk + 1.0) -
                              std::lgamma(nd - kk + 1.0);
            s.log_amp_[k] = 0.5 * logbinom - 0.5 * nd * std::log(2.0);
        }
    } else {
        // large-N form: b_n = (2/(pi N))^{1/4} exp(-n^2/N)
        for (std::size_t k = 0; k <= static_cast<std::size_t>(n_atoms); ++k) {
            double n = s.n_of(k);
            s.log_amp_[k] = 0.25 * std::log(2.0 / (M_PI * nd)) - n * n / nd;
        }
    }
    return s;
}

void advance(DickeState& state, double dt, double dy_s, const PhysicalParams& p) {
    if (!(dt > 0.0)) throw std::domain_error("advance: dt must be > 0");
    if (!std::isfinite(dy_s)) throw std::invalid_argument("advance: dy_s must be finite");

    DerivedCouplings dc = derive_couplings(p);
    state.kappa_ = dc.kappa;
    state.eta_kdet_ = p.detector_efficiency * dc.kappa_det;

    // Ito convention: the signal increment multiplies alpha at the interval start.
    state.i1_ += state.alpha_ * dy_s;

    if (p.step_profile()) {
        double t1 = state.t_ + dt;
        state.i2_ += alpha_sq_integral(t1, p) - alpha_sq_integral(state.t_, p);
        state.alpha_ = alpha_of_t(t1, p);
        state.ax_ = cavity_amp_x(t1, p);
        state.t_ = t1;
    } else {
        if (!state.tracker_valid_) {
            state.tracker_ = CavityFieldTracker(p);
            state.tracker_.step(state.t_);
            state.tracker_valid_ = true;
        }
        double i2_before = state.tracker_.alpha_sq_int();
        state.tracker_.step(dt);
        state.i2_ += state.tracker_.alpha_sq_int() - i2_before;
        state.alpha_ = state.tracker_.alpha();
        state.ax_ = state.tracker_.ax();
        state.t_ = state.tracker_.t();
    }
}

double sample_signal(const DickeState& state, double dt, NoiseStream& stream,
                     const PhysicalParams& p) {
    DerivedCouplings dc = derive_couplings(p);
    double ekd = p.detector_efficiency * dc.kappa_det;
    std::vector<double> w = state.diag_weights();
    double mean_n = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) mean_n += w[k] * state.n_of(k);
    return 2.0 * std::sqrt(ekd) * state.alpha() * mean_n * dt + stream.wiener_increment(dt);
}

SpinMoments spin_moments(const DickeState& state) {
    const std::size_t d = state.dim();
    const double j = state.spin_j();
    const double alpha = state.alpha();
    std::vector<double> w = state.diag_weights();
    const double lz = state.log_norm();

    SpinMoments m;
    double mn = 0.0, mn2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        double n = state.n_of(k);
        mn += w[k] * n;
        mn2 += w[k] * n * n;
    }
    m.mean_jz = mn;
    m.var_jz = mn2 - mn * mn;

    // <J_y> vanishes for the real symmetric coefficient matrix; <J_y^2> picks
    // up the diagonal ladder terms and the second off-diagonal weighted by
    // the field overlap exp(-2 alpha^2).
    m.mean_jy = 0.0;
    double s_diag = 0.0, s_off2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        double n = state.n_of(k);
        double cp = c_plus(j, n), cm = c_plus(j, n - 1.0);
        s_diag += w[k] * (cp * cp + cm * cm);
    }
    for (std::size_t k = 0; k + 2 < d; ++k) {
        double n = state.n_of(k);
        double rho = std::exp(state.log_coeff_unnormalized(k, k + 2) - lz) *
                     std::exp(-2.0 * alpha * alpha);
        s_off2 += rho * c_plus(j, n) * c_plus(j, n + 1.0);
    }
    m.var_jy = 0.25 * (s_diag - 2.0 * s_off2);

    // y mode: C_nn-weighted mixture of coherent states |n alpha> (real).
    m.mean_xph = std::sqrt(2.0) * alpha * m.mean_jz;
    m.mean_pph = 0.0;
    m.var_xph = 0.5 + 2.0 * alpha * alpha * m.var_jz;
    m.var_pph = 0.5;
    return m;
}

double signal_pdf(const DickeState& state0, const PhysicalParams& p, double t, double y_s) {
    if (!(t > 0.0)) throw std::domain_error("signal_pdf: t must be > 0");
    DerivedCouplings dc = derive_couplings(p);
    double ekd = p.detector_efficiency * dc.kappa_det;
    double alpha = dc.alpha_steady;
    std::vector<double> w = state0.diag_weights();
    double pdf = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        double mu = 2.0 * std::sqrt(ekd) * state0.n_of(k) * alpha * t;
        pdf += w[k] * std::exp(-(y_s - mu) * (y_s - mu) / (2.0 * t));
    }
    return pdf / std::sqrt(2.0 * M_PI * t);
}

void write_diag_csv(const DickeState& state, std::ostream& os) {
    os << "n,C_nn\n";
    std::vector<double> w = state.diag_weights();
    char buf[80];
    for (std::size_t k = 0; k < w.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", state.n_of(k), w[k]);
        os << buf;
    }
}

std::string to_json(const DickeState& state) {
    if (state.n_atoms() > 128)
        throw std::invalid_argument("to_json: full-matrix export is limited to n_atoms <= 128");
    nlohmann::json out;
    out["n_atoms"] = state.n_atoms();
    out["t"] = state.t();
    out["alpha"] = state.alpha();
    out["ax"] = state.ax();
    out["i1"] = state.i1();
    out["i2"] = state.i2();
    std::vector<double> ns(state.dim());
    for (std::size_t k = 0; k < state.dim(); ++k) ns[k] = state.n_of(k);
    out["n"] = ns;
    std::vector<std::vector<double>> c(state.dim(), std::vector<double>(state.dim()));
    for (std::size_t k = 0; k < state.dim(); ++k)
        for (std::size_t l = 0; l < state.dim(); ++l) c[k][l] = state.coeff(k, l);
    out["coeffs"] = c;
    return out.dump(2);
}

} // namespace squeeze
