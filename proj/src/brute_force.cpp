#include "squeeze/brute_force.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "squeeze/errors.hpp"

namespace squeeze {

namespace {

using Mat = Eigen::MatrixXcd;

// The joint basis index is k*F + f with k the Dicke label (n = k - N/2) and
// f the Fock label. a_y and J_z act on separate factors, so left/right
// applications are index shifts and scalings; no dense operator products.
struct Workspace {
    int nat1;  // N + 1
    int F;
    std::vector<double> nval;   // n_k
    std::vector<double> sqf;    // sqrt(f)

    int dim() const { return nat1 * F; }
    int idx(int k, int f) const { return k * F + f; }
};

// out = a rho   (a annihilates the y mode)
void apply_a_left(const Workspace& w, const Mat& rho, Mat& out) {
    out.setZero();
    for (int k = 0; k < w.nat1; ++k)
        for (int f = 0; f + 1 < w.F; ++f)
            out.row(w.idx(k, f)) = w.sqf[f + 1] * rho.row(w.idx(k, f + 1));
}

// out = rho a^dag
void apply_adag_right(const Workspace& w, const Mat& rho, Mat& out) {
    out.setZero();
    for (int k = 0; k < w.nat1; ++k)
        for (int f = 0; f + 1 < w.F; ++f)
            out.col(w.idx(k, f)) = w.sqf[f + 1] * rho.col(w.idx(k, f + 1));
}

// out = T(rho) = c (a rho + rho a^dag)
void apply_T(const Workspace& w, double c, const Mat& rho, Mat& tmp, Mat& out) {
    apply_a_left(w, rho, out);
    apply_adag_right(w, rho, tmp);
    out += tmp;
    out *= c;
}

// acc += Hamiltonian commutator: -kc ax ([M, rho]) with M = (a - a^dag) Jz
void add_hamiltonian(const Workspace& w, double coeff, const Mat& rho, Mat& acc) {
    // (M rho)[(k,f),c] = n_k (sqrt(f+1) rho[(k,f+1),c] - sqrt(f) rho[(k,f-1),c])
    for (int k = 0; k < w.nat1; ++k) {
        double n = w.nval[k];
        if (n == 0.0) continue;
        for (int f = 0; f < w.F; ++f) {
            int r = w.idx(k, f);
            if (f + 1 < w.F) acc.row(r) -= coeff * n * w.sqf[f + 1] * rho.row(w.idx(k, f + 1));
            if (f > 0) acc.row(r) += coeff * n * w.sqf[f] * rho.row(w.idx(k, f - 1));
        }
    }
    // +(rho M)[r,(k,f)] = n_k (sqrt(f) rho[r,(k,f-1)] - sqrt(f+1) rho[r,(k,f+1)])
    for (int k = 0; k < w.nat1; ++k) {
        double n = w.nval[k];
        if (n == 0.0) continue;
        for (int f = 0; f < w.F; ++f) {
            int c = w.idx(k, f);
            if (f > 0) acc.col(c) += coeff * n * w.sqf[f] * rho.col(w.idx(k, f - 1));
            if (f + 1 < w.F) acc.col(c) -= coeff * n * w.sqf[f + 1] * rho.col(w.idx(k, f + 1));
        }
    }
}

// acc += kappa/2 (2 a rho a^dag - n rho - rho n), n = a^dag a
void add_damping(const Workspace& w, double kappa, const Mat& rho, Mat& tmp, Mat& acc) {
    apply_a_left(w, rho, tmp);  // tmp = a rho
    for (int k = 0; k < w.nat1; ++k)
        for (int f = 0; f + 1 < w.F; ++f)
            acc.col(w.idx(k, f)) += kappa * w.sqf[f + 1] * tmp.col(w.idx(k, f + 1));
    for (int k = 0; k < w.nat1; ++k)
        for (int f = 0; f < w.F; ++f) {
            int i = w.idx(k, f);
            acc.row(i) -= 0.5 * kappa * static_cast<double>(f) * rho.row(i);
            acc.col(i) -= 0.5 * kappa * static_cast<double>(f) * rho.col(i);
        }
}

// rho <- exp(u T + v T^2)(rho) by a truncated series; T commutes with itself
// so the coefficients are those of exp(u x + v x^2).
void apply_measurement_exp(const Workspace& w, double c, double u, double v, Mat& rho, Mat& cur,
                           Mat& scratch, Mat& next, Mat& acc) {
    constexpr int kmax = 48;
    double coef[kmax + 3] = {0.0};
    double term[kmax + 3] = {0.0};
    coef[0] = 1.0;
    term[0] = 1.0;
    for (int j = 1; j <= kmax; ++j) {
        double tnext[kmax + 3] = {0.0};
        for (int i = 0; i + 1 <= kmax + 2; ++i) {
            if (term[i] == 0.0) continue;
            tnext[i + 1] += u * term[i];
            if (i + 2 <= kmax + 2) tnext[i + 2] += v * term[i];
        }
        double mx = 0.0;
        for (int i = 0; i <= kmax + 2; ++i) {
            term[i] = tnext[i] / j;
            coef[i] += term[i];
            mx = std::max(mx, std::abs(term[i]));
        }
        if (mx < 1e-22) break;
    }
    acc = coef[0] * rho;
    cur = rho;
    double acc_scale = acc.norm();
    for (int k = 1; k <= kmax; ++k) {
        apply_T(w, c, cur, scratch, next);
        cur.swap(next);
        if (coef[k] != 0.0) acc += coef[k] * cur;
        if (cur.norm() * std::abs(coef[k]) < 1e-18 * acc_scale) break;
    }
    rho = acc;
}

} // namespace

BruteForceResult brute_force_evolve(int n_atoms, int fock_cutoff, const PhysicalParams& p,
                                    const MeasurementRecord& record) {
    if (n_atoms < 1 || n_atoms > 4)
        throw std::invalid_argument("brute_force_evolve: n_atoms must be in [1,4]");
    if (fock_cutoff < 2) throw std::invalid_argument("brute_force_evolve: fock_cutoff too small");
    if ((n_atoms + 1) * fock_cutoff > 2000)
        throw std::invalid_argument("brute_force_evolve: joint dimension exceeds 2000");
    if (record.size() == 0) throw std::invalid_argument("brute_force_evolve: empty record");
    p.validate();

    DerivedCouplings dc = derive_couplings(p);
    const double kc = dc.g * dc.g / p.detuning;
    const double kappa = dc.kappa;
    const double sq_ekd = std::sqrt(p.detector_efficiency * dc.kappa_det);
    const double drive = std::sqrt(p.kappa1 * p.photon_flux);

    Workspace w;
    w.nat1 = n_atoms + 1;
    w.F = fock_cutoff;
    w.nval.resize(w.nat1);
    for (int k = 0; k < w.nat1; ++k) w.nval[k] = k - 0.5 * n_atoms;
    w.sqf.resize(w.F + 1);
    for (int f = 0; f <= w.F; ++f) w.sqf[f] = std::sqrt(static_cast<double>(f));

    const int dim = w.dim();
    Mat rho = Mat::Zero(dim, dim);
    // CSS (x) vacuum
    std::vector<double> amp(w.nat1);
    for (int k = 0; k < w.nat1; ++k) {
        double logbinom = std::lgamma(n_atoms + 1.0) - std::lgamma(k + 1.0) -
                          std::lgamma(n_atoms - k + 1.0);
        amp[k] = std::exp(0.5 * logbinom - 0.5 * n_atoms * std::log(2.0));
    }
    for (int k = 0; k < w.nat1; ++k)
        for (int l = 0; l < w.nat1; ++l) rho(w.idx(k, 0), w.idx(l, 0)) = amp[k] * amp[l];

    Mat deriv(dim, dim), t1(dim, dim), t2(dim, dim), t3(dim, dim), acc(dim, dim);
    double ax = 0.0;
    double top_pop_max = 0.0;
    // dt from the record grid (uniform)
    const double dt = record.size() > 1 ? record.t[1] - record.t[0] : 0.0;
    if (!(dt > 0.0)) throw std::invalid_argument("brute_force_evolve: record needs dt > 0");

    for (std::size_t s = 0; s < record.size(); ++s) {
        deriv.setZero();
        add_hamiltonian(w, kc * ax, rho, deriv);
        add_damping(w, kappa, rho, t1, deriv);
        rho += dt * deriv;

        apply_measurement_exp(w, sq_ekd, record.dy[s], -0.5 * dt, rho, t1, t2, t3, acc);

        double tr = rho.trace().real();
        if (!(tr > 0.0) || !std::isfinite(tr))
            throw NumericalError("brute_force_evolve: trace lost positivity at step " +
                                 std::to_string(s));
        rho /= tr;

        double top = 0.0;
        for (int k = 0; k < w.nat1; ++k) top += rho(w.idx(k, w.F - 1), w.idx(k, w.F - 1)).real();
        top_pop_max = std::max(top_pop_max, top);
        if (top_pop_max > 1e-8)
            throw NumericalError("brute_force_evolve: top Fock level population " +
                                 std::to_string(top_pop_max) + " exceeds 1e-8; raise fock_cutoff");

        ax += dt * (-0.5 * kappa * ax + drive);
    }

    BruteForceResult res;
    res.top_fock_population = top_pop_max;
    res.purity = rho.squaredNorm();  // tr(rho^2) for Hermitian rho

    // moments by direct operator traces
    SpinMoments& m = res.moments;
    double mn = 0.0, mn2 = 0.0;
    for (int k = 0; k < w.nat1; ++k)
        for (int f = 0; f < w.F; ++f) {
            double pkf = rho(w.idx(k, f), w.idx(k, f)).real();
            mn += w.nval[k] * pkf;
            mn2 += w.nval[k] * w.nval[k] * pkf;
        }
    m.mean_jz = mn;
    m.var_jz = mn2 - mn * mn;

    // J_y on the atomic factor
    const double j = 0.5 * n_atoms;
    Eigen::MatrixXcd jy = Eigen::MatrixXcd::Zero(w.nat1, w.nat1);
    for (int k = 0; k + 1 < w.nat1; ++k) {
        double c = std::sqrt(j * (j + 1.0) - w.nval[k] * (w.nval[k] + 1.0));
        jy(k + 1, k) = std::complex<double>(0.0, -0.5) * c;  // J+ / (2i)
        jy(k, k + 1) = std::complex<double>(0.0, 0.5) * c;   // -J- / (2i)
    }
    Eigen::MatrixXcd jy2 = jy * jy;
    std::complex<double> mjy = 0.0, mjy2 = 0.0, mxph = 0.0, mpph = 0.0, mx2 = 0.0, mp2 = 0.0;
    for (int k = 0; k < w.nat1; ++k)
        for (int l = 0; l < w.nat1; ++l)
            for (int f = 0; f < w.F; ++f) {
                std::complex<double> r = rho(w.idx(l, f), w.idx(k, f));
                mjy += jy(k, l) * r;   // tr(rho Jy): sum rho[lf,kf] Jy[k,l]... indices below
                mjy2 += jy2(k, l) * r;
            }
    // x_ph = (a + a^dag)/sqrt(2), p_ph = -i(a - a^dag)/sqrt(2) on the Fock factor
    for (int k = 0; k < w.nat1; ++k)
        for (int f = 0; f + 1 < w.F; ++f) {
            std::complex<double> r_up = rho(w.idx(k, f + 1), w.idx(k, f));  // <f|rho|f+1> adj
            std::complex<double> r_dn = rho(w.idx(k, f), w.idx(k, f + 1));
            mxph += w.sqf[f + 1] / std::sqrt(2.0) * (r_up + r_dn);
            mpph += std::complex<double>(0.0, 1.0) * w.sqf[f + 1] / std::sqrt(2.0) * (r_dn - r_up);
        }
    // second moments of the quadratures via a-operator moments
    // <x^2> = 1/2 (1 + 2<n> + <a^2> + <a^dag^2> + ... ) handled directly:
    std::complex<double> maa = 0.0, mada = 0.0;
    for (int k = 0; k < w.nat1; ++k)
        for (int f = 0; f < w.F; ++f) {
            if (f + 2 < w.F) {
                std::complex<double> r = rho(w.idx(k, f), w.idx(k, f + 2));
                maa += w.sqf[f + 1] * w.sqf[f + 2] * r;  // <a a> from <f|rho|f+2>
            }
            mada += static_cast<double>(f) * rho(w.idx(k, f), w.idx(k, f)).real();
        }
    mx2 = 0.5 * (2.0 * mada + 1.0 + maa + std::conj(maa));
    mp2 = 0.5 * (2.0 * mada + 1.0 - maa - std::conj(maa));

    m.mean_jy = mjy.real();
    m.var_jy = mjy2.real() - mjy.real() * mjy.real();
    m.mean_xph = mxph.real();
    m.mean_pph = mpph.real();
    m.var_xph = mx2.real() - mxph.real() * mxph.real();
    m.var_pph = mp2.real() - mpph.real() * mpph.real();
    res.rho = std::move(rho);
    return res;
}

} // namespace squeeze
