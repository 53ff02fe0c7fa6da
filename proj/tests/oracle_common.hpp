#ifndef SQUEEZE_ORACLE_COMMON_HPP
#define SQUEEZE_ORACLE_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "squeeze/brute_force.hpp"
#include "squeeze/dicke.hpp"
#include "squeeze/params.hpp"
#include "squeeze/stochastic.hpp"
#include "test_common.hpp"

namespace squeeze::testing {

struct OracleComparison {
    SpinMoments closed;          // closed-form coefficient evolution
    SpinMoments brute;           // brute-force SME, Richardson-extrapolated in dt
    double purity_extrap = 0.0;  // extrapolated Tr(rho^2)
    double purity_raw = 0.0;     // finest-grid raw value
    double max_moment_diff = 0.0;  // over mean_jz, var_jz, var_jy, mean_xph
};

// Drives both solvers with the same Wiener-path record (coarse levels are
// sums of the fine increments) and Richardson-extrapolates the brute-force
// moments over dt, dt/2, dt/4.
inline OracleComparison compare_oracle(int n_atoms, double coupling, double t_end, int n_fine,
                                       int fock_cutoff, std::uint64_t seed,
                                       std::uint64_t stream_id) {
    PhysicalParams p = small_system_params(coupling, n_atoms);
    const double dt_fine = t_end / n_fine;

    NoiseStream stream(seed, stream_id);
    std::vector<double> dw(n_fine);
    for (int i = 0; i < n_fine; ++i) dw[i] = stream.wiener_increment(dt_fine);

    // closed form on the fine grid
    DickeState st = init_css(n_atoms);
    for (int i = 0; i < n_fine; ++i) advance(st, dt_fine, dw[i], p);

    OracleComparison out;
    out.closed = spin_moments(st);

    auto level = [&](int factor) {
        MeasurementRecord rec;
        int n = n_fine / factor;
        rec.t.resize(n);
        rec.dy.resize(n);
        for (int i = 0; i < n; ++i) {
            rec.t[i] = i * factor * dt_fine;
            double s = 0.0;
            for (int j = 0; j < factor; ++j) s += dw[i * factor + j];
            rec.dy[i] = s;
        }
        return brute_force_evolve(n_atoms, fock_cutoff, p, rec);
    };
    BruteForceResult r4 = level(4);
    BruteForceResult r2 = level(2);
    BruteForceResult r1 = level(1);

    auto extrap = [](double m1, double m2, double m4) {
        return (8.0 * m1 - 6.0 * m2 + m4) / 3.0;
    };
    out.brute.mean_jz = extrap(r1.moments.mean_jz, r2.moments.mean_jz, r4.moments.mean_jz);
    out.brute.var_jz = extrap(r1.moments.var_jz, r2.moments.var_jz, r4.moments.var_jz);
    out.brute.mean_jy = extrap(r1.moments.mean_jy, r2.moments.mean_jy, r4.moments.mean_jy);
    out.brute.var_jy = extrap(r1.moments.var_jy, r2.moments.var_jy, r4.moments.var_jy);
    out.brute.mean_xph = extrap(r1.moments.mean_xph, r2.moments.mean_xph, r4.moments.mean_xph);
    out.brute.mean_pph = extrap(r1.moments.mean_pph, r2.moments.mean_pph, r4.moments.mean_pph);
    out.brute.var_xph = extrap(r1.moments.var_xph, r2.moments.var_xph, r4.moments.var_xph);
    out.brute.var_pph = extrap(r1.moments.var_pph, r2.moments.var_pph, r4.moments.var_pph);
    out.purity_extrap = extrap(r1.purity, r2.purity, r4.purity);
    out.purity_raw = r1.purity;

    double d1 = std::abs(out.brute.mean_jz - out.closed.mean_jz);
    double d2 = std::abs(out.brute.var_jz - out.closed.var_jz);
    double d3 = std::abs(out.brute.var_jy - out.closed.var_jy);
    double d4 = std::abs(out.brute.mean_xph - out.closed.mean_xph);
    out.max_moment_diff = std::max(std::max(d1, d2), std::max(d3, d4));
    return out;
}

} // namespace squeeze::testing

#endif
