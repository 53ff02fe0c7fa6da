#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "squeeze/errors.hpp"
#include "squeeze/stochastic.hpp"
#include "test_common.hpp"

using namespace squeeze;

TEST_CASE("wiener increments have the right law") {
    NoiseStream s(12345, 0);
    const int n = 1000000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double w = s.wiener_increment(1.0);
        sum += w;
        sum2 += w * w;
    }
    double mean = sum / n;
    double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 5e-3);  // 5 sigma of the sample mean
    CHECK(std::abs(var - 1.0) < 1e-2);
}

TEST_CASE("variance scales with dt") {
    NoiseStream s(99, 3);
    const int n = 1000000;
    const double dt = 1e-8;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double w = s.wiener_increment(dt);
        sum += w;
        sum2 += w * w;
    }
    double var = sum2 / n - (sum / n) * (sum / n);
    CHECK(std::abs(var - dt) < 0.03 * dt);
}

TEST_CASE("streams are deterministic and reproducible") {
    NoiseStream a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) CHECK(a.gaussian() == b.gaussian());
    CHECK(a.seed() == 42);
    CHECK(a.stream_id() == 7);
}

TEST_CASE("distinct stream ids decorrelate") {
    NoiseStream a(42, 0), b(42, 1);
    const int n = 100000;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = a.gaussian(), y = b.gaussian();
        sab += x * y;
        saa += x * x;
        sbb += y * y;
    }
    double r = sab / std::sqrt(saa * sbb);
    CHECK(std::abs(r) < 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("dt validation") {
    NoiseStream s(1, 0);
    CHECK_THROWS_AS(s.wiener_increment(0.0), std::domain_error);
    CHECK_THROWS_AS(s.wiener_increment(-1.0), std::domain_error);
}

TEST_CASE("time grid invariants") {
    TimeGrid g = TimeGrid::from_range(0.0, 1.0, 1000);
    CHECK(g.dt == doctest::Approx(1e-3));
    CHECK(g.t1() == doctest::Approx(1.0));
    CHECK(g.time(500) == doctest::Approx(0.5));
    CHECK_THROWS_AS(TimeGrid::from_range(0.0, 0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS((TimeGrid{0.0, 0.0, 10}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((TimeGrid{0.0, 0.1, 0}).validate(), std::invalid_argument);
}

TEST_CASE("rk4 exponential decay") {
    OdeRhs f = [](double, const StateVec& y, StateVec& dy) { dy[0] = -y[0]; };
    auto series = integrate_ode(f, {1.0}, TimeGrid::from_range(0.0, 1.0, 1000));
    CHECK(series.size() == 1001);
    CHECK(std::abs(series.back()[0] - std::exp(-1.0)) < 1e-8);
}

TEST_CASE("rk4 fourth-order convergence") {
    OdeRhs f = [](double t, const StateVec& y, StateVec& dy) { dy[0] = std::cos(t) * y[0]; };
    auto err = [&](std::size_t n) {
        auto s = integrate_ode(f, {1.0}, TimeGrid::from_range(0.0, 2.0, n));
        return std::abs(s.back()[0] - std::exp(std::sin(2.0)));
    };
    double e1 = err(100), e2 = err(200);
    CHECK(e1 / e2 > 12.0);  // ~16x for a 4th-order method
    CHECK(e1 / e2 < 20.0);
}

TEST_CASE("constant state stays constant") {
    OdeRhs f = [](double, const StateVec&, StateVec& dy) {
        dy[0] = 0.0;
        dy[1] = 0.0;
    };
    auto series = integrate_ode(f, {2.5, -1.0}, TimeGrid::from_range(0.0, 10.0, 100));
    CHECK(series.back()[0] == 2.5);
    CHECK(series.back()[1] == -1.0);
}

TEST_CASE("non-finite derivative reports the step") {
    OdeRhs f = [](double t, const StateVec& y, StateVec& dy) {
        dy[0] = t < 0.5 ? -y[0] : std::numeric_limits<double>::quiet_NaN();
    };
    CHECK_THROWS_WITH_AS(integrate_ode(f, {1.0}, TimeGrid::from_range(0.0, 1.0, 10)),
                         doctest::Contains("step"), NumericalError);
}

// Riccati with constant g~ against the closed form: the oracle is
// V22(t) = (1 + N ekd alpha_inf^2 q(t))^{-1} with
// q(t) = int_0^t (1 - e^{-k s/2})^2 ds = t - 4/k (1-e^{-kt/2}) + 1/k (1-e^{-kt}),
// the constant-drive limit of the conditioning integral.
TEST_CASE("riccati via integrate_ode matches the closed form") {
    const double kappa = 1.0, ekd = 1.0, coupling = 0.05;
    const double n_atoms = 50.0;
    const double a_inf = 2.0;  // sqrt(kappa1 Phi) = 1
    const double g_tilde = std::sqrt(2.0) * coupling * std::sqrt(n_atoms / 2.0) * a_inf;
    const double alpha_inf = 2.0 * coupling * a_inf / kappa;

    OdeRhs rhs = [&](double, const StateVec& y, StateVec& dy) {
        // y = row-major 4x4 V
        double G[4] = {0.0, 0.0, kappa - ekd, kappa};
        auto D = [&](int i, int j) -> double {
            if (i == 0 && j == 3) return -g_tilde;
            if (i == 2 && j == 1) return -g_tilde;
            if (i == 2 && j == 2) return kappa / 2.0 - ekd;
            if (i == 3 && j == 3) return kappa / 2.0;
            return 0.0;
        };
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double acc = (i == j) ? G[i] : 0.0;
                for (int k = 0; k < 4; ++k) {
                    acc -= D(i, k) * y[4 * k + j];
                    acc -= y[4 * i + k] * D(j, k);  // V E with E = D^T
                }
                acc -= y[4 * i + 2] * ekd * y[4 * 2 + j];  // V F V, only F33 nonzero
                dy[4 * i + j] = acc;
            }
    };
    StateVec v0(16, 0.0);
    for (int i = 0; i < 4; ++i) v0[4 * i + i] = 1.0;
    const double t_end = 20.0;
    auto series = integrate_ode(rhs, v0, TimeGrid::from_range(0.0, t_end, 20000));

    for (std::size_t i = 0; i <= 20000; i += 2000) {
        double t = t_end * static_cast<double>(i) / 20000.0;
        double q = t - 4.0 / kappa * (1.0 - std::exp(-kappa * t / 2.0)) +
                   1.0 / kappa * (1.0 - std::exp(-kappa * t));
        double expected = 1.0 / (1.0 + n_atoms * ekd * alpha_inf * alpha_inf * q);
        CHECK(series[i][4 * 1 + 1] == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("sde with zero diffusion tracks the ode") {
    OdeRhs drift = [](double, const StateVec& y, StateVec& dy) { dy[0] = -y[0]; };
    OdeRhs diff = [](double, const StateVec&, StateVec& dy) { dy[0] = 0.0; };
    NoiseStream s(7, 0);
    const double dt = 1e-4;
    auto res = integrate_sde(drift, diff, {1.0}, TimeGrid::from_range(0.0, 1.0, 10000), s);
    CHECK(std::abs(res.series.back()[0] - std::exp(-1.0)) < 2.0 * dt);  // Euler order
    CHECK(res.record.dy.size() == 10000);
}

TEST_CASE("ornstein-uhlenbeck stationary variance") {
    OdeRhs drift = [](double, const StateVec& y, StateVec& dy) { dy[0] = -y[0]; };
    OdeRhs diff = [](double, const StateVec&, StateVec& dy) { dy[0] = 1.0; };
    const int n_traj = 10000;
    double sum = 0.0, sum2 = 0.0;
    TimeGrid grid = TimeGrid::from_range(0.0, 10.0, 1000);
    for (int k = 0; k < n_traj; ++k) {
        NoiseStream s(2024, static_cast<std::uint64_t>(k));
        auto res = integrate_sde(drift, diff, {0.0}, grid, s);
        double x = res.series.back()[0];
        sum += x;
        sum2 += x * x;
    }
    double var = sum2 / n_traj - (sum / n_traj) * (sum / n_traj);
    CHECK(std::abs(var - 0.5) < 0.05 * 0.5);
}

TEST_CASE("signal drift lands in the record") {
    OdeRhs drift = [](double, const StateVec&, StateVec& dy) { dy[0] = 0.0; };
    OdeRhs diff = [](double, const StateVec&, StateVec& dy) { dy[0] = 0.0; };
    SignalDrift sig = [](double, const StateVec&) { return 3.0; };
    NoiseStream s1(5, 0), s2(5, 0);
    TimeGrid grid = TimeGrid::from_range(0.0, 1.0, 100);
    auto with = integrate_sde(drift, diff, {0.0}, grid, s1, sig);
    auto without = integrate_sde(drift, diff, {0.0}, grid, s2);
    for (std::size_t i = 0; i < 100; ++i)
        CHECK(with.record.dy[i] == doctest::Approx(without.record.dy[i] + 3.0 * grid.dt));
}
