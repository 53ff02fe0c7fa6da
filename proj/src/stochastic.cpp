#include "squeeze/stochastic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "squeeze/errors.hpp"

namespace squeeze {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

NoiseStream::NoiseStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
    // Decorrelate (seed, stream) pairs before feeding the engine.
    std::uint64_t s = seed ^ (stream_id * 0xda942042e4dd58b5ULL);
    std::seed_seq seq{static_cast<unsigned>(splitmix64(s)), static_cast<unsigned>(splitmix64(s)),
                      static_cast<unsigned>(splitmix64(s)), static_cast<unsigned>(splitmix64(s))};
    rng_.seed(seq);
}

double NoiseStream::gaussian() {
    // Box-Muller, two raw draws per sample, spare discarded: the mapping from
    // call index to engine state stays fixed.
    std::uint64_t r1 = rng_();
    std::uint64_t r2 = rng_();
    double u1 = 1.0 - static_cast<double>(r1 >> 11) * 0x1.0p-53;  // (0, 1]
    double u2 = static_cast<double>(r2 >> 11) * 0x1.0p-53;        // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double NoiseStream::wiener_increment(double dt) {
    if (!(dt > 0.0)) throw std::domain_error("wiener_increment: dt must be > 0");
    return gaussian() * std::sqrt(dt);
}

void TimeGrid::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("TimeGrid: dt must be > 0");
    if (n_steps == 0) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
    if (!std::isfinite(t0) || !std::isfinite(t1()))
        throw std::invalid_argument("TimeGrid: times must be finite");
}

TimeGrid TimeGrid::from_range(double t0, double t1, std::size_t n_steps) {
    if (n_steps == 0) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
    if (!(t1 > t0)) throw std::invalid_argument("TimeGrid: t1 must exceed t0");
    TimeGrid g{t0, (t1 - t0) / static_cast<double>(n_steps), n_steps};
    g.validate();
    return g;
}

void MeasurementRecord::write_csv(std::ostream& os) const {
    os << "t,dy_s\n";
    char buf[80];
    for (std::size_t i = 0; i < dy.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", t[i], dy[i]);
        os << buf;
    }
}

namespace {

void check_finite(const StateVec& v, std::size_t step, const char* who) {
    for (double x : v)
        if (!std::isfinite(x))
            throw NumericalError(std::string(who) + ": non-finite derivative at step " +
                                 std::to_string(step));
}

} // namespace

std::vector<StateVec> integrate_ode(const OdeRhs& f, const StateVec& y0, const TimeGrid& grid) {
    grid.validate();
    const std::size_t n = y0.size();
    std::vector<StateVec> out;
    out.reserve(grid.n_steps + 1);
    out.push_back(y0);

    StateVec y = y0, k1(n), k2(n), k3(n), k4(n), tmp(n);
    const double h = grid.dt;
    for (std::size_t i = 0; i < grid.n_steps; ++i) {
        const double t = grid.time(i);
        f(t, y, k1);
        check_finite(k1, i, "integrate_ode");
        for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
        f(t + 0.5 * h, tmp, k2);
        check_finite(k2, i, "integrate_ode");
        for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
        f(t + 0.5 * h, tmp, k3);
        check_finite(k3, i, "integrate_ode");
        for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + h * k3[j];
        f(t + h, tmp, k4);
        check_finite(k4, i, "integrate_ode");
        for (std::size_t j = 0; j < n; ++j)
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        out.push_back(y);
    }
    return out;
}

SdeResult integrate_sde(const OdeRhs& drift, const OdeRhs& diffusion, const StateVec& y0,
                        const TimeGrid& grid, NoiseStream& stream, const SignalDrift& signal) {
    grid.validate();
    const std::size_t n = y0.size();
    SdeResult res;
    res.series.reserve(grid.n_steps + 1);
    res.series.push_back(y0);
    res.record.t.reserve(grid.n_steps);
    res.record.dy.reserve(grid.n_steps);

    StateVec y = y0, a(n), b(n);
    const double h = grid.dt;
    for (std::size_t i = 0; i < grid.n_steps; ++i) {
        const double t = grid.time(i);
        drift(t, y, a);
        check_finite(a, i, "integrate_sde");
        diffusion(t, y, b);
        check_finite(b, i, "integrate_sde");
        const double dW = stream.wiener_increment(h);
        const double dy_s = signal ? dW + signal(t, y) * h : dW;
        res.record.t.push_back(t);
        res.record.dy.push_back(dy_s);
        for (std::size_t j = 0; j < n; ++j) y[j] += a[j] * h + b[j] * dW;
        res.series.push_back(y);
    }
    return res;
}

} // namespace squeeze
