#ifndef SQUEEZE_STOCHASTIC_HPP
#define SQUEEZE_STOCHASTIC_HPP

#include <cstdint>
#include <functional>
#include <ostream>
#include <random>
#include <vector>

namespace squeeze {

// Seeded Gaussian noise source. One stream per trajectory; identical
// (seed, stream_id) always reproduces the same increment sequence.
// Box-Muller on top of mt19937_64 so every call consumes a fixed number
// of raw draws regardless of call pattern.
class NoiseStream {
  public:
    explicit NoiseStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    // Standard normal sample.
    double gaussian();

    // N(0, dt) sample; throws std::domain_error for dt <= 0.
    double wiener_increment(double dt);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

  private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::mt19937_64 rng_;
};

// Uniform fixed-step time grid: t_i = t0 + i*dt, i = 0..n_steps.
struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.0;
    std::size_t n_steps = 0;

    double t1() const { return t0 + dt * static_cast<double>(n_steps); }
    double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    void validate() const;  // throws std::invalid_argument

    static TimeGrid from_range(double t0, double t1, std::size_t n_steps);
};

// Homodyne record: integrated signal increments dy_s on a time grid.
struct MeasurementRecord {
    std::vector<double> t;   // interval start times
    std::vector<double> dy;  // signal increment over [t_i, t_i + dt)

    std::size_t size() const { return dy.size(); }
    void write_csv(std::ostream& os) const;  // columns t,dy_s
};

using StateVec = std::vector<double>;
// f(t, y, dydt): writes the derivative into dydt (same size as y).
using OdeRhs = std::function<void(double, const StateVec&, StateVec&)>;

// Classic fixed-step 4th-order Runge-Kutta. Returns the state at every grid
// point including t0 (n_steps + 1 entries). Throws NumericalError with the
// step index if a derivative goes non-finite.
std::vector<StateVec> integrate_ode(const OdeRhs& f, const StateVec& y0, const TimeGrid& grid);

// Optional drift of the recorded signal relative to the Wiener increment:
// dy_s = dW + signal(t, y) * dt. Null means dy_s = dW.
using SignalDrift = std::function<double(double, const StateVec&)>;

struct SdeResult {
    std::vector<StateVec> series;
    MeasurementRecord record;
};

// Euler-Maruyama with a single driving Wiener process:
//   y += f(t,y) dt + g(t,y) dW,   dW ~ N(0, dt).
SdeResult integrate_sde(const OdeRhs& drift, const OdeRhs& diffusion, const StateVec& y0,
                        const TimeGrid& grid, NoiseStream& stream,
                        const SignalDrift& signal = nullptr);

} // namespace squeeze

#endif
