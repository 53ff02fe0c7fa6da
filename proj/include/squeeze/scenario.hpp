#ifndef SQUEEZE_SCENARIO_HPP
#define SQUEEZE_SCENARIO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "squeeze/params.hpp"
#include "squeeze/stochastic.hpp"

namespace squeeze {

enum class Scenario { Checks, Fig2, Trajectory, ExactVsGaussian, SignalPdf, Sweep };
enum class OutputFormat { Csv, Json };

struct SweepSpec {
    std::string axis;
    std::vector<double> values;
};

// Parsed scenario file (INI-style sections, see configs/ for canonical
// examples). Unknown keys are rejected.
struct ScenarioConfig {
    Scenario scenario = Scenario::Checks;
    PhysicalParams params;

    TimeGrid grid;
    bool grid_set = false;

    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t n_trajectories = 0;

    std::string output_dir = "out";
    OutputFormat format = OutputFormat::Csv;
    std::size_t output_stride = 0;  // 0 = choose automatically

    // fig2 extras
    double singlepass_t1 = 8.0;
    std::size_t singlepass_steps = 400000;

    // signal_pdf extras
    double pdf_time = 0.0;
    std::size_t pdf_points = 801;

    SweepSpec sweep;

    std::string config_text;  // raw file contents (hashed into output headers)
    std::uint64_t config_hash = 0;
};

ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig parse_config_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& text);

// Runs the scenario, writing output files under cfg.output_dir. Throws
// ConfigError / std::invalid_argument for bad input (CLI exit 1) and
// NumericalError for integration failures (CLI exit 2).
void run_scenario(const ScenarioConfig& cfg);

} // namespace squeeze

#endif
