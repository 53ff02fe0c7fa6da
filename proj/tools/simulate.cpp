#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "squeeze/errors.hpp"
#include "squeeze/scenario.hpp"
#include "squeeze/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{std::string(squeeze::kToolName) +
                 ": measurement-induced spin squeezing in an optical cavity"};
    app.set_version_flag("--version", std::string(squeeze::kToolVersion));

    std::string config_path;
    app.add_option("config", config_path, "scenario config file (INI-style)")->required();
    std::string out_dir;
    app.add_option("--out", out_dir, "override output directory");
    std::string format;
    app.add_option("--format", format, "override output format")
        ->check(CLI::IsMember({"csv", "json"}));
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "override the random seed");

    CLI11_PARSE(app, argc, argv);

    try {
        squeeze::ScenarioConfig cfg = squeeze::parse_config_file(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (!format.empty())
            cfg.format = format == "json" ? squeeze::OutputFormat::Json
                                          : squeeze::OutputFormat::Csv;
        if (seed_opt->count() > 0) {
            cfg.seed = seed;
            cfg.seed_set = true;
        }
        squeeze::run_scenario(cfg);
        return 0;
    } catch (const squeeze::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const squeeze::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
