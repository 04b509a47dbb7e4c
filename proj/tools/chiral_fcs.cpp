// chiral-fcs: run one experiment from a config file or a named preset.
//
// Exit status: 0 success, 1 more than 10% of grid points failed,
// 2 usage or configuration error, 3 other runtime error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "chiral_fcs/config.hpp"
#include "chiral_fcs/runner.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 3;

int usage_error(const std::string& msg) {
    std::cerr << "chiral-fcs: usage error: " << msg << '\n';
    return kUsageError;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace chiral_fcs;

    CLI::App app{"Photon counting statistics of a chiral atom chain"};
    app.set_version_flag("--version", std::string(CHIRAL_FCS_VERSION));
    std::string experiment;
    std::string config_path;
    std::string preset_name;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out_dir;

    app.add_option("experiment", experiment, "scgf-sweep | biased-state | trajectory | photocurrent | dark-state-check")
        ->required();
    auto* cfg_opt = app.add_option("--config", config_path, "JSON configuration file");
    auto* preset_opt = app.add_option("--preset", preset_name, "fig2 | fig3 | fig4 (bypasses --config)");
    cfg_opt->excludes(preset_opt);
    app.add_option("--seed", seed, "master seed for trajectory experiments");
    app.add_option("--workers", workers, "parallel workers")->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    RunConfig cfg;
    try {
        if (!preset_name.empty()) {
            cfg = preset(preset_name, experiment);
        } else if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) return usage_error("cannot open config file " + config_path);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::parse_error& e) {
                return usage_error("config: " + std::string(e.what()));
            }
            cfg = parse_config(j, experiment);
        } else {
            return usage_error("one of --config or --preset is required");
        }
        if (seed) cfg.seed = *seed;
        if (workers) cfg.workers = *workers;
        if (out_dir) cfg.output_dir = *out_dir;
        cfg = parse_config(to_json(cfg), experiment);  // re-validate after overrides
    } catch (const ConfigError& e) {
        return usage_error(e.what());
    }

    try {
        return runner::run(cfg, std::cerr).exit_code;
    } catch (const ConfigError& e) {
        return usage_error(e.what());
    } catch (const std::exception& e) {
        std::cerr << "chiral-fcs: error: " << e.what() << '\n';
        return kRuntimeError;
    }
}
