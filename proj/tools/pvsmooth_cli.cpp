#include "pvsmooth/pipeline.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace pvsmooth;

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
};

RunConfig load(const std::string& path, const Overrides& o, const Logger& log) {
    RunConfig cfg = load_config(path);
    if (o.seed) {
        if (cfg.weather.kind == WeatherSource::Kind::Synthetic) cfg.weather.seed = *o.seed;
        else log.warn("--seed ignored: weather comes from a file");
    }
    if (o.output_dir) cfg.output_dir = *o.output_dir;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sizing and dispatch of PV output smoothing with battery, curtailment and diesel"};
    app.require_subcommand(1);

    Overrides overrides;
    std::uint64_t seed = 0;
    std::string output_dir;
    auto add_overrides = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "Seed for the synthetic weather trace");
        sub->add_option("--output-dir", output_dir, "Directory for generated files");
    };

    std::string config_path, csv_path, case_name, mps_out;

    auto* run_cmd = app.add_subcommand("run", "Solve the configured cases and write reports");
    run_cmd->add_option("config", config_path, "Run configuration (JSON)")->required();
    add_overrides(run_cmd);

    auto* select_cmd = app.add_subcommand("battery-select", "Rank the configured battery specs");
    select_cmd->add_option("config", config_path, "Run configuration (JSON)")->required();
    add_overrides(select_cmd);

    auto* mps_cmd = app.add_subcommand("export-mps", "Write one case's linear program as fixed-format MPS");
    mps_cmd->add_option("config", config_path, "Run configuration (JSON)")->required();
    mps_cmd->add_option("--case", case_name, "A, B, C, D or baseline")->required();
    mps_cmd->add_option("-o,--output", mps_out, "MPS file (default: <output_dir>/case_<X>.mps)");
    add_overrides(mps_cmd);

    auto* val_cmd = app.add_subcommand("validate", "Re-check a dispatch CSV against the constraints");
    val_cmd->add_option("dispatch", csv_path, "dispatch.csv written by run")->required()->check(CLI::ExistingFile);
    val_cmd->add_option("config", config_path, "Run configuration (JSON)")->required();
    add_overrides(val_cmd);

    CLI11_PARSE(app, argc, argv);

    const Logger log(std::cerr, log_level_from_env());
    for (auto* sub : {run_cmd, select_cmd, mps_cmd, val_cmd}) {
        if (sub->count("--seed")) overrides.seed = seed;
        if (sub->count("--output-dir")) overrides.output_dir = output_dir;
    }

    try {
        const RunConfig cfg = load(config_path, overrides, log);
        if (*run_cmd) return run(cfg, log);
        if (*select_cmd) return battery_select(cfg, log);
        if (*mps_cmd) {
            const auto id = parse_case_id(case_name);
            if (!id) {
                log.error("--case: unknown case '" + case_name + "' (A, B, C, D, baseline)");
                return 2;
            }
            return export_mps(cfg, *id, mps_out.empty() ? std::nullopt : std::optional<std::filesystem::path>(mps_out),
                              log);
        }
        if (*val_cmd) return validate_dispatch_file(csv_path, cfg, log, std::cout);
    } catch (const ConfigError& e) {
        log.error("config: " + std::string(e.what()));
        return 2;
    } catch (const std::exception& e) {
        log.error(e.what());
        return 2;
    }
    return 2;
}
