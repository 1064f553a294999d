#pragma once

#include "pvsmooth/economics.hpp"
#include "pvsmooth/formulation.hpp"
#include "pvsmooth/lp/simplex.hpp"
#include "pvsmooth/timeseries_pv.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pvsmooth {

/// Carries the dotted field path of the offending entry, e.g.
/// "constraints.fluctuation_limit".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct WeatherSource {
    enum class Kind { File, Synthetic };
    Kind kind = Kind::Synthetic;
    std::filesystem::path path; // resolved against the config file's directory
    int days = 3;
    std::uint64_t seed = 7;
    double variability = 0.8;
    double step_hours = 1.0 / 6.0; // synthetic only; files carry their own step
    double low_irradiance_threshold = 2.0;
};

struct RunConfig {
    WeatherSource weather;
    PvPlantSpec plant;
    /// First entry drives the A-D cases; every entry takes part in battery-select.
    std::vector<BatterySpec> batteries{BatterySpec{}};
    DieselSpec diesel;
    EconomicParams econ;
    ConstraintConfig constraints;
    /// Annualization from the weather span (8760 h / span) unless given.
    bool annualization_auto = true;
    std::vector<CaseId> cases;
    bool battery_select = false;
    std::filesystem::path output_dir = "out";
    lp::SolverOptions solver;
    double validation_tolerance = 1e-6;

    const BatterySpec& battery() const { return batteries.front(); }
};

std::filesystem::path default_preset_dir();

BatterySpec load_battery_preset(const std::string& name, const std::filesystem::path& preset_dir);
DieselSpec load_diesel_preset(const std::string& name, const std::filesystem::path& preset_dir);

/// `base_dir` resolves relative paths (weather file, output_dir, preset files).
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

} // namespace pvsmooth
