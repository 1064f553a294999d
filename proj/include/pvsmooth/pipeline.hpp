#pragma once

#include "pvsmooth/config.hpp"
#include "pvsmooth/report.hpp"
#include "pvsmooth/validation.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pvsmooth {

enum class LogLevel { Error, Warn, Info, Debug };

/// Reads PVSMOOTH_LOG_LEVEL (error, warn, info, debug); info when unset.
LogLevel log_level_from_env();

class Logger {
public:
    Logger(std::ostream& out, LogLevel level) : out_(out), level_(level) {}
    void error(const std::string& msg) const { write(LogLevel::Error, "error", msg); }
    void warn(const std::string& msg) const { write(LogLevel::Warn, "warn", msg); }
    void info(const std::string& msg) const { write(LogLevel::Info, "info", msg); }
    void debug(const std::string& msg) const { write(LogLevel::Debug, "debug", msg); }

private:
    void write(LogLevel at, const char* tag, const std::string& msg) const;
    std::ostream& out_;
    LogLevel level_;
};

struct PreparedInputs {
    WeatherSeries weather; // with the low-irradiance mask applied
    PowerSeries pv;
    ConstraintConfig constraints; // step and annualization filled in from the weather
    DispatchSpecs specs;
};

PreparedInputs prepare_inputs(const RunConfig& cfg);

struct CaseRun {
    CaseId case_id = CaseId::A;
    lp::Status status = lp::Status::NumericalError;
    std::int64_t iterations = 0;
    std::optional<DispatchSolution> dispatch;
    std::optional<ValidationReport> report;

    bool ok() const { return status == lp::Status::Optimal && report && report->pass; }
};

CaseRun run_case(CaseId id, const PreparedInputs& in, const BatterySpec& battery, const lp::SolverOptions& options,
                 double validation_tolerance);

CaseSummary summarize(const CaseRun& run, const std::string& battery_name, double e_diesel_max);

/// Case A per battery spec against the shared no-smoothing baseline, ranked
/// by net benefit with ties kept in input order. Unsolved specs go last.
std::vector<BatteryRank> rank_batteries(const RunConfig& cfg, const PreparedInputs& in, double& baseline_net_benefit);

/// Exit code 0 iff every selected case is optimal and passes validation.
int run(const RunConfig& cfg, const Logger& log);
int battery_select(const RunConfig& cfg, const Logger& log);
int export_mps(const RunConfig& cfg, CaseId id, const std::optional<std::filesystem::path>& out_path,
               const Logger& log);

/// Re-checks a dispatch CSV against the weather and constraints of `cfg`.
/// Case and sizing come from a sibling summary.json when present, otherwise
/// they are inferred from the filled columns and the series extremes.
int validate_dispatch_file(const std::filesystem::path& csv, const RunConfig& cfg, const Logger& log,
                           std::ostream& out);

} // namespace pvsmooth
