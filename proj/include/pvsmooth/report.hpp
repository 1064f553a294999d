#pragma once

#include "pvsmooth/formulation.hpp"
#include "pvsmooth/validation.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace pvsmooth {

class ReportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest text that reads back to the same double; -0 prints as 0.
std::string format_number(double value);

/// One row per retained step: step,p_pv,p_grid,p_batt,e_batt,p_curt,p_diesel.
/// `step` is the original sample index; series absent from the case are empty cells.
std::string dispatch_csv(const DispatchSolution& sol);

struct ParsedDispatch {
    std::vector<std::size_t> step;
    std::vector<double> p_pv, p_grid, p_batt, e_batt, p_curt, p_diesel;
    bool has_curtailment = false;
    bool has_diesel = false;
};

ParsedDispatch parse_dispatch_csv(const std::string& text, const std::string& source_name = "<memory>");

struct CaseSummary {
    CaseId case_id = CaseId::A;
    std::string status;
    std::string battery;
    std::size_t steps = 0;
    std::int64_t iterations = 0;
    double net_benefit = 0.0;
    double p_batt_max = 0.0;
    double e_batt_max = 0.0;
    double p_diesel_max = 0.0;
    double diesel_energy = 0.0;
    double e_diesel_max = 0.0;
    double max_curtailed = 0.0;
    bool validation_pass = false;
};

nlohmann::ordered_json summary_json(const CaseSummary& s);
CaseSummary summary_from_json(const nlohmann::json& doc);
nlohmann::ordered_json validation_json(const ValidationReport& rep);

nlohmann::ordered_json comparison_json(const CaseComparison& cmp);
/// Aligned plain-text table, one column per case.
std::string comparison_table(const CaseComparison& cmp);

struct BatteryRank {
    std::string name;
    std::string status;
    double net_benefit = 0.0;
    double imposed_cost_pct = 0.0; // (net - baseline) / baseline * 100
    double p_batt_max = 0.0;
    double e_batt_max = 0.0;
};

nlohmann::ordered_json battery_select_json(const std::vector<BatteryRank>& ranks, double baseline_net_benefit);
std::string battery_select_table(const std::vector<BatteryRank>& ranks);

/// JSON text with a trailing newline, stable key order and number format.
std::string dump(const nlohmann::ordered_json& doc);

} // namespace pvsmooth
