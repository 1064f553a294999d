#pragma once

#include "pvsmooth/economics.hpp"
#include "pvsmooth/lp/problem.hpp"
#include "pvsmooth/lp/simplex.hpp"
#include "pvsmooth/timeseries_pv.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pvsmooth {

class FormulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A: battery only. B: battery + curtailment. C: battery + diesel.
/// D: battery + diesel + curtailment. Baseline: case A with no ramp limit.
enum class CaseId { A, B, C, D, Baseline };

std::string_view to_string(CaseId id);
std::optional<CaseId> parse_case_id(std::string_view text);

constexpr bool has_curtailment(CaseId id) { return id == CaseId::B || id == CaseId::D; }
constexpr bool has_diesel(CaseId id) { return id == CaseId::C || id == CaseId::D; }

enum class InitialSocMode { FreeBounded, FixedFraction };

/// How the lumped emission charge enters the objective.
enum class EmissionModel {
    /// Charged per diesel kWh so that running at the annual fuel cap for the
    /// whole study costs exactly the lumped total.
    ProratedToFuelCap,
    /// Constant offset, independent of dispatch.
    Lumped,
};

struct ConstraintConfig {
    double fluctuation_limit = 150.0; // kW per step; +inf drops the ramp rows
    double step_hours = 1.0 / 6.0;
    double grid_cap = 10000.0;        // kW
    InitialSocMode initial_soc_mode = InitialSocMode::FreeBounded;
    double initial_soc_fraction = 0.5;
    bool cyclic_soc = true;
    /// Multiplier from horizon energy to annual energy (8760 / horizon hours).
    double annualization = 1.0;
    /// Hybrid cases B-D only: raw C_P, C_E battery prices and an undiscounted
    /// fuel term instead of present-worth factors.
    bool paper_literal_eq12 = false;
    EmissionModel emission_model = EmissionModel::ProratedToFuelCap;

    void validate() const;
};

/// Per-unit objective weights of one case, all in $ (maximize sense).
struct ObjectiveWeights {
    double grid_energy = 0.0;  // per kW of P_G per step
    double battery_power = 0.0; // per kW of P_bMAX
    double battery_energy = 0.0; // per kWh of E_bMAX
    double diesel_power = 0.0;  // per kW of P_DMAX
    double diesel_energy = 0.0; // per kW of P_D per step (fuel + prorated emission)
    double constant = 0.0;      // lumped emission charge, as a negative offset
    double e_diesel_max = 0.0;  // kWh over the horizon
};

ObjectiveWeights objective_weights(CaseId id, const BatterySpec& battery, const DieselSpec& diesel,
                                   const EconomicParams& econ, const ConstraintConfig& cfg);

/// Column indices of the decision symbols. Series absent from a case are empty;
/// absent sizing columns are -1.
struct IndexMap {
    std::vector<lp::Index> p_grid, p_batt, e_batt, p_curt, p_diesel;
    lp::Index p_batt_max = -1;
    lp::Index e_batt_max = -1;
    lp::Index p_diesel_max = -1;

    /// Named lookup: series "p_grid", "p_batt", "e_batt", "p_curt", "p_diesel".
    std::optional<lp::Index> column(std::string_view series, std::size_t step) const;
    /// Sizing "p_batt_max", "e_batt_max", "p_diesel_max".
    std::optional<lp::Index> column(std::string_view sizing) const;
};

struct CaseFormulation {
    CaseId case_id = CaseId::A;
    lp::Problem problem;
    IndexMap index_map;
    Horizon horizon;
    ObjectiveWeights weights;
};

struct DispatchSolution {
    CaseId case_id = CaseId::A;
    std::vector<std::size_t> sample_index;
    std::vector<double> p_pv;
    std::vector<double> p_grid;
    std::vector<double> p_batt; // positive = discharge
    std::vector<double> e_batt;
    std::vector<double> p_curt;   // empty unless B/D
    std::vector<double> p_diesel; // empty unless C/D
    double p_batt_max = 0.0;
    double e_batt_max = 0.0;
    double p_diesel_max = 0.0;
    double net_benefit = 0.0;
    double diesel_energy = 0.0;
    double e_diesel_max_cap = 0.0;

    std::size_t size() const { return p_grid.size(); }
};

CaseFormulation build_case(CaseId id, const PowerSeries& pv, const BatterySpec& battery, const DieselSpec& diesel,
                           const EconomicParams& econ, const ConstraintConfig& cfg);

CaseFormulation build_case_a(const PowerSeries& pv, const BatterySpec& battery, const EconomicParams& econ,
                             const ConstraintConfig& cfg);
CaseFormulation build_case_b(const PowerSeries& pv, const BatterySpec& battery, const EconomicParams& econ,
                             const ConstraintConfig& cfg);
CaseFormulation build_case_c(const PowerSeries& pv, const BatterySpec& battery, const DieselSpec& diesel,
                             const EconomicParams& econ, const ConstraintConfig& cfg);
CaseFormulation build_case_d(const PowerSeries& pv, const BatterySpec& battery, const DieselSpec& diesel,
                             const EconomicParams& econ, const ConstraintConfig& cfg);

/// Decodes an optimal solution; throws FormulationError naming the status otherwise.
DispatchSolution extract_solution(const CaseFormulation& f, const lp::LpSolution<double>& s);

/// Build, solve, and decode in one go.
DispatchSolution solve_case(CaseId id, const PowerSeries& pv, const BatterySpec& battery, const DieselSpec& diesel,
                            const EconomicParams& econ, const ConstraintConfig& cfg,
                            const lp::SolverOptions& options = {});

} // namespace pvsmooth
