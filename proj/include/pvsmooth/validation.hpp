#pragma once

#include "pvsmooth/formulation.hpp"

#include <limits>
#include <map>
#include <string>

namespace pvsmooth {

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DispatchSpecs {
    BatterySpec battery;
    DieselSpec diesel;
    EconomicParams econ;
};

struct ConstraintResidual {
    double max_residual = 0.0;
    long worst_step = -1;
    double tolerance = 1e-6;
};

/// Residual names: balance, ramp, soc-recursion, soc-bounds, power-bounds,
/// grid-cap, fuel-cap.
struct ValidationReport {
    std::map<std::string, ConstraintResidual> residuals;
    bool pass = true;

    const ConstraintResidual& operator[](const std::string& name) const { return residuals.at(name); }
};

/// Re-checks every constraint from the raw series, without touching the LP.
ValidationReport check_dispatch(const DispatchSolution& sol, const PowerSeries& pv, const ConstraintConfig& cfg,
                                const DispatchSpecs& specs, double tolerance = 1e-6);

/// Objective of a dispatch recomputed from the economic factors.
double evaluate_net_benefit(CaseId id, const DispatchSolution& sol, const DispatchSpecs& specs,
                            const ConstraintConfig& cfg);

struct OracleGrid {
    double power_step_kw = 10.0;
    double energy_step_kwh = 10.0;
    /// Half-width of the search box for P_b, P_c and P_D.
    double radius_kw = 100.0;
};

struct OracleResult {
    double objective = -std::numeric_limits<double>::infinity();
    DispatchSolution dispatch;
    std::size_t evaluated = 0;
    bool feasible = false;
};

/// Exhaustive search over grid-valued dispatches for horizons of at most 4 steps.
OracleResult brute_force_optimum(CaseId id, const PowerSeries& pv, const DispatchSpecs& specs,
                                 const ConstraintConfig& cfg, const OracleGrid& grid);

/// Objective change bound for moving every dispatch variable by one grid step.
double oracle_lipschitz_bound(CaseId id, std::size_t steps, const DispatchSpecs& specs, const ConstraintConfig& cfg,
                              const OracleGrid& grid);

struct CaseRow {
    CaseId case_id = CaseId::A;
    double net_benefit = 0.0;
    double decrement = 0.0; // (baseline - net) / baseline
    double p_batt_max = 0.0;
    double e_batt_max = 0.0;
    double p_diesel_max = 0.0;
    double max_curtailed = 0.0;
    bool has_curtailment = false;
    bool has_diesel = false;
};

struct CaseComparison {
    double baseline_net_benefit = 0.0;
    std::vector<CaseRow> rows;

    const CaseRow* find(CaseId id) const;
};

class NestingViolation : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Table-shaped comparison against the unsmoothed baseline. Throws
/// NestingViolation when A <= B <= D or A <= C <= D fails beyond
/// `relative_tolerance` for cases present in `results`.
CaseComparison compare_cases(const std::vector<DispatchSolution>& results, const DispatchSolution& baseline,
                             double relative_tolerance = 1e-6);

} // namespace pvsmooth
