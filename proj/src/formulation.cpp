#include "pvsmooth/formulation.hpp"

#include <cmath>
#include <limits>

namespace pvsmooth {

namespace {

using lp::Index;
using lp::Relation;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string label(const char* prefix, std::size_t t) { return prefix + std::to_string(t); }

} // namespace

std::string_view to_string(CaseId id) {
    switch (id) {
    case CaseId::A: return "A";
    case CaseId::B: return "B";
    case CaseId::C: return "C";
    case CaseId::D: return "D";
    case CaseId::Baseline: return "baseline";
    }
    return "?";
}

std::optional<CaseId> parse_case_id(std::string_view text) {
    if (text == "A" || text == "a") return CaseId::A;
    if (text == "B" || text == "b") return CaseId::B;
    if (text == "C" || text == "c") return CaseId::C;
    if (text == "D" || text == "d") return CaseId::D;
    if (text == "baseline") return CaseId::Baseline;
    return std::nullopt;
}

void ConstraintConfig::validate() const {
    if (!(fluctuation_limit > 0.0)) throw FormulationError("constraints.fluctuation_limit must be positive");
    if (!(step_hours > 0.0) || !std::isfinite(step_hours))
        throw FormulationError("constraints.step_hours must be positive");
    if (!(grid_cap > 0.0)) throw FormulationError("constraints.grid_cap must be positive");
    if (initial_soc_mode == InitialSocMode::FixedFraction && !(initial_soc_fraction >= 0.0 && initial_soc_fraction <= 1.0))
        throw FormulationError("constraints.initial_soc_fraction must lie in [0, 1]");
    if (!(annualization > 0.0) || !std::isfinite(annualization))
        throw FormulationError("constraints.annualization must be positive");
}

std::optional<lp::Index> IndexMap::column(std::string_view series, std::size_t step) const {
    const std::vector<lp::Index>* v = nullptr;
    if (series == "p_grid") v = &p_grid;
    else if (series == "p_batt") v = &p_batt;
    else if (series == "e_batt") v = &e_batt;
    else if (series == "p_curt") v = &p_curt;
    else if (series == "p_diesel") v = &p_diesel;
    if (!v || step >= v->size()) return std::nullopt;
    return (*v)[step];
}

std::optional<lp::Index> IndexMap::column(std::string_view sizing) const {
    lp::Index j = -1;
    if (sizing == "p_batt_max") j = p_batt_max;
    else if (sizing == "e_batt_max") j = e_batt_max;
    else if (sizing == "p_diesel_max") j = p_diesel_max;
    if (j < 0) return std::nullopt;
    return j;
}

ObjectiveWeights objective_weights(CaseId id, const BatterySpec& battery, const DieselSpec& diesel,
                                   const EconomicParams& econ, const ConstraintConfig& cfg) {
    const double h = cfg.step_hours;
    const double rm = revenue_multiplier(econ);
    const bool hybrid = id == CaseId::B || id == CaseId::C || id == CaseId::D;
    const bool literal = hybrid && cfg.paper_literal_eq12;

    ObjectiveWeights w;
    w.grid_energy = econ.energy_price * h * cfg.annualization * rm;
    w.battery_power = (literal ? battery.capital_power : battery_power_pw(battery, econ)) / battery.eff_power;
    w.battery_energy = (literal ? battery.capital_energy : battery_energy_pw(battery, econ)) / battery.eff_energy;
    if (has_diesel(id)) {
        w.diesel_power = diesel_power_pw(diesel, econ) / diesel.efficiency;
        const double fuel_years = literal ? 1.0 : rm;
        w.diesel_energy = h * diesel.fuel_per_kwh * diesel.fuel_price * cfg.annualization * fuel_years;
        const double annual_cap_kwh = diesel.annual_fuel_cap_liters / diesel.fuel_per_kwh;
        if (cfg.emission_model == EmissionModel::Lumped) {
            w.constant = -diesel.emission_charge_total;
        } else if (annual_cap_kwh > 0.0) {
            w.diesel_energy += h * cfg.annualization * diesel.emission_charge_total / annual_cap_kwh;
        }
        w.e_diesel_max = annual_cap_kwh / cfg.annualization;
    }
    return w;
}

CaseFormulation build_case(CaseId id, const PowerSeries& pv, const BatterySpec& battery, const DieselSpec& diesel,
                           const EconomicParams& econ, const ConstraintConfig& cfg) {
    cfg.validate();
    battery.validate();
    econ.validate();
    if (has_diesel(id)) diesel.validate();
    if (!(pv.step_hours > 0.0)) throw FormulationError("power series step must be positive");
    if (std::abs(pv.step_hours - cfg.step_hours) > 1e-9 * cfg.step_hours)
        throw FormulationError("power series step does not match constraints.step_hours");

    CaseFormulation f;
    f.case_id = id;
    f.horizon = make_horizon(pv);
    const auto& hz = f.horizon;
    const std::size_t n = hz.size();
    if (n < 2) throw FormulationError("optimization horizon needs at least 2 retained steps, got " + std::to_string(n));
    for (double p : hz.p_pv)
        if (!std::isfinite(p) || p < 0.0) throw FormulationError("PV power must be finite and non-negative");

    f.weights = objective_weights(id, battery, diesel, econ, cfg);
    const auto& w = f.weights;
    const double h = cfg.step_hours;
    const double limit = id == CaseId::Baseline ? kInf : cfg.fluctuation_limit;
    const bool curtail = has_curtailment(id);
    const bool diesel_on = has_diesel(id);

    lp::ProblemBuilder<double> b(lp::Sense::Maximize);
    auto& ix = f.index_map;
    for (std::size_t t = 0; t < n; ++t) ix.p_grid.push_back(b.add_column(label("PG", t), 0.0, cfg.grid_cap, w.grid_energy));
    for (std::size_t t = 0; t < n; ++t) ix.p_batt.push_back(b.add_column(label("PB", t), -kInf, kInf));
    for (std::size_t t = 0; t < n; ++t) ix.e_batt.push_back(b.add_column(label("EB", t), 0.0, kInf));
    if (curtail)
        for (std::size_t t = 0; t < n; ++t) ix.p_curt.push_back(b.add_column(label("PC", t), 0.0, hz.p_pv[t]));
    if (diesel_on)
        for (std::size_t t = 0; t < n; ++t)
            ix.p_diesel.push_back(b.add_column(label("PD", t), 0.0, kInf, -w.diesel_energy));
    ix.p_batt_max = b.add_column("PBMAX", 0.0, kInf, -w.battery_power);
    ix.e_batt_max = b.add_column("EBMAX", 0.0, kInf, -w.battery_energy);
    if (diesel_on) ix.p_diesel_max = b.add_column("PDMAX", 0.0, kInf, -w.diesel_power);
    b.add_offset(w.constant);

    for (std::size_t t = 0; t < n; ++t) {
        // P_G - P_b + P_c - P_D = P_PV
        std::vector<std::pair<Index, double>> e{{ix.p_grid[t], 1.0}, {ix.p_batt[t], -1.0}};
        if (curtail) e.emplace_back(ix.p_curt[t], 1.0);
        if (diesel_on) e.emplace_back(ix.p_diesel[t], -1.0);
        b.add_row(label("BAL", t), std::move(e), Relation::Equal, hz.p_pv[t]);
    }
    if (std::isfinite(limit)) {
        for (std::size_t t = 1; t < n; ++t) {
            if (hz.block_start[t]) continue;
            b.add_row(label("RUP", t), {{ix.p_grid[t], 1.0}, {ix.p_grid[t - 1], -1.0}}, Relation::LessEqual, limit);
            b.add_row(label("RDN", t), {{ix.p_grid[t], 1.0}, {ix.p_grid[t - 1], -1.0}}, Relation::GreaterEqual, -limit);
        }
    }
    for (std::size_t t = 1; t < n; ++t)
        b.add_row(label("SOC", t), {{ix.e_batt[t], 1.0}, {ix.e_batt[t - 1], -1.0}, {ix.p_batt[t - 1], h}},
                  Relation::Equal, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        b.add_row(label("SLO", t), {{ix.e_batt[t], 1.0}, {ix.e_batt_max, -battery.soc_min_fraction}},
                  Relation::GreaterEqual, 0.0);
        b.add_row(label("SHI", t), {{ix.e_batt[t], 1.0}, {ix.e_batt_max, -1.0}}, Relation::LessEqual, 0.0);
        b.add_row(label("PBH", t), {{ix.p_batt[t], 1.0}, {ix.p_batt_max, -1.0}}, Relation::LessEqual, 0.0);
        b.add_row(label("PBL", t), {{ix.p_batt[t], 1.0}, {ix.p_batt_max, 1.0}}, Relation::GreaterEqual, 0.0);
    }
    if (cfg.initial_soc_mode == InitialSocMode::FixedFraction)
        b.add_row("INIT", {{ix.e_batt[0], 1.0}, {ix.e_batt_max, -cfg.initial_soc_fraction}}, Relation::Equal, 0.0);
    if (cfg.cyclic_soc)
        // Energy left after the last step is at least the starting energy.
        b.add_row("CYC", {{ix.e_batt[n - 1], 1.0}, {ix.p_batt[n - 1], -h}, {ix.e_batt[0], -1.0}},
                  Relation::GreaterEqual, 0.0);
    if (diesel_on) {
        std::vector<std::pair<Index, double>> fuel;
        for (std::size_t t = 0; t < n; ++t) {
            b.add_row(label("PDH", t), {{ix.p_diesel[t], 1.0}, {ix.p_diesel_max, -1.0}}, Relation::LessEqual, 0.0);
            fuel.emplace_back(ix.p_diesel[t], h);
        }
        b.add_row("FUEL", std::move(fuel), Relation::LessEqual, w.e_diesel_max);
    }
    f.problem = b.build();
    return f;
}

CaseFormulation build_case_a(const PowerSeries& pv, const BatterySpec& battery, const EconomicParams& econ,
                             const ConstraintConfig& cfg) {
    return build_case(CaseId::A, pv, battery, DieselSpec{}, econ, cfg);
}

CaseFormulation build_case_b(const PowerSeries& pv, const BatterySpec& battery, const EconomicParams& econ,
                             const ConstraintConfig& cfg) {
    return build_case(CaseId::B, pv, battery, DieselSpec{}, econ, cfg);
}

CaseFormulation build_case_c(const PowerSeries& pv, const BatterySpec& battery, const DieselSpec& diesel,
                             const EconomicParams& econ, const ConstraintConfig& cfg) {
    return build_case(CaseId::C, pv, battery, diesel, econ, cfg);
}

CaseFormulation build_case_d(const PowerSeries& pv, const BatterySpec& battery, const DieselSpec& diesel,
                             const EconomicParams& econ, const ConstraintConfig& cfg) {
    return build_case(CaseId::D, pv, battery, diesel, econ, cfg);
}

DispatchSolution extract_solution(const CaseFormulation& f, const lp::LpSolution<double>& s) {
    if (s.status != lp::Status::Optimal)
        throw FormulationError("case " + std::string(to_string(f.case_id)) + ": solver status " +
                               std::string(lp::to_string(s.status)));
    if (s.x.size() != f.problem.n_vars()) throw FormulationError("solution size does not match the formulation");

    const auto& ix = f.index_map;
    auto gather = [&](const std::vector<lp::Index>& cols) {
        std::vector<double> out;
        out.reserve(cols.size());
        for (auto j : cols) out.push_back(s.x[j]);
        return out;
    };
    DispatchSolution d;
    d.case_id = f.case_id;
    d.sample_index = f.horizon.sample_index;
    d.p_pv = f.horizon.p_pv;
    d.p_grid = gather(ix.p_grid);
    d.p_batt = gather(ix.p_batt);
    d.e_batt = gather(ix.e_batt);
    d.p_curt = gather(ix.p_curt);
    d.p_diesel = gather(ix.p_diesel);
    d.p_batt_max = s.x[ix.p_batt_max];
    d.e_batt_max = s.x[ix.e_batt_max];
    d.p_diesel_max = ix.p_diesel_max >= 0 ? s.x[ix.p_diesel_max] : 0.0;
    d.net_benefit = s.objective_value;
    for (double p : d.p_diesel) d.diesel_energy += p * f.horizon.step_hours;
    d.e_diesel_max_cap = f.weights.e_diesel_max;
    return d;
}

DispatchSolution solve_case(CaseId id, const PowerSeries& pv, const BatterySpec& battery, const DieselSpec& diesel,
                            const EconomicParams& econ, const ConstraintConfig& cfg,
                            const lp::SolverOptions& options) {
    const auto f = build_case(id, pv, battery, diesel, econ, cfg);
    const auto s = lp::solve(f.problem, options);
    return extract_solution(f, s);
}

} // namespace pvsmooth
