#include "pvsmooth/validation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace pvsmooth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void track(ConstraintResidual& r, double value, std::size_t step) {
    if (value > r.max_residual) {
        r.max_residual = value;
        r.worst_step = static_cast<long>(step);
    }
}

// Objective weights rebuilt from the raw economic inputs. Kept apart from
// the LP assembly on purpose: the revenue multiplier is a direct sum.
struct Weights {
    double grid_energy = 0.0;
    double battery_power = 0.0;
    double battery_energy = 0.0;
    double diesel_power = 0.0;
    double diesel_energy = 0.0;
    double constant = 0.0;
    double e_diesel_max = 0.0;
};

Weights independent_weights(CaseId id, const DispatchSpecs& specs, const ConstraintConfig& cfg) {
    const auto& econ = specs.econ;
    const auto& bat = specs.battery;
    const auto& dsl = specs.diesel;
    double years = 0.0;
    for (int k = 1; k <= static_cast<int>(std::lround(econ.horizon_years)); ++k)
        years += 1.0 / std::pow(1.0 + econ.discount_rate, k);
    const bool literal = id != CaseId::A && id != CaseId::Baseline && cfg.paper_literal_eq12;

    Weights w;
    w.grid_energy = econ.energy_price * cfg.step_hours * cfg.annualization * years;
    w.battery_power = (literal ? bat.capital_power : battery_power_pw(bat, econ)) / bat.eff_power;
    w.battery_energy = (literal ? bat.capital_energy : battery_energy_pw(bat, econ)) / bat.eff_energy;
    if (has_diesel(id)) {
        const double cap_kwh = dsl.annual_fuel_cap_liters / dsl.fuel_per_kwh;
        w.diesel_power = diesel_power_pw(dsl, econ) / dsl.efficiency;
        w.diesel_energy = cfg.step_hours * cfg.annualization * dsl.fuel_per_kwh * dsl.fuel_price * (literal ? 1.0 : years);
        if (cfg.emission_model == EmissionModel::Lumped) w.constant = -dsl.emission_charge_total;
        else if (cap_kwh > 0.0) w.diesel_energy += cfg.step_hours * cfg.annualization * dsl.emission_charge_total / cap_kwh;
        w.e_diesel_max = cap_kwh / cfg.annualization;
    }
    return w;
}

} // namespace

ValidationReport check_dispatch(const DispatchSolution& sol, const PowerSeries& pv, const ConstraintConfig& cfg,
                                const DispatchSpecs& specs, double tolerance) {
    const Horizon hz = make_horizon(pv);
    const std::size_t n = hz.size();
    const bool curtail = has_curtailment(sol.case_id);
    const bool diesel = has_diesel(sol.case_id);
    if (sol.p_grid.size() != n || sol.p_batt.size() != n || sol.e_batt.size() != n)
        throw ValidationError("dispatch length " + std::to_string(sol.p_grid.size()) + " does not match horizon " +
                              std::to_string(n));
    if ((curtail && sol.p_curt.size() != n) || (!curtail && !sol.p_curt.empty()))
        throw ValidationError("curtailment series length does not match the case");
    if ((diesel && sol.p_diesel.size() != n) || (!diesel && !sol.p_diesel.empty()))
        throw ValidationError("diesel series length does not match the case");

    ValidationReport rep;
    for (const char* name : {"balance", "ramp", "soc-recursion", "soc-bounds", "power-bounds", "grid-cap", "fuel-cap"})
        rep.residuals[name].tolerance = tolerance;
    auto& balance = rep.residuals["balance"];
    auto& ramp = rep.residuals["ramp"];
    auto& soc = rep.residuals["soc-recursion"];
    auto& soc_bounds = rep.residuals["soc-bounds"];
    auto& power = rep.residuals["power-bounds"];
    auto& grid = rep.residuals["grid-cap"];
    auto& fuel = rep.residuals["fuel-cap"];

    const double h = cfg.step_hours;
    const double x_min = specs.battery.soc_min_fraction;
    const double limit = sol.case_id == CaseId::Baseline ? kInf : cfg.fluctuation_limit;

    track(power, std::max({0.0, -sol.p_batt_max, -sol.e_batt_max, -sol.p_diesel_max}), 0);
    double diesel_energy = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double pc = curtail ? sol.p_curt[t] : 0.0;
        const double pd = diesel ? sol.p_diesel[t] : 0.0;
        track(balance, std::abs(sol.p_grid[t] - (hz.p_pv[t] + sol.p_batt[t] - pc + pd)), t);
        if (t > 0 && !hz.block_start[t] && std::isfinite(limit))
            track(ramp, std::abs(sol.p_grid[t] - sol.p_grid[t - 1]) - limit, t);
        if (t > 0) track(soc, std::abs(sol.e_batt[t] - (sol.e_batt[t - 1] - h * sol.p_batt[t - 1])), t);
        track(soc_bounds,
              std::max({0.0, x_min * sol.e_batt_max - sol.e_batt[t], sol.e_batt[t] - sol.e_batt_max, -sol.e_batt[t]}),
              t);
        track(power, std::abs(sol.p_batt[t]) - sol.p_batt_max, t);
        if (curtail) track(power, std::max(-pc, pc - hz.p_pv[t]), t);
        if (diesel) track(power, std::max(-pd, pd - sol.p_diesel_max), t);
        track(grid, std::max(-sol.p_grid[t], sol.p_grid[t] - cfg.grid_cap), t);
        diesel_energy += h * pd;
    }
    if (cfg.initial_soc_mode == InitialSocMode::FixedFraction)
        track(soc_bounds, std::abs(sol.e_batt[0] - cfg.initial_soc_fraction * sol.e_batt_max), 0);
    if (cfg.cyclic_soc) track(soc_bounds, sol.e_batt[0] - (sol.e_batt[n - 1] - h * sol.p_batt[n - 1]), n - 1);
    if (diesel) {
        const double cap = specs.diesel.annual_fuel_cap_liters / specs.diesel.fuel_per_kwh / cfg.annualization;
        track(fuel, diesel_energy - cap, n - 1);
    }

    for (const auto& [name, r] : rep.residuals)
        if (!(r.max_residual <= r.tolerance)) rep.pass = false;
    return rep;
}

double evaluate_net_benefit(CaseId id, const DispatchSolution& sol, const DispatchSpecs& specs,
                            const ConstraintConfig& cfg) {
    const Weights w = independent_weights(id, specs, cfg);
    double grid = 0.0, diesel = 0.0;
    for (double p : sol.p_grid) grid += p;
    for (double p : sol.p_diesel) diesel += p;
    return w.grid_energy * grid - w.battery_power * sol.p_batt_max - w.battery_energy * sol.e_batt_max -
           w.diesel_power * sol.p_diesel_max - w.diesel_energy * diesel + w.constant;
}

OracleResult brute_force_optimum(CaseId id, const PowerSeries& pv, const DispatchSpecs& specs,
                                 const ConstraintConfig& cfg, const OracleGrid& grid) {
    if (!(grid.power_step_kw > 0.0) || !(grid.energy_step_kwh > 0.0) || !(grid.radius_kw >= 0.0))
        throw ValidationError("oracle grid steps must be positive");
    const Horizon hz = make_horizon(pv);
    const std::size_t n = hz.size();
    if (n > 4) throw ValidationError("brute-force oracle is limited to 4 steps, got " + std::to_string(n));
    if (n == 0) throw ValidationError("empty horizon");

    const Weights w = independent_weights(id, specs, cfg);
    const double h = cfg.step_hours;
    const double x_min = specs.battery.soc_min_fraction;
    const double limit = id == CaseId::Baseline ? kInf : cfg.fluctuation_limit;
    const double step = grid.power_step_kw;
    const long kmax = static_cast<long>(std::floor(grid.radius_kw / step + 1e-9));

    // Curtailment and diesel enter the balance through u = P_D - P_c. Using
    // both in one step is dominated (lower both by the smaller one), so a
    // single signed grid value per step covers every useful point.
    const bool curtail = has_curtailment(id);
    const bool diesel = has_diesel(id);

    std::vector<long> kb(n), ku(n);
    std::vector<double> pg(n);
    OracleResult best;
    best.dispatch.case_id = id;

    auto leaf = [&]() {
        ++best.evaluated;
        std::array<double, 4> c{};
        for (std::size_t t = 1; t < n; ++t) c[t] = c[t - 1] - h * kb[t - 1] * step;
        const double c_end = c[n - 1] - h * kb[n - 1] * step;
        if (cfg.cyclic_soc && c_end < -1e-9) return;
        const double cmin = *std::min_element(c.begin(), c.begin() + n);
        const double cmax = *std::max_element(c.begin(), c.begin() + n);
        double e_max = 0.0;
        if (cfg.initial_soc_mode == InitialSocMode::FreeBounded) {
            e_max = (cmax - cmin) / (1.0 - x_min);
        } else {
            const double r = cfg.initial_soc_fraction;
            if (cmin < -1e-12) {
                if (r <= x_min) return;
                e_max = std::max(e_max, -cmin / (r - x_min));
            }
            if (cmax > 1e-12) {
                if (r >= 1.0) return;
                e_max = std::max(e_max, cmax / (1.0 - r));
            }
        }
        e_max = std::ceil(e_max / grid.energy_step_kwh - 1e-9) * grid.energy_step_kwh;
        const double e0 = cfg.initial_soc_mode == InitialSocMode::FreeBounded ? x_min * e_max - cmin
                                                                              : cfg.initial_soc_fraction * e_max;

        double sum_pg = 0.0, sum_pd = 0.0, p_bmax = 0.0, p_dmax = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            sum_pg += pg[t];
            const double pd = std::max(0.0, ku[t] * step);
            sum_pd += pd;
            p_bmax = std::max(p_bmax, std::abs(kb[t] * step));
            p_dmax = std::max(p_dmax, pd);
        }
        if (diesel && h * sum_pd > w.e_diesel_max + 1e-9) return;
        const double obj = w.grid_energy * sum_pg - w.battery_power * p_bmax - w.battery_energy * e_max -
                           w.diesel_power * p_dmax - w.diesel_energy * sum_pd + w.constant;
        if (!best.feasible || obj > best.objective) {
            best.feasible = true;
            best.objective = obj;
            auto& d = best.dispatch;
            d.sample_index = hz.sample_index;
            d.p_pv = hz.p_pv;
            d.p_grid = pg;
            d.p_batt.assign(n, 0.0);
            d.e_batt.assign(n, 0.0);
            d.p_curt.clear();
            d.p_diesel.clear();
            for (std::size_t t = 0; t < n; ++t) {
                d.p_batt[t] = kb[t] * step;
                d.e_batt[t] = e0 + c[t];
                if (curtail) d.p_curt.push_back(std::max(0.0, -ku[t] * step));
                if (diesel) d.p_diesel.push_back(std::max(0.0, ku[t] * step));
            }
            d.p_batt_max = p_bmax;
            d.e_batt_max = e_max;
            d.p_diesel_max = p_dmax;
            d.net_benefit = obj;
            d.diesel_energy = h * sum_pd;
            d.e_diesel_max_cap = w.e_diesel_max;
        }
    };

    std::function<void(std::size_t)> descend = [&](std::size_t t) {
        if (t == n) {
            leaf();
            return;
        }
        const long u_lo = curtail ? -static_cast<long>(std::floor(std::min(hz.p_pv[t], kmax * step) / step + 1e-9)) : 0;
        const long u_hi = diesel ? kmax : 0;
        // Grid power window from the ramp and export limits, as a range of b + u.
        double g_lo = 0.0, g_hi = cfg.grid_cap;
        if (t > 0 && !hz.block_start[t]) {
            g_lo = std::max(g_lo, pg[t - 1] - limit);
            g_hi = std::min(g_hi, pg[t - 1] + limit);
        }
        const double s_lo = std::ceil((g_lo - hz.p_pv[t]) / step - 1e-9);
        const double s_hi = std::floor((g_hi - hz.p_pv[t]) / step + 1e-9);
        if (s_lo > s_hi) return;
        for (long b = -kmax; b <= kmax; ++b) {
            const long lo = std::max(u_lo, static_cast<long>(std::max(s_lo - b, -1e15)));
            const long hi = std::min(u_hi, static_cast<long>(std::min(s_hi - b, 1e15)));
            for (long u = lo; u <= hi; ++u) {
                kb[t] = b;
                ku[t] = u;
                pg[t] = hz.p_pv[t] + (b + u) * step;
                descend(t + 1);
            }
        }
    };
    descend(0);
    return best;
}

double oracle_lipschitz_bound(CaseId id, std::size_t steps, const DispatchSpecs& specs, const ConstraintConfig& cfg,
                              const OracleGrid& grid) {
    const Weights w = independent_weights(id, specs, cfg);
    const double n = static_cast<double>(steps);
    const double x_min = specs.battery.soc_min_fraction;
    const double step = grid.power_step_kw;
    return step * (n * (2.0 * std::abs(w.grid_energy) + w.diesel_energy) + w.battery_power + w.diesel_power +
                   w.battery_energy * 2.0 * n * cfg.step_hours / (1.0 - x_min)) +
           w.battery_energy * grid.energy_step_kwh;
}

const CaseRow* CaseComparison::find(CaseId id) const {
    for (const auto& r : rows)
        if (r.case_id == id) return &r;
    return nullptr;
}

CaseComparison compare_cases(const std::vector<DispatchSolution>& results, const DispatchSolution& baseline,
                             double relative_tolerance) {
    CaseComparison cmp;
    cmp.baseline_net_benefit = baseline.net_benefit;
    auto row_of = [&](const DispatchSolution& d) {
        CaseRow r;
        r.case_id = d.case_id;
        r.net_benefit = d.net_benefit;
        r.decrement = baseline.net_benefit != 0.0 ? (baseline.net_benefit - d.net_benefit) / baseline.net_benefit : 0.0;
        r.p_batt_max = d.p_batt_max;
        r.e_batt_max = d.e_batt_max;
        r.p_diesel_max = d.p_diesel_max;
        r.has_curtailment = has_curtailment(d.case_id);
        r.has_diesel = has_diesel(d.case_id);
        for (double p : d.p_curt) r.max_curtailed = std::max(r.max_curtailed, p);
        return r;
    };
    for (const auto& d : results) cmp.rows.push_back(row_of(d));

    auto check = [&](CaseId lower, CaseId upper) {
        const CaseRow* lo = cmp.find(lower);
        const CaseRow* up = cmp.find(upper);
        if (!lo || !up) return;
        const double slack = relative_tolerance * std::max(1.0, std::abs(up->net_benefit));
        if (lo->net_benefit > up->net_benefit + slack)
            throw NestingViolation("nesting violated: case " + std::string(to_string(lower)) + " (" +
                                   std::to_string(lo->net_benefit) + ") exceeds case " + std::string(to_string(upper)) +
                                   " (" + std::to_string(up->net_benefit) + ")");
    };
    check(CaseId::A, CaseId::B);
    check(CaseId::A, CaseId::C);
    check(CaseId::B, CaseId::D);
    check(CaseId::C, CaseId::D);
    check(CaseId::A, CaseId::D);
    for (const auto& r : cmp.rows) check(r.case_id, CaseId::Baseline);
    return cmp;
}

} // namespace pvsmooth
