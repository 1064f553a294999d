// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "dispatch_fixtures.hpp"
#include "lp_oracle.hpp"
#include "random_lp.hpp"

#include "pvsmooth/lp/mps.hpp"
#include "pvsmooth/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace pvsmooth;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

const std::vector<CaseId> kCases{CaseId::A, CaseId::B, CaseId::C, CaseId::D};

// The default study trace: 3 days at 10 minutes, night samples dropped.
PreparedInputs trace(std::uint64_t seed, double threshold = 2.0) {
    RunConfig cfg;
    cfg.weather.seed = seed;
    cfg.weather.low_irradiance_threshold = threshold;
    return prepare_inputs(cfg);
}

Outcome solver_oracle() {
    Outcome o;
    const auto t0 = Clock::now();
    double worst = 0.0;
    int optimal = 0;
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const auto p = test::random_lp(seed, 6, 6);
        const auto oracle = test::enumerate_vertices(p);
        const auto s = lp::solve(p);
        if (!oracle.feasible) {
            if (s.status != lp::Status::Infeasible) o.fail("seed " + std::to_string(seed) + ": expected infeasible");
            continue;
        }
        if (s.status != lp::Status::Optimal) {
            o.fail("seed " + std::to_string(seed) + ": status " + std::string(lp::to_string(s.status)));
            continue;
        }
        ++optimal;
        worst = std::max(worst, rel_err(s.objective_value, oracle.objective));
    }
    const double secs = seconds_since(t0);
    if (worst > 1e-8) o.fail("relative error " + fmt("%.3g", worst));
    if (secs >= 1.0) o.fail("took " + fmt("%.3f", secs) + " s");
    if (o.pass)
        o.detail = std::to_string(optimal) + " optimal, worst rel err " + fmt("%.2g", worst) + ", " +
                   fmt("%.3f", secs) + " s";
    return o;
}

Outcome mps_round_trip() {
    Outcome o;
    const auto pv = test::series({4000.0, 4420.0, 4100.0});
    ConstraintConfig cfg;
    cfg.annualization = 8760.0 / 0.5;
    const auto f = build_case_a(pv, BatterySpec{}, EconomicParams{}, cfg);
    const auto path = fs::temp_directory_path() / "pvsmooth_acceptance_case_a.mps";
    lp::write_mps(f.problem, path);
    const auto q = lp::read_mps(path);
    fs::remove(path);
    const auto a = lp::solve(f.problem);
    const auto b = lp::solve(q);
    if (a.status != lp::Status::Optimal || b.status != lp::Status::Optimal) {
        o.fail("non-optimal solve");
        return o;
    }
    const double err = std::abs(a.objective_value - b.objective_value) / std::abs(a.objective_value);
    if (err > 1e-10) o.fail("relative error " + fmt("%.3g", err));
    if (o.pass) o.detail = "objective " + fmt("%.6f", a.objective_value) + ", rel err " + fmt("%.2g", err);
    return o;
}

struct TraceResults {
    std::vector<std::vector<DispatchSolution>> solutions; // [trace][case]
    std::vector<std::vector<bool>> valid;
    std::vector<std::string> failures;
    double worst_residual = 0.0;
    double slowest_d_432 = 0.0;
    double slowest_d = 0.0;
};

const TraceResults& ten_traces() {
    static const TraceResults r = [] {
        TraceResults out;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto in = trace(seed);
            std::vector<DispatchSolution> sols;
            std::vector<bool> ok;
            for (CaseId id : kCases) {
                const auto t0 = Clock::now();
                const auto run = run_case(id, in, in.specs.battery, {}, 1e-6);
                if (id == CaseId::D) out.slowest_d = std::max(out.slowest_d, seconds_since(t0));
                if (!run.dispatch) {
                    out.failures.push_back("seed " + std::to_string(seed) + " case " + std::string(to_string(id)) +
                                           ": " + std::string(lp::to_string(run.status)));
                    sols.emplace_back();
                    ok.push_back(false);
                    continue;
                }
                for (const auto& [name, c] : run.report->residuals)
                    out.worst_residual = std::max(out.worst_residual, c.max_residual);
                if (!run.report->pass)
                    out.failures.push_back("seed " + std::to_string(seed) + " case " + std::string(to_string(id)) +
                                           ": validation failed");
                sols.push_back(*run.dispatch);
                ok.push_back(run.report->pass);
            }
            out.solutions.push_back(std::move(sols));
            out.valid.push_back(std::move(ok));

            // Full 432-step horizon, nights included.
            const auto full = trace(seed, 0.0);
            const auto t0 = Clock::now();
            const auto run = run_case(CaseId::D, full, full.specs.battery, {}, 1e-6);
            out.slowest_d_432 = std::max(out.slowest_d_432, seconds_since(t0));
            if (!run.ok())
                out.failures.push_back("seed " + std::to_string(seed) + " full-horizon case D: " +
                                       std::string(lp::to_string(run.status)));
        }
        return out;
    }();
    return r;
}

Outcome constraint_satisfaction() {
    Outcome o;
    const auto& r = ten_traces();
    for (const auto& f : r.failures) o.fail(f);
    if (r.slowest_d_432 >= 60.0) o.fail("432-step case D took " + fmt("%.2f", r.slowest_d_432) + " s");
    if (o.pass)
        o.detail = "40 dispatches valid, worst residual " + fmt("%.2g", r.worst_residual) + "; 432-step case D " +
                   fmt("%.2f", r.slowest_d_432) + " s";
    return o;
}

Outcome nesting_chain() {
    Outcome o;
    const auto& r = ten_traces();
    double tightest = INFINITY;
    for (std::size_t k = 0; k < r.solutions.size(); ++k) {
        const auto& s = r.solutions[k];
        const double a = s[0].net_benefit, b = s[1].net_benefit, c = s[2].net_benefit, d = s[3].net_benefit;
        auto le = [&](double lo, double hi, const char* what) {
            const double slack = hi - lo;
            tightest = std::min(tightest, slack / std::abs(hi));
            if (lo > hi + 1e-6 * std::abs(hi)) o.fail("trace " + std::to_string(k + 1) + ": " + what);
        };
        le(a, b, "A > B");
        le(b, d, "B > D");
        le(a, c, "A > C");
        le(c, d, "C > D");
    }
    if (o.pass) o.detail = "10 traces, smallest relative margin " + fmt("%.2g", tightest);
    return o;
}

Outcome economics() {
    Outcome o;
    EconomicParams zero;
    zero.discount_rate = 0.0;
    const BatterySpec nas;
    const DieselSpec dsl;
    const double beta0 = battery_power_pw(nas, zero);
    const double gamma0 = battery_energy_pw(nas, zero);
    const double sigma0 = diesel_power_pw(dsl, zero);
    if (beta0 != 2988.0) o.fail("beta(S=0) = " + fmt("%.17g", beta0));
    if (rel_err(gamma0, 513.9) > 1e-15) o.fail("gamma(S=0) = " + fmt("%.17g", gamma0));
    if (sigma0 != 1368.0) o.fail("sigma(S=0) = " + fmt("%.17g", sigma0));
    if (replacement_count(18, 4.5) != 4) o.fail("diesel purchases != 4");

    // Year-by-year cash flows for the integer-lifetime battery.
    auto listing = [](double cap, double om, double salv, int life, int horizon, double s) {
        double pw = 0.0;
        for (int y = 0; y < horizon; y += life) pw += cap / std::pow(1 + s, y) - salv / std::pow(1 + s, y + life);
        for (int y = 1; y <= life; ++y) pw += om / std::pow(1 + s, y);
        return pw;
    };
    EconomicParams five;
    const double worst = std::max({rel_err(battery_power_pw(nas, five), listing(1000, 3, 10, 6, 18, 0.05)),
                                   rel_err(battery_energy_pw(nas, five), listing(170, 1.5, 1.7, 6, 18, 0.05)),
                                   rel_err(diesel_power_pw(dsl, five), 1078.9510648738587),
                                   rel_err(revenue_multiplier(five), 11.689586902650335)});
    if (worst > 1e-10) o.fail("S=0.05 rel err " + fmt("%.3g", worst));
    if (o.pass) o.detail = "2988 / 513.9 / 1368 at S=0; S=0.05 worst rel err " + fmt("%.2g", worst);
    return o;
}

Outcome brute_force() {
    Outcome o;
    int checked = 0;
    double worst_ratio = 0.0;
    for (const auto& inst : test::spike_instances()) {
        const auto s = test::default_specs(inst.discount_rate);
        ConstraintConfig cfg;
        cfg.annualization = inst.annualization;
        const auto pv = test::series(inst.p_pv);
        const auto lp_d = solve_case(inst.case_id, pv, s.battery, s.diesel, s.econ, cfg);
        const std::string tag = inst.name + "/" + std::string(to_string(inst.case_id));
        double prev_gap = INFINITY;
        for (double step : {10.0, 5.0, 2.5}) {
            const OracleGrid grid{step, step, inst.radius_kw};
            const auto orc = brute_force_optimum(inst.case_id, pv, s, cfg, grid);
            if (!orc.feasible) {
                o.fail(tag + ": oracle found no feasible point");
                break;
            }
            const double gap = lp_d.net_benefit - orc.objective;
            const double bound = oracle_lipschitz_bound(inst.case_id, pv.size(), s, cfg, grid);
            if (gap < -1e-6 * std::abs(lp_d.net_benefit)) o.fail(tag + ": oracle beats LP");
            if (gap > prev_gap + 1e-9 * std::abs(lp_d.net_benefit)) o.fail(tag + ": gap grew under refinement");
            if (step == 10.0) {
                if (gap > bound) o.fail(tag + ": gap " + fmt("%.3f", gap) + " > bound " + fmt("%.3f", bound));
                worst_ratio = std::max(worst_ratio, gap / bound);
            }
            prev_gap = gap;
        }
        ++checked;
    }
    if (o.pass) o.detail = std::to_string(checked) + " instances, worst gap/bound at 10 kW " + fmt("%.3f", worst_ratio);
    return o;
}

Outcome qualitative_ordering() {
    Outcome o;
    const auto in = trace(7);
    std::vector<DispatchSolution> sols;
    for (CaseId id : kCases) {
        const auto r = run_case(id, in, in.specs.battery, {}, 1e-6);
        if (!r.ok()) {
            o.fail("case " + std::string(to_string(id)) + " failed");
            return o;
        }
        sols.push_back(*r.dispatch);
    }
    const auto base = run_case(CaseId::Baseline, in, in.specs.battery, {}, 1e-6);
    const auto cmp = compare_cases(sols, *base.dispatch);
    const double pa = sols[0].p_batt_max, pb = sols[1].p_batt_max, pc = sols[2].p_batt_max, pd = sols[3].p_batt_max;
    const double tol = 1e-6;
    if (!(pa >= pb - tol && pb >= pc - tol && pc >= pd - tol))
        o.fail("battery power " + fmt("%.1f", pa) + " / " + fmt("%.1f", pb) + " / " + fmt("%.1f", pc) + " / " +
               fmt("%.1f", pd));
    const double da = cmp.rows[0].decrement, db = cmp.rows[1].decrement, dc = cmp.rows[2].decrement,
                 dd = cmp.rows[3].decrement;
    if (!(da >= db - 1e-9 && da >= dc - 1e-9 && db >= dd - 1e-9 && dc >= dd - 1e-9))
        o.fail("decrement ordering broken");
    if (o.pass)
        o.detail = "battery kW " + fmt("%.1f", pa) + " > " + fmt("%.1f", pb) + " > " + fmt("%.1f", pc) + " > " +
                   fmt("%.1f", pd) + "; decrement " + fmt("%.2f", 100 * da) + "% -> " + fmt("%.2f", 100 * dd) + "%";
    return o;
}

Outcome price_scaling() {
    Outcome o;
    const auto in = trace(7);
    auto scaled = in;
    auto& b = scaled.specs.battery;
    auto& d = scaled.specs.diesel;
    scaled.specs.econ.energy_price *= 3;
    for (double* v : {&b.capital_power, &b.capital_energy, &b.om_power, &b.om_energy, &b.salvage_power,
                      &b.salvage_energy, &d.capital, &d.om, &d.salvage, &d.fuel_price, &d.emission_charge_total})
        *v *= 3;
    double worst = 0.0;
    for (CaseId id : {CaseId::A, CaseId::B, CaseId::C, CaseId::D, CaseId::Baseline}) {
        const auto r1 = run_case(id, in, in.specs.battery, {}, 1e-6);
        const auto r3 = run_case(id, scaled, scaled.specs.battery, {}, 1e-6);
        if (!r1.dispatch || !r3.dispatch) {
            o.fail("case " + std::string(to_string(id)) + " not optimal");
            continue;
        }
        const double err = rel_err(r3.dispatch->net_benefit, 3.0 * r1.dispatch->net_benefit);
        worst = std::max(worst, err);
        if (err > 1e-9) o.fail("case " + std::string(to_string(id)) + ": rel err " + fmt("%.3g", err));
        if (r1.report->pass != r3.report->pass) o.fail("case " + std::string(to_string(id)) + ": validation changed");
    }
    if (o.pass) o.detail = "5 cases, worst rel err " + fmt("%.2g", worst);
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

Outcome determinism() {
    Outcome o;
    const auto root = fs::temp_directory_path() / "pvsmooth_acceptance_determinism";
    fs::remove_all(root);
    std::ostringstream sink;
    const Logger quiet(sink, LogLevel::Error);
    nlohmann::json doc = {{"batteries", {"table1_nas", "table1_la", "table1_li_ion", "table1_ni_cd"}},
                          {"cases", {"A", "B", "C", "D", "baseline", "battery-select"}}};
    std::vector<fs::path> dirs;
    for (const char* name : {"first", "second"}) {
        auto cfg = parse_config(doc, root / name);
        if (run(cfg, quiet) != 0) o.fail(std::string(name) + " run failed");
        dirs.push_back(cfg.output_dir);
    }
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(dirs[0])) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), dirs[0]);
        if (slurp(e.path()) != slurp(dirs[1] / rel)) o.fail(rel.string() + " differs");
        ++files;
    }
    std::size_t files2 = 0;
    for (const auto& e : fs::recursive_directory_iterator(dirs[1])) files2 += e.is_regular_file();
    if (files != files2) o.fail("file sets differ");
    fs::remove_all(root);
    if (o.pass) o.detail = std::to_string(files) + " files byte-identical across two runs";
    return o;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria{
        {"solver matches vertex enumeration on 25 random LPs", solver_oracle},
        {"MPS write/read/solve round trip", mps_round_trip},
        {"constraint satisfaction on 10 traces x 4 cases", constraint_satisfaction},
        {"nesting chain A<=B<=D, A<=C<=D", nesting_chain},
        {"present-worth closed forms", economics},
        {"brute-force dispatch oracle", brute_force},
        {"battery rating and decrement ordering", qualitative_ordering},
        {"price-scaling law", price_scaling},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        try {
            out = criteria[i].check();
        } catch (const std::exception& e) {
            out.fail(std::string("exception: ") + e.what());
        }
        std::printf("%s  %zu  %s  (%s)\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, out.detail.c_str());
        std::fflush(stdout);
        failed += !out.pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
