#include "pvsmooth/pipeline.hpp"

#include "pvsmooth/lp/mps.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace pvsmooth {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ReportError("cannot write " + path.string());
    f << content;
    if (!f) throw ReportError("write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ReportError("cannot open " + path.string());
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("output_dir", "cannot create " + dir.string());
}

std::string case_dir_name(CaseId id) { return "case_" + std::string(to_string(id)); }

double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

} // namespace

LogLevel log_level_from_env() {
    const char* v = std::getenv("PVSMOOTH_LOG_LEVEL");
    if (!v) return LogLevel::Info;
    const std::string s(v);
    if (s == "error") return LogLevel::Error;
    if (s == "warn") return LogLevel::Warn;
    if (s == "debug") return LogLevel::Debug;
    return LogLevel::Info;
}

void Logger::write(LogLevel at, const char* tag, const std::string& msg) const {
    if (static_cast<int>(at) > static_cast<int>(level_)) return;
    out_ << "[" << tag << "] " << msg << '\n';
}

PreparedInputs prepare_inputs(const RunConfig& cfg) {
    PreparedInputs in;
    const auto& src = cfg.weather;
    WeatherSeries raw = src.kind == WeatherSource::Kind::File
                            ? load_weather(src.path)
                            : synth_weather(src.days, src.seed, src.variability, src.step_hours);
    in.weather = filter_low_irradiance(raw, src.low_irradiance_threshold);
    in.pv = pv_power(in.weather, cfg.plant);
    in.constraints = cfg.constraints;
    in.constraints.step_hours = in.weather.step_hours;
    if (cfg.annualization_auto)
        in.constraints.annualization = 8760.0 / (static_cast<double>(in.weather.size()) * in.weather.step_hours);
    in.specs.battery = cfg.battery();
    in.specs.diesel = cfg.diesel;
    in.specs.econ = cfg.econ;
    return in;
}

CaseRun run_case(CaseId id, const PreparedInputs& in, const BatterySpec& battery, const lp::SolverOptions& options,
                 double validation_tolerance) {
    CaseRun r;
    r.case_id = id;
    const auto f = build_case(id, in.pv, battery, in.specs.diesel, in.specs.econ, in.constraints);
    const auto s = lp::solve(f.problem, options);
    r.status = s.status;
    r.iterations = s.iterations;
    if (s.status != lp::Status::Optimal) return r;
    r.dispatch = extract_solution(f, s);
    DispatchSpecs specs = in.specs;
    specs.battery = battery;
    r.report = check_dispatch(*r.dispatch, in.pv, in.constraints, specs, validation_tolerance);
    return r;
}

CaseSummary summarize(const CaseRun& run, const std::string& battery_name, double e_diesel_max) {
    CaseSummary s;
    s.case_id = run.case_id;
    s.status = std::string(lp::to_string(run.status));
    s.battery = battery_name;
    s.iterations = run.iterations;
    s.e_diesel_max = has_diesel(run.case_id) ? e_diesel_max : 0.0;
    if (run.dispatch) {
        const auto& d = *run.dispatch;
        s.steps = d.size();
        s.net_benefit = d.net_benefit;
        s.p_batt_max = d.p_batt_max;
        s.e_batt_max = d.e_batt_max;
        s.p_diesel_max = d.p_diesel_max;
        s.diesel_energy = d.diesel_energy;
        s.max_curtailed = max_of(d.p_curt);
    }
    s.validation_pass = run.ok();
    return s;
}

std::vector<BatteryRank> rank_batteries(const RunConfig& cfg, const PreparedInputs& in, double& baseline_net_benefit) {
    const auto base = run_case(CaseId::Baseline, in, cfg.battery(), cfg.solver, cfg.validation_tolerance);
    if (base.status != lp::Status::Optimal)
        throw FormulationError("baseline solve failed: " + std::string(lp::to_string(base.status)));
    baseline_net_benefit = base.dispatch->net_benefit;

    std::vector<BatteryRank> ranks;
    for (const auto& b : cfg.batteries) {
        const auto r = run_case(CaseId::A, in, b, cfg.solver, cfg.validation_tolerance);
        BatteryRank row;
        row.name = b.name;
        row.status = r.ok() ? "optimal" : r.status == lp::Status::Optimal ? "validation-failed"
                                                                           : std::string(lp::to_string(r.status));
        if (r.dispatch) {
            row.net_benefit = r.dispatch->net_benefit;
            row.p_batt_max = r.dispatch->p_batt_max;
            row.e_batt_max = r.dispatch->e_batt_max;
            if (baseline_net_benefit != 0.0)
                row.imposed_cost_pct = 100.0 * (row.net_benefit - baseline_net_benefit) / std::abs(baseline_net_benefit);
        }
        ranks.push_back(row);
    }
    std::stable_sort(ranks.begin(), ranks.end(), [](const BatteryRank& a, const BatteryRank& b) {
        const bool ao = a.status == "optimal", bo = b.status == "optimal";
        if (ao != bo) return ao;
        return ao && a.net_benefit > b.net_benefit;
    });
    return ranks;
}

namespace {

int write_battery_select(const RunConfig& cfg, const PreparedInputs& in, const Logger& log) {
    if (cfg.batteries.size() < 2) {
        log.error("battery-select needs at least two battery specs under 'batteries'");
        return 1;
    }
    double baseline = 0.0;
    const auto ranks = rank_batteries(cfg, in, baseline);
    make_dir(cfg.output_dir);
    write_file(cfg.output_dir / "battery_select.json", dump(battery_select_json(ranks, baseline)));
    const auto table = battery_select_table(ranks);
    write_file(cfg.output_dir / "battery_select.txt", table);
    log.info("battery ranking:\n" + table);
    for (const auto& r : ranks)
        if (r.status != "optimal") return 1;
    return 0;
}

} // namespace

int run(const RunConfig& cfg, const Logger& log) {
    const auto in = prepare_inputs(cfg);
    log.info("horizon: " + std::to_string(make_horizon(in.pv).size()) + " of " + std::to_string(in.pv.size()) +
             " samples retained, annualization " + format_number(in.constraints.annualization));
    make_dir(cfg.output_dir);
    write_file(cfg.output_dir / "pv_power.csv", power_series_csv(in.pv));

    int exit_code = 0;
    std::vector<CaseRun> runs;
    for (CaseId id : cfg.cases) {
        const auto t0 = std::chrono::steady_clock::now();
        auto r = run_case(id, in, cfg.battery(), cfg.solver, cfg.validation_tolerance);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const auto dir = cfg.output_dir / case_dir_name(id);
        make_dir(dir);
        const auto w = objective_weights(id, in.specs.battery, in.specs.diesel, in.specs.econ, in.constraints);
        write_file(dir / "summary.json", dump(summary_json(summarize(r, cfg.battery().name, w.e_diesel_max))));
        if (r.dispatch) {
            write_file(dir / "dispatch.csv", dispatch_csv(*r.dispatch));
            write_file(dir / "validation.json", dump(validation_json(*r.report)));
        }
        std::ostringstream msg;
        msg << "case " << to_string(id) << ": " << lp::to_string(r.status) << " after " << r.iterations
            << " iterations";
        if (r.dispatch) msg << ", net benefit " << format_number(r.dispatch->net_benefit);
        log.debug(msg.str() + " (" + format_number(std::round(secs * 1000.0) / 1000.0) + " s)");
        if (r.status != lp::Status::Optimal) {
            log.error("case " + std::string(to_string(id)) + ": solver status " + std::string(lp::to_string(r.status)));
            exit_code = 1;
        } else if (!r.report->pass) {
            for (const auto& [name, c] : r.report->residuals)
                if (c.max_residual > c.tolerance)
                    log.error("case " + std::string(to_string(id)) + ": " + name + " residual " +
                              format_number(c.max_residual) + " at step " + std::to_string(c.worst_step));
            exit_code = 1;
        } else {
            log.info(msg.str());
        }
        runs.push_back(std::move(r));
    }

    std::vector<DispatchSolution> solved;
    std::optional<DispatchSolution> baseline;
    for (const auto& r : runs) {
        if (!r.dispatch) continue;
        if (r.case_id == CaseId::Baseline) baseline = r.dispatch;
        else solved.push_back(*r.dispatch);
    }
    if (runs.size() >= 2 && exit_code == 0) {
        if (!baseline) {
            auto b = run_case(CaseId::Baseline, in, cfg.battery(), cfg.solver, cfg.validation_tolerance);
            if (b.status != lp::Status::Optimal) {
                log.error("baseline solve for the comparison failed: " + std::string(lp::to_string(b.status)));
                return 1;
            }
            baseline = b.dispatch;
        }
        auto all = solved;
        if (std::find(cfg.cases.begin(), cfg.cases.end(), CaseId::Baseline) != cfg.cases.end()) all.push_back(*baseline);
        try {
            const auto cmp = compare_cases(all, *baseline);
            write_file(cfg.output_dir / "comparison.json", dump(comparison_json(cmp)));
            const auto table = comparison_table(cmp);
            write_file(cfg.output_dir / "comparison.txt", table);
            log.info("case comparison:\n" + table);
        } catch (const NestingViolation& e) {
            log.error(e.what());
            exit_code = 1;
        }
    }

    if (cfg.battery_select && write_battery_select(cfg, in, log) != 0) exit_code = 1;
    return exit_code;
}

int battery_select(const RunConfig& cfg, const Logger& log) {
    return write_battery_select(cfg, prepare_inputs(cfg), log);
}

int export_mps(const RunConfig& cfg, CaseId id, const std::optional<fs::path>& out_path, const Logger& log) {
    const auto in = prepare_inputs(cfg);
    const auto f = build_case(id, in.pv, in.specs.battery, in.specs.diesel, in.specs.econ, in.constraints);
    fs::path path;
    if (out_path) {
        path = *out_path;
    } else {
        make_dir(cfg.output_dir);
        path = cfg.output_dir / (case_dir_name(id) + ".mps");
    }
    lp::write_mps(f.problem, path, "CASE" + std::string(to_string(id)));
    log.info("wrote " + path.string() + " (" + std::to_string(f.problem.n_vars()) + " columns, " +
             std::to_string(f.problem.n_rows()) + " rows)");
    return 0;
}

int validate_dispatch_file(const fs::path& csv, const RunConfig& cfg, const Logger& log, std::ostream& out) {
    const auto parsed = parse_dispatch_csv(read_file(csv), csv.string());
    const auto in = prepare_inputs(cfg);

    std::optional<CaseSummary> summary;
    const auto summary_path = csv.parent_path() / "summary.json";
    if (fs::exists(summary_path)) {
        try {
            summary = summary_from_json(nlohmann::json::parse(read_file(summary_path)));
        } catch (const nlohmann::json::exception& e) {
            throw ReportError(summary_path.string() + ": " + e.what());
        }
    }

    DispatchSolution d;
    if (summary) {
        d.case_id = summary->case_id;
        if (has_curtailment(d.case_id) != parsed.has_curtailment || has_diesel(d.case_id) != parsed.has_diesel)
            throw ReportError(csv.string() + ": filled columns do not match case " +
                              std::string(to_string(d.case_id)) + " from " + summary_path.string());
    } else {
        d.case_id = parsed.has_curtailment ? (parsed.has_diesel ? CaseId::D : CaseId::B)
                                           : (parsed.has_diesel ? CaseId::C : CaseId::A);
        log.warn("no summary.json next to " + csv.string() + "; checking as case " +
                 std::string(to_string(d.case_id)) + " with sizing taken from the series");
    }

    // Rebuild the PV series with the mask implied by the CSV steps so that
    // gaps in the step index become block boundaries.
    PowerSeries pv;
    pv.step_hours = in.pv.step_hours;
    pv.values = in.pv.values;
    pv.retained.assign(pv.values.size(), false);
    for (std::size_t k = 0; k < parsed.step.size(); ++k) {
        const auto i = parsed.step[k];
        if (i >= pv.values.size())
            throw ReportError(csv.string() + ": step " + std::to_string(i) + " lies outside the configured weather (" +
                              std::to_string(pv.values.size()) + " samples)");
        if (std::abs(pv.values[i] - parsed.p_pv[k]) > 1e-6 * std::max(1.0, std::abs(pv.values[i])))
            throw ReportError(csv.string() + ": p_pv at step " + std::to_string(i) +
                              " does not match the configured weather (" + format_number(parsed.p_pv[k]) + " vs " +
                              format_number(pv.values[i]) + ")");
        pv.retained[i] = true;
    }

    d.sample_index = parsed.step;
    d.p_pv = parsed.p_pv;
    d.p_grid = parsed.p_grid;
    d.p_batt = parsed.p_batt;
    d.e_batt = parsed.e_batt;
    d.p_curt = parsed.p_curt;
    d.p_diesel = parsed.p_diesel;
    if (summary) {
        d.p_batt_max = summary->p_batt_max;
        d.e_batt_max = summary->e_batt_max;
        d.p_diesel_max = summary->p_diesel_max;
    } else {
        for (double p : d.p_batt) d.p_batt_max = std::max(d.p_batt_max, std::abs(p));
        d.e_batt_max = max_of(d.e_batt);
        d.p_diesel_max = max_of(d.p_diesel);
    }

    const auto rep = check_dispatch(d, pv, in.constraints, in.specs, cfg.validation_tolerance);
    nlohmann::ordered_json doc;
    doc["file"] = csv.string();
    doc["case"] = std::string(to_string(d.case_id));
    doc["net_benefit"] = evaluate_net_benefit(d.case_id, d, in.specs, in.constraints);
    doc["validation"] = validation_json(rep);
    out << dump(doc);
    if (!rep.pass) log.error("dispatch fails validation");
    return rep.pass ? 0 : 1;
}

} // namespace pvsmooth
