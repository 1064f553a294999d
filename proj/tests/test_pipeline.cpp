#include "doctest.h"

#include "pvsmooth/lp/mps.hpp"
#include "pvsmooth/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pvsmooth;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("pvsmooth_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string config_error_field(const json& doc) {
    try {
        parse_config(doc, fs::temp_directory_path());
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

std::ostringstream sink;
const Logger quiet(sink, LogLevel::Error);

} // namespace

TEST_CASE("config: defaults") {
    const auto cfg = parse_config(json::object(), "/tmp");
    CHECK(cfg.cases.size() == 5);
    CHECK(cfg.battery().name == "NaS");
    CHECK(cfg.weather.kind == WeatherSource::Kind::Synthetic);
    CHECK(cfg.weather.days == 3);
    CHECK(cfg.annualization_auto);
    CHECK(cfg.output_dir == fs::path("/tmp/out"));
}

TEST_CASE("config: errors name the field") {
    CHECK(config_error_field({{"constraints", {{"fluctuation_limit", -5}}}}) == "constraints.fluctuation_limit");
    CHECK(config_error_field({{"constraints", {{"ramp", 1}}}}) == "constraints.ramp");
    CHECK(config_error_field({{"econ", {{"discount_rate", -1}}}}) == "econ.discount_rate");
    CHECK(config_error_field({{"econ", {{"energy_price", "cheap"}}}}) == "econ.energy_price");
    CHECK(config_error_field({{"battery", {{"eff_power", 2}}}}) == "battery.eff_power");
    CHECK(config_error_field({{"cases", {"A", "Z"}}}) == "cases[1]");
    CHECK(config_error_field({{"cases", json::array()}}) == "cases");
    CHECK(config_error_field({{"weather", {{"synthetic", {{"variability", 3}}}}}}) ==
          "weather.synthetic.variability");
    CHECK(config_error_field({{"plant", {{"inverter_efficiency", 0}}}}) == "plant.inverter_efficiency");
    CHECK(config_error_field({{"solver", {{"pivot_rule", "steepest"}}}}) == "solver.pivot_rule");
    CHECK(config_error_field({{"constraints", {{"emission_model", "carbon"}}}}) == "constraints.emission_model");
    CHECK(config_error_field({{"battery", "no_such_preset"}}) == "");

    try {
        parse_config({{"constraints", {{"fluctuation_limit", -5}}}}, "/tmp");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()) == "constraints.fluctuation_limit: must be positive");
    }
}

TEST_CASE("config: presets and overrides") {
    const auto cfg = parse_config({{"battery", {{"preset", "table1_li_ion"}, {"lifetime_years", 10}}},
                                   {"diesel", "table3_diesel"},
                                   {"constraints", {{"annualization", 12.5}, {"initial_soc", {{"mode", "fixed"}, {"fraction", 0.3}}}}}},
                                  "/tmp");
    CHECK(cfg.battery().name == "Li-ion");
    CHECK(cfg.battery().capital_power == 1300.0);
    CHECK(cfg.battery().lifetime_years == 10.0);
    CHECK(cfg.diesel.lifetime_years_effective == 4.5);
    CHECK_FALSE(cfg.annualization_auto);
    CHECK(cfg.constraints.annualization == 12.5);
    CHECK(cfg.constraints.initial_soc_mode == InitialSocMode::FixedFraction);

    const auto nas = load_battery_preset("table1_nas", default_preset_dir());
    const BatterySpec defaults;
    CHECK(nas.capital_power == defaults.capital_power);
    CHECK(nas.salvage_energy == defaults.salvage_energy);
    CHECK(nas.lifetime_years == defaults.lifetime_years);
    const auto la = load_battery_preset("table1_la", default_preset_dir());
    CHECK(la.om_power == 30.0);
    CHECK(la.lifetime_years == 2.0);
    const auto nicd = load_battery_preset("table1_ni_cd", default_preset_dir());
    CHECK(nicd.salvage_energy == 3.9);
}

TEST_CASE("config: file weather resolves relative to the config") {
    const auto dir = scratch("cfgfile");
    {
        std::ofstream f(dir / "w.csv");
        f << "timestamp,irradiance_wm2,temp_c\n";
        for (int i = 0; i < 6; ++i) f << "2010-01-05T10:" << i << "0:00," << 500 + 10 * i << ",20\n";
    }
    {
        std::ofstream f(dir / "run.json");
        f << R"({"weather": {"file": "w.csv"}, "cases": ["A"], "output_dir": "res"})";
    }
    const auto cfg = load_config(dir / "run.json");
    CHECK(cfg.weather.kind == WeatherSource::Kind::File);
    CHECK(cfg.weather.path == dir / "w.csv");
    const auto in = prepare_inputs(cfg);
    CHECK(in.pv.size() == 6);
    CHECK(in.constraints.annualization == doctest::Approx(8760.0));
    CHECK(run(cfg, quiet) == 0);
    CHECK(fs::exists(dir / "res" / "case_A" / "dispatch.csv"));
}

TEST_CASE("dispatch csv round trip") {
    DispatchSolution d;
    d.case_id = CaseId::B;
    d.sample_index = {3, 4, 9};
    d.p_pv = {1.5, 2.0, 3.0};
    d.p_grid = {1.5, 2.0, 2.5};
    d.p_batt = {0.0, -0.0, 0.0};
    d.e_batt = {0.0, 0.0, 0.0};
    d.p_curt = {0.0, 0.0, 0.5};
    const auto text = dispatch_csv(d);
    CHECK(text.rfind("step,p_pv,p_grid,p_batt,e_batt,p_curt,p_diesel\n3,1.5,1.5,0,0,0,\n", 0) == 0);
    const auto p = parse_dispatch_csv(text);
    CHECK(p.step == std::vector<std::size_t>{3, 4, 9});
    CHECK(p.has_curtailment);
    CHECK_FALSE(p.has_diesel);
    CHECK(p.p_curt[2] == 0.5);
    CHECK_THROWS_AS(parse_dispatch_csv("step,p_pv\n1,2\n"), ReportError);
    CHECK_THROWS_AS(parse_dispatch_csv(text + "8,1,1,1,1,1,\n"), ReportError);
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(-0.0) == "0");
}

TEST_CASE("run: clear-sky baseline only") {
    auto cfg = parse_config({{"weather", {{"synthetic", {{"days", 1}, {"variability", 0.0}}}}}, {"cases", {"baseline"}}},
                            scratch("baseline"));
    CHECK(run(cfg, quiet) == 0);
    const auto summary = json::parse(slurp(cfg.output_dir / "case_baseline" / "summary.json"));
    CHECK(summary["p_batt_max_kw"] == 0.0);
    CHECK(summary["validation_pass"] == true);
    const auto in = prepare_inputs(cfg);
    const auto base = run_case(CaseId::Baseline, in, cfg.battery(), cfg.solver, 1e-6);
    CHECK(compare_cases({*base.dispatch}, *base.dispatch).rows[0].decrement == 0.0);
}

TEST_CASE("run: all cases, deterministic files, validate round trip") {
    const auto root = scratch("full");
    const json doc = {{"weather", {{"synthetic", {{"days", 1}, {"seed", 3}}}}}};
    auto cfg1 = parse_config(doc, root / "one");
    auto cfg2 = parse_config(doc, root / "two");
    REQUIRE(run(cfg1, quiet) == 0);
    REQUIRE(run(cfg2, quiet) == 0);
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(cfg1.output_dir)) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), cfg1.output_dir);
        CHECK(slurp(e.path()) == slurp(cfg2.output_dir / rel));
        ++files;
    }
    CHECK(files == 1 + 5 * 3 + 2);

    const auto table = slurp(cfg1.output_dir / "comparison.txt");
    CHECK(table.find("Battery power rating (kW)") != std::string::npos);

    std::ostringstream out;
    const auto csv = cfg1.output_dir / "case_D" / "dispatch.csv";
    CHECK(validate_dispatch_file(csv, cfg1, quiet, out) == 0);
    CHECK(json::parse(out.str())["case"] == "D");

    // Bump one grid value: the balance and most likely the ramp break.
    auto text = slurp(csv);
    const auto tampered = root / "tampered";
    fs::create_directories(tampered);
    fs::copy_file(cfg1.output_dir / "case_D" / "summary.json", tampered / "summary.json");
    std::istringstream lines(text);
    std::string line, rebuilt;
    int row = 0;
    while (std::getline(lines, line)) {
        if (row == 5) {
            auto cells = std::vector<std::string>();
            std::istringstream ls(line);
            std::string c;
            while (std::getline(ls, c, ',')) cells.push_back(c);
            cells[2] = format_number(std::stod(cells[2]) + 200.0);
            line.clear();
            for (std::size_t i = 0; i < 7; ++i) line += (i ? "," : "") + (i < cells.size() ? cells[i] : "");
        }
        rebuilt += line + "\n";
        ++row;
    }
    { std::ofstream(tampered / "dispatch.csv") << rebuilt; }
    std::ostringstream out2;
    CHECK(validate_dispatch_file(tampered / "dispatch.csv", cfg1, quiet, out2) == 1);
    CHECK(json::parse(out2.str())["validation"]["residuals"]["balance"]["max_residual"].get<double>() ==
          doctest::Approx(200.0));
}

TEST_CASE("battery select: ties keep input order, dominated specs rank lower") {
    auto cfg = parse_config({{"weather", {{"synthetic", {{"days", 1}, {"seed", 2}}}}}}, scratch("select"));
    const auto in = prepare_inputs(cfg);
    BatterySpec a, b, pricey;
    a.name = "first";
    b.name = "second";
    pricey.name = "pricey";
    pricey.capital_energy += 10.0;
    cfg.batteries = {pricey, a, b};
    double baseline = 0.0;
    const auto ranks = rank_batteries(cfg, in, baseline);
    REQUIRE(ranks.size() == 3);
    CHECK(ranks[0].name == "first");
    CHECK(ranks[1].name == "second");
    CHECK(ranks[2].name == "pricey");
    CHECK(ranks[0].net_benefit == ranks[1].net_benefit);
    CHECK(ranks[2].net_benefit <= ranks[0].net_benefit);
    CHECK(ranks[0].imposed_cost_pct < 0.0);

    cfg.batteries = {a};
    CHECK(battery_select(cfg, quiet) == 1);
}

TEST_CASE("export-mps writes a readable problem") {
    auto cfg = parse_config({{"weather", {{"synthetic", {{"days", 1}}}}}}, scratch("mps"));
    CHECK(export_mps(cfg, CaseId::C, std::nullopt, quiet) == 0);
    const auto p = lp::read_mps(cfg.output_dir / "case_C.mps");
    const auto in = prepare_inputs(cfg);
    const auto f = build_case(CaseId::C, in.pv, in.specs.battery, in.specs.diesel, in.specs.econ, in.constraints);
    CHECK(p.n_vars() == f.problem.n_vars());
    CHECK(p.n_rows() == f.problem.n_rows());
}
