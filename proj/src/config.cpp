#include "pvsmooth/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace pvsmooth {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Walks one JSON object, remembering which keys were read so leftovers can
// be reported as unknown fields.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_, "expected an object");
    }

    bool has(const std::string& key) const { return node_.contains(key); }
    const json& raw(const std::string& key) {
        seen_.insert(key);
        return node_.at(key);
    }
    std::string field(const std::string& key) const { return join(path_, key); }

    void number(const std::string& key, double& out) {
        if (!has(key)) return;
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(field(key), "expected a number");
        out = v.get<double>();
        if (!std::isfinite(out)) throw ConfigError(field(key), "must be finite");
    }
    void boolean(const std::string& key, bool& out) {
        if (!has(key)) return;
        const json& v = raw(key);
        if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
        out = v.get<bool>();
    }
    void text(const std::string& key, std::string& out) {
        if (!has(key)) return;
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(field(key), "expected a string");
        out = v.get<std::string>();
    }
    template <typename Int>
    void integer(const std::string& key, Int& out) {
        if (!has(key)) return;
        const json& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
        if (v.is_number_unsigned()) out = static_cast<Int>(v.get<std::uint64_t>());
        else {
            const auto i = v.get<std::int64_t>();
            if (i < 0 && !std::is_signed_v<Int>) throw ConfigError(field(key), "must be non-negative");
            out = static_cast<Int>(i);
        }
    }

    void finish() const {
        for (auto it = node_.begin(); it != node_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown field");
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

json read_json_file(const fs::path& path, const std::string& what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot open " + what + " " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("", path.string() + ": " + e.what());
    }
}

void read_battery_fields(Section& s, BatterySpec& b) {
    s.text("name", b.name);
    s.number("capital_power", b.capital_power);
    s.number("capital_energy", b.capital_energy);
    s.number("om_power", b.om_power);
    s.number("om_energy", b.om_energy);
    s.number("salvage_power", b.salvage_power);
    s.number("salvage_energy", b.salvage_energy);
    s.number("lifetime_years", b.lifetime_years);
    s.number("eff_power", b.eff_power);
    s.number("eff_energy", b.eff_energy);
    s.number("soc_min_fraction", b.soc_min_fraction);
}

void read_diesel_fields(Section& s, DieselSpec& d) {
    s.number("capital", d.capital);
    s.number("om", d.om);
    s.number("salvage", d.salvage);
    s.number("lifetime_hours", d.lifetime_hours);
    s.number("lifetime_years_effective", d.lifetime_years_effective);
    s.number("fuel_per_kwh", d.fuel_per_kwh);
    s.number("fuel_price", d.fuel_price);
    s.number("emission_charge_total", d.emission_charge_total);
    s.number("efficiency", d.efficiency);
    s.number("annual_fuel_cap_liters", d.annual_fuel_cap_liters);
}

fs::path preset_path(const std::string& name, const fs::path& preset_dir) {
    fs::path p(name);
    if (p.has_extension() || p.has_parent_path()) return p.is_absolute() ? p : preset_dir / p;
    return preset_dir / (name + ".preset");
}

// Specs validate with messages of the form "battery.field must ...". Re-anchor
// them on the config path the values came from.
template <typename Spec>
void validate_spec(const Spec& spec, const std::string& path, const char* prefix) {
    try {
        spec.validate();
    } catch (const std::runtime_error& e) {
        std::string msg = e.what();
        std::string field = path;
        const std::string p = std::string(prefix) + ".";
        if (msg.rfind(p, 0) == 0) {
            const auto space = msg.find(' ');
            field = join(path, msg.substr(p.size(), space - p.size()));
            msg = msg.substr(space + 1);
        }
        throw ConfigError(field, msg);
    }
}

BatterySpec battery_from(const json& node, const std::string& path, const fs::path& preset_dir) {
    if (node.is_string()) {
        auto b = load_battery_preset(node.get<std::string>(), preset_dir);
        validate_spec(b, path, "battery");
        return b;
    }
    Section s(node, path);
    BatterySpec b;
    if (s.has("preset")) {
        std::string name;
        s.text("preset", name);
        b = load_battery_preset(name, preset_dir);
    }
    read_battery_fields(s, b);
    s.finish();
    validate_spec(b, path, "battery");
    return b;
}

} // namespace

fs::path default_preset_dir() {
    if (const char* env = std::getenv("PVSMOOTH_PRESET_DIR"); env && *env) return env;
    return PVSMOOTH_PRESET_DIR;
}

BatterySpec load_battery_preset(const std::string& name, const fs::path& preset_dir) {
    const auto path = preset_path(name, preset_dir);
    const json doc = read_json_file(path, "battery preset");
    Section s(doc, path.filename().string());
    BatterySpec b;
    read_battery_fields(s, b);
    s.finish();
    return b;
}

DieselSpec load_diesel_preset(const std::string& name, const fs::path& preset_dir) {
    const auto path = preset_path(name, preset_dir);
    const json doc = read_json_file(path, "diesel preset");
    Section s(doc, path.filename().string());
    DieselSpec d;
    read_diesel_fields(s, d);
    s.finish();
    return d;
}

RunConfig parse_config(const json& doc, const fs::path& base_dir) {
    RunConfig cfg;
    Section top(doc, "");

    fs::path preset_dir = default_preset_dir();
    if (top.has("preset_dir")) {
        std::string dir;
        top.text("preset_dir", dir);
        preset_dir = fs::path(dir).is_absolute() ? fs::path(dir) : base_dir / dir;
    }

    if (top.has("weather")) {
        Section w(top.raw("weather"), "weather");
        auto& src = cfg.weather;
        if (w.has("file") && w.has("synthetic"))
            throw ConfigError("weather", "give either 'file' or 'synthetic', not both");
        if (w.has("file")) {
            std::string file;
            w.text("file", file);
            src.kind = WeatherSource::Kind::File;
            src.path = fs::path(file).is_absolute() ? fs::path(file) : base_dir / file;
        }
        if (w.has("synthetic")) {
            Section syn(w.raw("synthetic"), "weather.synthetic");
            src.kind = WeatherSource::Kind::Synthetic;
            syn.integer("days", src.days);
            syn.integer("seed", src.seed);
            syn.number("variability", src.variability);
            syn.number("step_hours", src.step_hours);
            syn.finish();
            if (src.days < 1) throw ConfigError("weather.synthetic.days", "must be >= 1");
            if (!(src.variability >= 0.0 && src.variability <= 1.0))
                throw ConfigError("weather.synthetic.variability", "must lie in [0, 1]");
            if (!(src.step_hours > 0.0)) throw ConfigError("weather.synthetic.step_hours", "must be positive");
        }
        w.number("low_irradiance_threshold", src.low_irradiance_threshold);
        if (!(src.low_irradiance_threshold >= 0.0))
            throw ConfigError("weather.low_irradiance_threshold", "must be >= 0");
        w.finish();
    }

    if (top.has("plant")) {
        Section p(top.raw("plant"), "plant");
        auto& pl = cfg.plant;
        p.number("rated_power", pl.rated_power);
        p.number("inverter_efficiency", pl.inverter_efficiency);
        p.number("temp_coefficient", pl.temp_coefficient);
        p.number("noct", pl.noct);
        p.number("reference_temp", pl.reference_temp);
        p.number("reference_irradiance", pl.reference_irradiance);
        p.finish();
        validate_spec(pl, "plant", "plant");
    }

    if (top.has("battery") && top.has("batteries"))
        throw ConfigError("batteries", "give either 'battery' or 'batteries', not both");
    if (top.has("battery")) cfg.batteries = {battery_from(top.raw("battery"), "battery", preset_dir)};
    if (top.has("batteries")) {
        const json& list = top.raw("batteries");
        if (!list.is_array() || list.empty()) throw ConfigError("batteries", "expected a non-empty list");
        cfg.batteries.clear();
        for (std::size_t i = 0; i < list.size(); ++i)
            cfg.batteries.push_back(battery_from(list[i], "batteries[" + std::to_string(i) + "]", preset_dir));
    }

    if (top.has("diesel")) {
        const json& node = top.raw("diesel");
        if (node.is_string()) {
            cfg.diesel = load_diesel_preset(node.get<std::string>(), preset_dir);
        } else {
            Section d(node, "diesel");
            if (d.has("preset")) {
                std::string name;
                d.text("preset", name);
                cfg.diesel = load_diesel_preset(name, preset_dir);
            }
            read_diesel_fields(d, cfg.diesel);
            d.finish();
        }
        validate_spec(cfg.diesel, "diesel", "diesel");
    }

    if (top.has("econ")) {
        Section e(top.raw("econ"), "econ");
        e.number("energy_price", cfg.econ.energy_price);
        e.number("discount_rate", cfg.econ.discount_rate);
        e.number("horizon_years", cfg.econ.horizon_years);
        e.boolean("om_full_horizon", cfg.econ.om_full_horizon);
        e.finish();
        validate_spec(cfg.econ, "econ", "econ");
    }

    if (top.has("constraints")) {
        Section c(top.raw("constraints"), "constraints");
        auto& cc = cfg.constraints;
        c.number("fluctuation_limit", cc.fluctuation_limit);
        c.number("grid_cap", cc.grid_cap);
        c.boolean("cyclic_soc", cc.cyclic_soc);
        c.boolean("paper_literal_eq12", cc.paper_literal_eq12);
        if (c.has("initial_soc")) {
            Section s(c.raw("initial_soc"), "constraints.initial_soc");
            std::string mode = "free";
            s.text("mode", mode);
            if (mode == "free") cc.initial_soc_mode = InitialSocMode::FreeBounded;
            else if (mode == "fixed") cc.initial_soc_mode = InitialSocMode::FixedFraction;
            else throw ConfigError("constraints.initial_soc.mode", "expected 'free' or 'fixed', got '" + mode + "'");
            s.number("fraction", cc.initial_soc_fraction);
            s.finish();
        }
        if (c.has("emission_model")) {
            std::string em;
            c.text("emission_model", em);
            if (em == "prorated") cc.emission_model = EmissionModel::ProratedToFuelCap;
            else if (em == "lumped") cc.emission_model = EmissionModel::Lumped;
            else throw ConfigError("constraints.emission_model", "expected 'prorated' or 'lumped', got '" + em + "'");
        }
        if (c.has("annualization")) {
            const json& a = c.raw("annualization");
            if (a.is_string() && a.get<std::string>() == "auto") {
                cfg.annualization_auto = true;
            } else if (a.is_number()) {
                cfg.annualization_auto = false;
                cc.annualization = a.get<double>();
            } else {
                throw ConfigError("constraints.annualization", "expected a number or \"auto\"");
            }
        }
        c.finish();
        try {
            cc.validate();
        } catch (const FormulationError& e) {
            std::string msg = e.what();
            const auto space = msg.find(' ');
            throw ConfigError(msg.substr(0, space), msg.substr(space + 1));
        }
    }

    if (top.has("cases")) {
        const json& list = top.raw("cases");
        if (!list.is_array()) throw ConfigError("cases", "expected a list");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string where = "cases[" + std::to_string(i) + "]";
            if (!list[i].is_string()) throw ConfigError(where, "expected a case name");
            const auto name = list[i].get<std::string>();
            if (name == "battery-select") {
                cfg.battery_select = true;
                continue;
            }
            const auto id = parse_case_id(name);
            if (!id) throw ConfigError(where, "unknown case '" + name + "' (A, B, C, D, baseline, battery-select)");
            if (std::find(cfg.cases.begin(), cfg.cases.end(), *id) != cfg.cases.end())
                throw ConfigError(where, "case '" + name + "' listed twice");
            cfg.cases.push_back(*id);
        }
    } else {
        cfg.cases = {CaseId::A, CaseId::B, CaseId::C, CaseId::D, CaseId::Baseline};
    }
    if (cfg.cases.empty() && !cfg.battery_select) throw ConfigError("cases", "select at least one case");

    if (top.has("output_dir")) {
        std::string dir;
        top.text("output_dir", dir);
        if (dir.empty()) throw ConfigError("output_dir", "must not be empty");
        cfg.output_dir = dir;
    }
    if (cfg.output_dir.is_relative()) cfg.output_dir = base_dir / cfg.output_dir;

    if (top.has("solver")) {
        Section s(top.raw("solver"), "solver");
        auto& o = cfg.solver;
        s.number("feasibility_tolerance", o.feasibility_tolerance);
        s.number("optimality_tolerance", o.optimality_tolerance);
        s.integer("max_iterations", o.max_iterations);
        s.integer("refactor_interval", o.refactor_interval);
        if (s.has("pivot_rule")) {
            std::string rule;
            s.text("pivot_rule", rule);
            if (rule == "dantzig") o.pivot_rule = lp::PivotRule::Dantzig;
            else if (rule == "bland") o.pivot_rule = lp::PivotRule::Bland;
            else throw ConfigError("solver.pivot_rule", "expected 'dantzig' or 'bland', got '" + rule + "'");
        }
        s.finish();
        if (!(o.feasibility_tolerance > 0.0)) throw ConfigError("solver.feasibility_tolerance", "must be positive");
        if (!(o.optimality_tolerance > 0.0)) throw ConfigError("solver.optimality_tolerance", "must be positive");
        if (o.max_iterations < 0) throw ConfigError("solver.max_iterations", "must be >= 0");
        if (o.refactor_interval < 1) throw ConfigError("solver.refactor_interval", "must be >= 1");
    }

    top.number("validation_tolerance", cfg.validation_tolerance);
    if (!(cfg.validation_tolerance > 0.0)) throw ConfigError("validation_tolerance", "must be positive");
    top.finish();
    return cfg;
}

RunConfig load_config(const fs::path& path) {
    const json doc = read_json_file(path, "config");
    return parse_config(doc, path.parent_path());
}

} // namespace pvsmooth
