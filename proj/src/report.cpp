#include "pvsmooth/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace pvsmooth {

namespace {

using ojson = nlohmann::ordered_json;

double clean(double v) { return v == 0.0 ? 0.0 : v; }

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, clean(v));
    std::string s(buf);
    if (s == "-0." + std::string(static_cast<std::size_t>(digits), '0')) s.erase(0, 1);
    return s;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(0, 1);
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string render_table(const std::vector<std::vector<std::string>>& cells) {
    std::vector<std::size_t> width;
    for (const auto& row : cells)
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (width.size() <= j) width.push_back(0);
            width[j] = std::max(width[j], row[j].size());
        }
    std::string out;
    for (const auto& row : cells) {
        std::string line;
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) line += "  ";
            line += j == 0 ? pad_right(row[j], width[j]) : pad_left(row[j], width[j]);
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + "\n";
    }
    return out;
}

} // namespace

std::string format_number(double value) {
    if (!std::isfinite(value)) throw ReportError("cannot format a non-finite number");
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, clean(value));
    if (ec != std::errc()) throw ReportError("number formatting failed");
    return std::string(buf, ptr);
}

std::string dispatch_csv(const DispatchSolution& sol) {
    const std::size_t n = sol.size();
    std::string out = "step,p_pv,p_grid,p_batt,e_batt,p_curt,p_diesel\n";
    for (std::size_t t = 0; t < n; ++t) {
        out += std::to_string(t < sol.sample_index.size() ? sol.sample_index[t] : t);
        out += ',' + format_number(sol.p_pv.at(t));
        out += ',' + format_number(sol.p_grid[t]);
        out += ',' + format_number(sol.p_batt.at(t));
        out += ',' + format_number(sol.e_batt.at(t));
        out += ',' + (sol.p_curt.empty() ? std::string() : format_number(sol.p_curt.at(t)));
        out += ',' + (sol.p_diesel.empty() ? std::string() : format_number(sol.p_diesel.at(t)));
        out += '\n';
    }
    return out;
}

ParsedDispatch parse_dispatch_csv(const std::string& text, const std::string& source_name) {
    static const std::vector<std::string> kHeader{"step", "p_pv", "p_grid", "p_batt", "e_batt", "p_curt", "p_diesel"};
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    ParsedDispatch d;
    std::size_t curt_cells = 0, diesel_cells = 0, rows = 0;

    auto number = [&](const std::string& cell, const char* column, double& out) {
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
        if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(out))
            throw ReportError(source_name + ": row " + std::to_string(line_no) + ", column " + column +
                              ": cannot parse '" + cell + "'");
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_row(line);
        if (!header) {
            if (cells != kHeader)
                throw ReportError(source_name + ": expected header step,p_pv,p_grid,p_batt,e_batt,p_curt,p_diesel");
            header = true;
            continue;
        }
        if (cells.size() != kHeader.size())
            throw ReportError(source_name + ": row " + std::to_string(line_no) + ": expected 7 fields, got " +
                              std::to_string(cells.size()));
        double step = 0.0, v = 0.0;
        number(cells[0], "step", step);
        if (step < 0.0 || step != std::floor(step))
            throw ReportError(source_name + ": row " + std::to_string(line_no) + ", column step: not an index");
        if (!d.step.empty() && static_cast<std::size_t>(step) <= d.step.back())
            throw ReportError(source_name + ": row " + std::to_string(line_no) + ": step must increase");
        d.step.push_back(static_cast<std::size_t>(step));
        number(cells[1], "p_pv", v), d.p_pv.push_back(v);
        number(cells[2], "p_grid", v), d.p_grid.push_back(v);
        number(cells[3], "p_batt", v), d.p_batt.push_back(v);
        number(cells[4], "e_batt", v), d.e_batt.push_back(v);
        if (!cells[5].empty()) number(cells[5], "p_curt", v), d.p_curt.push_back(v), ++curt_cells;
        if (!cells[6].empty()) number(cells[6], "p_diesel", v), d.p_diesel.push_back(v), ++diesel_cells;
        ++rows;
    }
    if (!header) throw ReportError(source_name + ": empty dispatch file");
    if (rows < 2) throw ReportError(source_name + ": need at least 2 dispatch rows");
    if (curt_cells != 0 && curt_cells != rows)
        throw ReportError(source_name + ": p_curt must be filled on every row or on none");
    if (diesel_cells != 0 && diesel_cells != rows)
        throw ReportError(source_name + ": p_diesel must be filled on every row or on none");
    d.has_curtailment = curt_cells != 0;
    d.has_diesel = diesel_cells != 0;
    return d;
}

ojson summary_json(const CaseSummary& s) {
    ojson j;
    j["case"] = std::string(to_string(s.case_id));
    j["status"] = s.status;
    j["battery"] = s.battery;
    j["steps"] = s.steps;
    j["iterations"] = s.iterations;
    j["net_benefit"] = clean(s.net_benefit);
    j["p_batt_max_kw"] = clean(s.p_batt_max);
    j["e_batt_max_kwh"] = clean(s.e_batt_max);
    j["p_diesel_max_kw"] = clean(s.p_diesel_max);
    j["diesel_energy_kwh"] = clean(s.diesel_energy);
    j["e_diesel_max_kwh"] = clean(s.e_diesel_max);
    j["max_curtailed_kw"] = clean(s.max_curtailed);
    j["validation_pass"] = s.validation_pass;
    return j;
}

CaseSummary summary_from_json(const nlohmann::json& doc) {
    CaseSummary s;
    try {
        const auto id = parse_case_id(doc.at("case").get<std::string>());
        if (!id) throw ReportError("summary: unknown case");
        s.case_id = *id;
        s.status = doc.at("status").get<std::string>();
        s.battery = doc.value("battery", std::string());
        s.steps = doc.at("steps").get<std::size_t>();
        s.net_benefit = doc.at("net_benefit").get<double>();
        s.p_batt_max = doc.at("p_batt_max_kw").get<double>();
        s.e_batt_max = doc.at("e_batt_max_kwh").get<double>();
        s.p_diesel_max = doc.at("p_diesel_max_kw").get<double>();
        s.diesel_energy = doc.value("diesel_energy_kwh", 0.0);
        s.e_diesel_max = doc.value("e_diesel_max_kwh", 0.0);
        s.validation_pass = doc.value("validation_pass", false);
    } catch (const nlohmann::json::exception& e) {
        throw ReportError(std::string("summary: ") + e.what());
    }
    return s;
}

ojson validation_json(const ValidationReport& rep) {
    ojson j;
    j["pass"] = rep.pass;
    ojson r = ojson::object();
    for (const auto& [name, c] : rep.residuals) {
        ojson e;
        e["max_residual"] = clean(c.max_residual);
        e["worst_step"] = c.worst_step;
        e["tolerance"] = c.tolerance;
        e["pass"] = c.max_residual <= c.tolerance;
        r[name] = e;
    }
    j["residuals"] = r;
    return j;
}

ojson comparison_json(const CaseComparison& cmp) {
    ojson j;
    j["baseline_net_benefit"] = clean(cmp.baseline_net_benefit);
    ojson rows = ojson::array();
    for (const auto& r : cmp.rows) {
        ojson e;
        e["case"] = std::string(to_string(r.case_id));
        e["net_benefit"] = clean(r.net_benefit);
        e["decrement_pct"] = clean(100.0 * r.decrement);
        e["p_batt_max_kw"] = clean(r.p_batt_max);
        e["e_batt_max_kwh"] = clean(r.e_batt_max);
        if (r.has_diesel) e["p_diesel_max_kw"] = clean(r.p_diesel_max);
        if (r.has_curtailment) e["max_curtailed_kw"] = clean(r.max_curtailed);
        rows.push_back(e);
    }
    j["cases"] = rows;
    return j;
}

std::string comparison_table(const CaseComparison& cmp) {
    std::vector<std::vector<std::string>> cells(7);
    cells[0].push_back("");
    cells[1].push_back("Net revenue ($)");
    cells[2].push_back("Decrement vs. no smoothing (%)");
    cells[3].push_back("Battery power rating (kW)");
    cells[4].push_back("Battery energy rating (kWh)");
    cells[5].push_back("Diesel power rating (kW)");
    cells[6].push_back("Max curtailed power (kW)");
    for (const auto& r : cmp.rows) {
        cells[0].push_back(std::string(to_string(r.case_id)));
        cells[1].push_back(fixed(r.net_benefit, 2));
        cells[2].push_back(fixed(-100.0 * r.decrement, 3));
        cells[3].push_back(fixed(r.p_batt_max, 3));
        cells[4].push_back(fixed(r.e_batt_max, 3));
        cells[5].push_back(r.has_diesel ? fixed(r.p_diesel_max, 3) : "-");
        cells[6].push_back(r.has_curtailment ? fixed(r.max_curtailed, 3) : "-");
    }
    return "Baseline net revenue ($): " + fixed(cmp.baseline_net_benefit, 2) + "\n" + render_table(cells);
}

ojson battery_select_json(const std::vector<BatteryRank>& ranks, double baseline_net_benefit) {
    ojson j;
    j["baseline_net_benefit"] = clean(baseline_net_benefit);
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        const auto& r = ranks[i];
        ojson e;
        e["rank"] = i + 1;
        e["battery"] = r.name;
        e["status"] = r.status;
        e["net_benefit"] = clean(r.net_benefit);
        e["imposed_cost_pct"] = clean(r.imposed_cost_pct);
        e["p_batt_max_kw"] = clean(r.p_batt_max);
        e["e_batt_max_kwh"] = clean(r.e_batt_max);
        rows.push_back(e);
    }
    j["ranking"] = rows;
    return j;
}

std::string battery_select_table(const std::vector<BatteryRank>& ranks) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"Rank", "Battery", "Net benefit ($)", "Imposed cost (%)", "Power rating (kW)",
                     "Energy rating (kWh)"});
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        const auto& r = ranks[i];
        if (r.status != "optimal") {
            cells.push_back({std::to_string(i + 1), r.name, r.status, "-", "-", "-"});
            continue;
        }
        cells.push_back({std::to_string(i + 1), r.name, fixed(r.net_benefit, 2), fixed(r.imposed_cost_pct, 3),
                         fixed(r.p_batt_max, 3), fixed(r.e_batt_max, 3)});
    }
    return render_table(cells);
}

std::string dump(const ojson& doc) { return doc.dump(2) + "\n"; }

} // namespace pvsmooth
