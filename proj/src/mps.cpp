#include "pvsmooth/lp/mps.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace pvsmooth::lp {

namespace {

constexpr const char* kObjectiveRow = "OBJ";

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

// Field layout: 2-3, 5-12, 15-22, 25-36, 40-47, 50-61 (1-based columns).
std::string fixed_line(const std::string& f1, const std::string& f2, const std::string& f3 = {},
                       const std::string& f4 = {}, const std::string& f5 = {}, const std::string& f6 = {}) {
    std::string line = " " + pad(f1, 2) + " " + pad(f2, 8);
    if (!f3.empty()) line += "  " + pad(f3, 8) + "  " + pad(f4, 12);
    if (!f5.empty()) line += "   " + pad(f5, 8) + "  " + f6;
    while (!line.empty() && line.back() == ' ') line.pop_back();
    return line;
}

std::vector<std::string> unique_names(const std::vector<std::string>& requested, std::size_t count, char prefix,
                                      std::unordered_set<std::string> taken) {
    std::vector<std::string> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::string want = i < requested.size() ? requested[i] : std::string();
        const bool usable = !want.empty() && want.size() <= 8 && want.find_first_of(" \t") == std::string::npos &&
                            want[0] != '*' && !taken.count(want);
        if (usable) {
            out[i] = want;
        } else {
            char buf[16];
            std::size_t k = i + 1;
            do {
                std::snprintf(buf, sizeof buf, "%c%07zu", prefix, k);
                k += count;
            } while (taken.count(buf));
            out[i] = buf;
        }
        taken.insert(out[i]);
    }
    return out;
}

std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> tokens;
    std::string t;
    while (in >> t) tokens.push_back(t);
    return tokens;
}

double parse_number(const std::string& token, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw MpsError("line " + std::to_string(line_no) + ": invalid number '" + token + "'");
    }
}

} // namespace

// Exactness wins over the column width; the reader splits on whitespace.
std::string format_mps_number(double value, std::size_t /*width*/) {
    if (value == 0.0) return "0";
    char buf[64];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string to_mps(const Problem& problem, const std::string& name) {
    const auto n = static_cast<std::size_t>(problem.n_vars());
    const auto m = static_cast<std::size_t>(problem.n_rows());

    std::vector<std::string> requested_rows(m);
    for (std::size_t i = 0; i < m; ++i) requested_rows[i] = problem.rows()[i].name;
    const auto row_names = unique_names(requested_rows, m, 'R', {kObjectiveRow});
    const auto col_names = unique_names(problem.column_names(), n, 'C', {});

    std::ostringstream out;
    out << "* SENSE: " << (problem.sense() == Sense::Maximize ? "MAX" : "MIN") << '\n';
    out << pad("NAME", 14) << name.substr(0, 8) << '\n';
    out << "ROWS\n";
    out << fixed_line("N", kObjectiveRow) << '\n';
    for (std::size_t i = 0; i < m; ++i) {
        const char* kind = "L";
        if (problem.rows()[i].relation == Relation::GreaterEqual) kind = "G";
        if (problem.rows()[i].relation == Relation::Equal) kind = "E";
        out << fixed_line(kind, row_names[i]) << '\n';
    }

    out << "COLUMNS\n";
    const auto& A = problem.matrix();
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::pair<std::string, double>> entries;
        const double c = problem.objective()[static_cast<Index>(j)];
        if (c != 0.0) entries.emplace_back(kObjectiveRow, c);
        for (Problem::SparseMatrix::InnerIterator it(A, static_cast<Index>(j)); it; ++it)
            if (it.value() != 0.0) entries.emplace_back(row_names[static_cast<std::size_t>(it.row())], it.value());
        // A column with no entries still has to be declared.
        if (entries.empty()) entries.emplace_back(kObjectiveRow, 0.0);
        for (std::size_t k = 0; k < entries.size(); k += 2) {
            if (k + 1 < entries.size())
                out << fixed_line("", col_names[j], entries[k].first, format_mps_number(entries[k].second),
                                  entries[k + 1].first, format_mps_number(entries[k + 1].second))
                    << '\n';
            else
                out << fixed_line("", col_names[j], entries[k].first, format_mps_number(entries[k].second)) << '\n';
        }
    }

    out << "RHS\n";
    if (problem.objective_offset() != 0.0)
        out << fixed_line("", "RHS", kObjectiveRow, format_mps_number(-problem.objective_offset())) << '\n';
    for (std::size_t i = 0; i < m; ++i)
        if (problem.rows()[i].rhs != 0.0)
            out << fixed_line("", "RHS", row_names[i], format_mps_number(problem.rows()[i].rhs)) << '\n';

    out << "RANGES\n";
    out << "BOUNDS\n";
    for (std::size_t j = 0; j < n; ++j) {
        const double lo = problem.lower()[static_cast<Index>(j)];
        const double up = problem.upper()[static_cast<Index>(j)];
        const auto& cn = col_names[j];
        if (lo == up) {
            out << fixed_line("FX", "BND", cn, format_mps_number(lo)) << '\n';
            continue;
        }
        if (std::isinf(lo) && std::isinf(up)) {
            out << fixed_line("FR", "BND", cn) << '\n';
            continue;
        }
        if (std::isinf(lo)) out << fixed_line("MI", "BND", cn) << '\n';
        else if (lo != 0.0) out << fixed_line("LO", "BND", cn, format_mps_number(lo)) << '\n';
        if (!std::isinf(up)) out << fixed_line("UP", "BND", cn, format_mps_number(up)) << '\n';
    }
    out << "ENDATA\n";
    return out.str();
}

Problem from_mps(const std::string& text) {
    enum class Section { None, Name, ObjSense, Rows, Columns, Rhs, Ranges, Bounds, End };
    Section section = Section::None;
    Sense sense = Sense::Minimize;
    bool seen_rows = false, seen_columns = false;

    std::string objective_name;
    std::unordered_map<std::string, std::size_t> row_index;
    std::vector<Row<double>> rows;
    std::unordered_map<std::string, std::size_t> col_index;
    std::vector<std::string> col_names;
    std::vector<ColumnBounds<double>> bounds;
    std::vector<double> objective;
    std::vector<std::map<std::size_t, double>> row_entries;
    double offset = 0.0;

    auto column = [&](const std::string& cname) {
        auto [it, inserted] = col_index.emplace(cname, col_names.size());
        if (inserted) {
            col_names.push_back(cname);
            bounds.push_back({0.0, kInf<double>});
            objective.push_back(0.0);
        }
        return it->second;
    };

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '*') {
            auto tokens = tokenize(line.substr(1));
            if (tokens.size() == 2 && tokens[0] == "SENSE:") {
                if (tokens[1] == "MAX") sense = Sense::Maximize;
                else if (tokens[1] == "MIN") sense = Sense::Minimize;
            }
            continue;
        }
        auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        const std::string where = "line " + std::to_string(line_no);

        if (line[0] != ' ' && line[0] != '\t') {
            const std::string& head = tokens[0];
            if (head == "NAME") section = Section::Name;
            else if (head == "OBJSENSE") {
                section = Section::ObjSense;
                if (tokens.size() > 1) {
                    sense = tokens[1].rfind("MAX", 0) == 0 ? Sense::Maximize : Sense::Minimize;
                    section = Section::None;
                }
            } else if (head == "ROWS") { section = Section::Rows; seen_rows = true; }
            else if (head == "COLUMNS") {
                if (!seen_rows) throw MpsError(where + ": COLUMNS before ROWS");
                section = Section::Columns;
                seen_columns = true;
            } else if (head == "RHS") section = Section::Rhs;
            else if (head == "RANGES") section = Section::Ranges;
            else if (head == "BOUNDS") section = Section::Bounds;
            else if (head == "ENDATA") { section = Section::End; break; }
            else throw MpsError(where + ": malformed section header '" + head + "'");
            if ((section == Section::Rhs || section == Section::Ranges || section == Section::Bounds) && !seen_columns)
                throw MpsError(where + ": missing COLUMNS section");
            continue;
        }

        switch (section) {
        case Section::ObjSense:
            sense = tokens[0].rfind("MAX", 0) == 0 ? Sense::Maximize : Sense::Minimize;
            break;
        case Section::Rows: {
            if (tokens.size() != 2) throw MpsError(where + ": ROWS entry needs a type and a name");
            const std::string& kind = tokens[0];
            if (kind == "N") {
                if (objective_name.empty()) objective_name = tokens[1];
                break; // further free rows are ignored
            }
            Relation rel;
            if (kind == "L") rel = Relation::LessEqual;
            else if (kind == "G") rel = Relation::GreaterEqual;
            else if (kind == "E") rel = Relation::Equal;
            else throw MpsError(where + ": unknown row type '" + kind + "'");
            if (!row_index.emplace(tokens[1], rows.size()).second)
                throw MpsError(where + ": duplicate row '" + tokens[1] + "'");
            rows.push_back({{}, rel, 0.0, tokens[1]});
            row_entries.emplace_back();
            break;
        }
        case Section::Columns: {
            if (tokens.size() != 3 && tokens.size() != 5)
                throw MpsError(where + ": COLUMNS entry needs 3 or 5 fields");
            if (tokens[1] == "'MARKER'") throw MpsError(where + ": integer markers are not supported");
            const std::size_t j = column(tokens[0]);
            for (std::size_t k = 1; k + 1 < tokens.size(); k += 2) {
                const double v = parse_number(tokens[k + 1], line_no);
                if (tokens[k] == objective_name) {
                    objective[j] = v;
                    continue;
                }
                auto it = row_index.find(tokens[k]);
                if (it == row_index.end()) {
                    // Entries in ignored free rows are dropped.
                    continue;
                }
                row_entries[it->second][j] += v;
            }
            break;
        }
        case Section::Rhs: {
            const std::size_t first = tokens.size() % 2 == 1 ? 1 : 0;
            if (tokens.size() < 2) throw MpsError(where + ": RHS entry too short");
            for (std::size_t k = first; k + 1 < tokens.size(); k += 2) {
                const double v = parse_number(tokens[k + 1], line_no);
                if (tokens[k] == objective_name) {
                    offset = -v;
                    continue;
                }
                auto it = row_index.find(tokens[k]);
                if (it == row_index.end()) throw MpsError(where + ": RHS for unknown row '" + tokens[k] + "'");
                rows[it->second].rhs = v;
            }
            break;
        }
        case Section::Ranges:
            throw MpsError(where + ": RANGES entries are not supported");
        case Section::Bounds: {
            const std::string& key = tokens[0];
            const bool needs_value = key == "UP" || key == "LO" || key == "FX";
            const bool no_value = key == "FR" || key == "MI" || key == "PL";
            if (!needs_value && !no_value) throw MpsError(where + ": unknown bound key '" + key + "'");
            std::string cname;
            double v = 0.0;
            if (needs_value) {
                if (tokens.size() == 4) cname = tokens[2];
                else if (tokens.size() == 3) cname = tokens[1];
                else throw MpsError(where + ": malformed bound entry");
                v = parse_number(tokens.back(), line_no);
            } else {
                if (tokens.size() == 3) cname = tokens[2];
                else if (tokens.size() == 2) cname = tokens[1];
                else throw MpsError(where + ": malformed bound entry");
            }
            auto it = col_index.find(cname);
            if (it == col_index.end()) throw MpsError(where + ": bound on unknown column '" + cname + "'");
            auto& b = bounds[it->second];
            if (key == "UP") b.upper = v;
            else if (key == "LO") b.lower = v;
            else if (key == "FX") b.lower = b.upper = v;
            else if (key == "FR") { b.lower = -kInf<double>; b.upper = kInf<double>; }
            else if (key == "MI") b.lower = -kInf<double>;
            else if (key == "PL") b.upper = kInf<double>;
            break;
        }
        case Section::Name:
        case Section::None:
        case Section::End:
            throw MpsError(where + ": data line outside of a section");
        }
    }
    if (!seen_columns) throw MpsError("missing COLUMNS section");
    if (section != Section::End) throw MpsError("missing ENDATA");

    for (std::size_t i = 0; i < rows.size(); ++i)
        for (const auto& [j, v] : row_entries[i]) rows[i].entries.emplace_back(static_cast<Index>(j), v);
    try {
        return build_problem<double>(sense, std::move(bounds), std::move(rows), std::move(objective), offset,
                                     std::move(col_names));
    } catch (const ProblemError& e) {
        throw MpsError(std::string("invalid problem: ") + e.what());
    }
}

void write_mps(const Problem& problem, const std::filesystem::path& path, const std::string& name) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw MpsError("cannot write " + path.string());
    f << to_mps(problem, name);
}

Problem read_mps(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw MpsError("cannot open " + path.string());
    std::ostringstream buf;
    buf << f.rdbuf();
    return from_mps(buf.str());
}

} // namespace pvsmooth::lp
