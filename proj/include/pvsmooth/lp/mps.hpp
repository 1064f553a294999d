#pragma once

#include "pvsmooth/lp/problem.hpp"

#include <filesystem>
#include <string>

namespace pvsmooth::lp {

class MpsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Fixed-format MPS. The objective sense travels in a `* SENSE: MAX|MIN`
// comment line; the objective constant is the negated RHS entry of the
// objective row. Names longer than 8 characters, duplicated after
// truncation, or containing spaces are replaced by generated `Cnnnnnnn` /
// `Rnnnnnnn` labels. Numbers use the 12-character field when their
// shortest exact rendering fits and overflow it otherwise.

std::string to_mps(const Problem& problem, const std::string& name = "PVSMOOTH");
Problem from_mps(const std::string& text);

void write_mps(const Problem& problem, const std::filesystem::path& path, const std::string& name = "PVSMOOTH");
Problem read_mps(const std::filesystem::path& path);

/// Shortest `%g` rendering of `value` that reads back exactly. Usually fits
/// the `width`-character field; values that need more digits overflow it.
std::string format_mps_number(double value, std::size_t width = 12);

} // namespace pvsmooth::lp
