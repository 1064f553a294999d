#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace pvsmooth::lp {

using Index = Eigen::Index;

class ProblemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Sense { Maximize, Minimize };
enum class Relation { LessEqual, Equal, GreaterEqual };

template <typename Scalar>
inline constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();

template <typename Scalar>
struct Row {
    std::vector<std::pair<Index, Scalar>> entries;
    Relation relation = Relation::LessEqual;
    Scalar rhs = 0;
    std::string name;
};

template <typename Scalar>
struct ColumnBounds {
    Scalar lower = 0;
    Scalar upper = kInf<Scalar>;
};

/// A linear program  opt c'x + offset  s.t.  rows,  lower <= x <= upper.
/// Immutable once built; construct through build_problem() or ProblemBuilder.
template <typename Scalar>
class LpProblem {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::ColMajor, Index>;

    LpProblem() = default;

    Sense sense() const { return sense_; }
    Index n_vars() const { return objective_.size(); }
    Index n_rows() const { return static_cast<Index>(rows_.size()); }
    const Vector& objective() const { return objective_; }
    Scalar objective_offset() const { return offset_; }
    const Vector& lower() const { return lower_; }
    const Vector& upper() const { return upper_; }
    const std::vector<Row<Scalar>>& rows() const { return rows_; }
    const std::vector<std::string>& column_names() const { return column_names_; }

    /// Column-major constraint matrix, rows in insertion order.
    const SparseMatrix& matrix() const { return matrix_; }

    Vector rhs() const {
        Vector b(n_rows());
        for (Index i = 0; i < n_rows(); ++i) b[i] = rows_[static_cast<std::size_t>(i)].rhs;
        return b;
    }

    Scalar evaluate_objective(const Vector& x) const { return objective_.dot(x) + offset_; }

    /// Copy with every objective coefficient and the offset multiplied by `factor`.
    LpProblem scaled_objective(Scalar factor) const {
        LpProblem out = *this;
        out.objective_ *= factor;
        out.offset_ *= factor;
        return out;
    }

    static LpProblem build(Sense sense, std::vector<ColumnBounds<Scalar>> bounds, std::vector<Row<Scalar>> rows,
                           std::vector<Scalar> objective, Scalar offset, std::vector<std::string> column_names);

private:
    Sense sense_ = Sense::Maximize;
    Vector objective_;
    Scalar offset_ = 0;
    Vector lower_;
    Vector upper_;
    std::vector<Row<Scalar>> rows_;
    std::vector<std::string> column_names_;
    SparseMatrix matrix_;
};

/// Validates and assembles a problem. Rejects out-of-range or duplicate
/// column indices within a row, NaN or infinite coefficients, and
/// lower > upper. Infinite bounds are allowed.
template <typename Scalar>
LpProblem<Scalar> build_problem(Sense sense, std::vector<ColumnBounds<Scalar>> bounds, std::vector<Row<Scalar>> rows,
                                std::vector<Scalar> objective, Scalar offset = 0,
                                std::vector<std::string> column_names = {}) {
    return LpProblem<Scalar>::build(sense, std::move(bounds), std::move(rows), std::move(objective), offset,
                                    std::move(column_names));
}

template <typename Scalar>
LpProblem<Scalar> LpProblem<Scalar>::build(Sense sense, std::vector<ColumnBounds<Scalar>> bounds,
                                           std::vector<Row<Scalar>> rows, std::vector<Scalar> objective,
                                           Scalar offset, std::vector<std::string> column_names) {
    using std::isfinite;
    using std::isnan;
    const auto n = static_cast<Index>(bounds.size());
    if (static_cast<Index>(objective.size()) != n)
        throw ProblemError("objective has " + std::to_string(objective.size()) + " coefficients for " +
                           std::to_string(n) + " columns");
    if (!column_names.empty() && static_cast<Index>(column_names.size()) != n)
        throw ProblemError("column name count does not match column count");
    if (!isfinite(offset)) throw ProblemError("objective offset must be finite");

    LpProblem<Scalar> p;
    p.sense_ = sense;
    p.offset_ = offset;
    p.objective_.resize(n);
    p.lower_.resize(n);
    p.upper_.resize(n);
    for (Index j = 0; j < n; ++j) {
        const auto& b = bounds[static_cast<std::size_t>(j)];
        if (isnan(b.lower) || isnan(b.upper)) throw ProblemError("column " + std::to_string(j) + ": NaN bound");
        if (b.lower > b.upper)
            throw ProblemError("column " + std::to_string(j) + ": lower bound exceeds upper bound");
        if (b.lower == kInf<Scalar> || b.upper == -kInf<Scalar>)
            throw ProblemError("column " + std::to_string(j) + ": bound infinite on the wrong side");
        const Scalar c = objective[static_cast<std::size_t>(j)];
        if (!isfinite(c)) throw ProblemError("column " + std::to_string(j) + ": non-finite objective coefficient");
        p.objective_[j] = c;
        p.lower_[j] = b.lower;
        p.upper_[j] = b.upper;
    }

    std::vector<Eigen::Triplet<Scalar, Index>> triplets;
    std::unordered_set<Index> seen;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string label = row.name.empty() ? "row " + std::to_string(i) : "row '" + row.name + "'";
        if (!isfinite(row.rhs)) throw ProblemError(label + ": non-finite right-hand side");
        seen.clear();
        for (const auto& [col, coef] : row.entries) {
            if (col < 0 || col >= n)
                throw ProblemError(label + ": column index " + std::to_string(col) + " out of range [0, " +
                                   std::to_string(n) + ")");
            if (!seen.insert(col).second)
                throw ProblemError(label + ": duplicate column index " + std::to_string(col));
            if (!isfinite(coef)) throw ProblemError(label + ": non-finite coefficient");
            triplets.emplace_back(static_cast<Index>(i), col, coef);
        }
    }
    p.rows_ = std::move(rows);
    p.column_names_ = std::move(column_names);
    p.matrix_.resize(static_cast<Index>(p.rows_.size()), n);
    p.matrix_.setFromTriplets(triplets.begin(), triplets.end());
    p.matrix_.makeCompressed();
    return p;
}

/// Incremental assembly of a problem by named columns and rows.
template <typename Scalar>
class ProblemBuilder {
public:
    explicit ProblemBuilder(Sense sense) : sense_(sense) {}

    Index add_column(std::string name, Scalar lower, Scalar upper, Scalar cost = 0) {
        bounds_.push_back({lower, upper});
        objective_.push_back(cost);
        names_.push_back(std::move(name));
        return static_cast<Index>(bounds_.size()) - 1;
    }

    Index add_row(std::string name, std::vector<std::pair<Index, Scalar>> entries, Relation relation, Scalar rhs) {
        rows_.push_back({std::move(entries), relation, rhs, std::move(name)});
        return static_cast<Index>(rows_.size()) - 1;
    }

    void set_cost(Index col, Scalar cost) { objective_[static_cast<std::size_t>(col)] = cost; }
    void add_offset(Scalar value) { offset_ += value; }
    Index n_columns() const { return static_cast<Index>(bounds_.size()); }

    LpProblem<Scalar> build() const {
        return build_problem<Scalar>(sense_, bounds_, rows_, objective_, offset_, names_);
    }

private:
    Sense sense_;
    std::vector<ColumnBounds<Scalar>> bounds_;
    std::vector<Row<Scalar>> rows_;
    std::vector<Scalar> objective_;
    std::vector<std::string> names_;
    Scalar offset_ = 0;
};

template <typename Scalar>
struct Residuals {
    Scalar max_primal = 0;
    Scalar max_bound = 0;
    Index worst_row = -1;
    Index worst_column = -1;
};

/// Row and bound violations of `x`, computed straight from the stored rows.
template <typename Scalar>
Residuals<Scalar> residuals(const LpProblem<Scalar>& problem,
                            const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) {
    Residuals<Scalar> r;
    for (Index i = 0; i < problem.n_rows(); ++i) {
        const auto& row = problem.rows()[static_cast<std::size_t>(i)];
        Scalar activity = 0;
        for (const auto& [col, coef] : row.entries) activity += coef * x[col];
        Scalar v = 0;
        switch (row.relation) {
        case Relation::LessEqual: v = std::max<Scalar>(0, activity - row.rhs); break;
        case Relation::GreaterEqual: v = std::max<Scalar>(0, row.rhs - activity); break;
        case Relation::Equal: v = std::abs(activity - row.rhs); break;
        }
        if (v > r.max_primal) {
            r.max_primal = v;
            r.worst_row = i;
        }
    }
    for (Index j = 0; j < problem.n_vars(); ++j) {
        const Scalar v = std::max<Scalar>({Scalar(0), problem.lower()[j] - x[j], x[j] - problem.upper()[j]});
        if (v > r.max_bound) {
            r.max_bound = v;
            r.worst_column = j;
        }
    }
    return r;
}

using Problem = LpProblem<double>;

} // namespace pvsmooth::lp
