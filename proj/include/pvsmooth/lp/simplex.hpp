#pragma once

#include "pvsmooth/lp/problem.hpp"

#include <Eigen/SparseLU>

#include <cstdint>
#include <string_view>

namespace pvsmooth::lp {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit, NumericalError };

constexpr std::string_view to_string(Status s) {
    switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration-limit";
    case Status::NumericalError: return "numerical-error";
    }
    return "unknown";
}

enum class PivotRule { Dantzig, Bland };

/// Position of a column in the final basis.
enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper, FreeZero };

struct SolverOptions {
    double feasibility_tolerance = 1e-7;
    /// Reduced-cost tolerance, relative to max(1, max |c_j|).
    double optimality_tolerance = 1e-9;
    double pivot_tolerance = 1e-9;
    /// 0 selects 50 * (rows + columns).
    std::int64_t max_iterations = 0;
    PivotRule pivot_rule = PivotRule::Dantzig;
    int refactor_interval = 50;
    /// Switch from Dantzig to Bland after this many consecutive non-improving pivots.
    int stall_threshold = 200;
};

template <typename Scalar>
struct LpSolution {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Status status = Status::NumericalError;
    Vector x;
    Scalar objective_value = 0;
    std::int64_t iterations = 0;
    Scalar max_primal_residual = 0;
    Scalar max_bound_violation = 0;
    /// Row prices and reduced costs c_j - y'a_j, both in the problem's own sense.
    Vector row_duals;
    Vector reduced_costs;
    std::vector<VarStatus> column_status;
    int refactorizations = 0;
};

namespace detail {

/// Bounded-variable revised simplex on  [A | -I] (x, r) = 0,  l <= (x, r) <= u.
/// Each row i gets a logical r_i = a_i x whose bounds encode the relation.
/// Phase one minimizes the sum of bound infeasibilities of the basic
/// variables; phase two minimizes the (sign-adjusted) objective.
template <typename Scalar>
class RevisedSimplex {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::ColMajor, Index>;

    RevisedSimplex(const LpProblem<Scalar>& problem, const SolverOptions& options)
        : problem_(problem), options_(options), A_(problem.matrix()), m_(problem.n_rows()),
          n_(problem.n_vars()), total_(m_ + n_) {
        lower_.resize(total_);
        upper_.resize(total_);
        cost_ = Vector::Zero(total_);
        const Scalar sign = problem.sense() == Sense::Maximize ? Scalar(-1) : Scalar(1);
        for (Index j = 0; j < n_; ++j) {
            lower_[j] = problem.lower()[j];
            upper_[j] = problem.upper()[j];
            cost_[j] = sign * problem.objective()[j];
        }
        for (Index i = 0; i < m_; ++i) {
            const auto& row = problem.rows()[static_cast<std::size_t>(i)];
            switch (row.relation) {
            case Relation::LessEqual: lower_[n_ + i] = -kInf<Scalar>; upper_[n_ + i] = row.rhs; break;
            case Relation::GreaterEqual: lower_[n_ + i] = row.rhs; upper_[n_ + i] = kInf<Scalar>; break;
            case Relation::Equal: lower_[n_ + i] = row.rhs; upper_[n_ + i] = row.rhs; break;
            }
        }
        const Scalar cmax = n_ > 0 ? cost_.head(n_).cwiseAbs().maxCoeff() : Scalar(0);
        opt_tol_ = Scalar(options.optimality_tolerance) * std::max<Scalar>(1, cmax);
        feas_tol_ = Scalar(options.feasibility_tolerance);
        piv_tol_ = Scalar(options.pivot_tolerance);
        max_iter_ = options.max_iterations > 0 ? options.max_iterations
                                               : std::int64_t{50} * static_cast<std::int64_t>(m_ + n_ + 1);
    }

    LpSolution<Scalar> run() {
        init_slack_basis();
        LpSolution<Scalar> sol;
        Status status = Status::NumericalError;
        if (!refactor()) {
            sol.status = Status::NumericalError;
            return finish(sol, status);
        }
        status = iterate();
        return finish(sol, status);
    }

private:
    enum class Phase { One, Two };

    const LpProblem<Scalar>& problem_;
    SolverOptions options_;
    const SparseMatrix& A_;
    Index m_, n_, total_;
    Vector lower_, upper_, cost_, x_;
    std::vector<VarStatus> status_;
    std::vector<Index> head_;     // basis position -> variable
    std::vector<Index> position_; // variable -> basis position or -1
    Scalar opt_tol_{}, feas_tol_{}, piv_tol_{};
    std::int64_t max_iter_ = 0;
    std::int64_t iterations_ = 0;
    int refactorizations_ = 0;
    int resets_ = 0;

    mutable Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<Index>> lu_;
    struct Eta {
        Index pos;
        Scalar pivot;
        std::vector<std::pair<Index, Scalar>> entries;
    };
    std::vector<Eta> etas_;

    bool is_fixed(Index j) const { return lower_[j] == upper_[j]; }

    void place_nonbasic(Index j, Scalar near) {
        const bool has_lo = std::isfinite(lower_[j]);
        const bool has_up = std::isfinite(upper_[j]);
        if (has_lo && has_up) {
            const bool use_upper = std::abs(upper_[j] - near) < std::abs(lower_[j] - near);
            status_[j] = use_upper ? VarStatus::AtUpper : VarStatus::AtLower;
            x_[j] = use_upper ? upper_[j] : lower_[j];
        } else if (has_lo) {
            status_[j] = VarStatus::AtLower;
            x_[j] = lower_[j];
        } else if (has_up) {
            status_[j] = VarStatus::AtUpper;
            x_[j] = upper_[j];
        } else {
            status_[j] = VarStatus::FreeZero;
            x_[j] = 0;
        }
    }

    void init_slack_basis() {
        x_ = Vector::Zero(total_);
        status_.assign(static_cast<std::size_t>(total_), VarStatus::AtLower);
        position_.assign(static_cast<std::size_t>(total_), -1);
        head_.resize(static_cast<std::size_t>(m_));
        for (Index j = 0; j < n_; ++j) place_nonbasic(j, 0);
        for (Index i = 0; i < m_; ++i) {
            head_[static_cast<std::size_t>(i)] = n_ + i;
            position_[static_cast<std::size_t>(n_ + i)] = i;
            status_[static_cast<std::size_t>(n_ + i)] = VarStatus::Basic;
        }
    }

    // Falls back to the all-logical basis, keeping structurals at the bound
    // nearest their current value.
    void reset_to_slack_basis() {
        for (Index j = 0; j < n_; ++j) {
            if (status_[static_cast<std::size_t>(j)] == VarStatus::Basic) {
                position_[static_cast<std::size_t>(j)] = -1;
                place_nonbasic(j, x_[j]);
            }
        }
        for (Index i = 0; i < m_; ++i) {
            const Index v = head_[static_cast<std::size_t>(i)];
            if (v != n_ + i && v >= n_) {
                position_[static_cast<std::size_t>(v)] = -1;
                place_nonbasic(v, x_[v]);
            }
        }
        for (Index i = 0; i < m_; ++i) {
            head_[static_cast<std::size_t>(i)] = n_ + i;
            position_[static_cast<std::size_t>(n_ + i)] = i;
            status_[static_cast<std::size_t>(n_ + i)] = VarStatus::Basic;
        }
        ++resets_;
    }

    template <typename Fn>
    void for_column(Index j, Fn&& fn) const {
        if (j < n_) {
            for (typename SparseMatrix::InnerIterator it(A_, j); it; ++it) fn(it.row(), it.value());
        } else {
            fn(j - n_, Scalar(-1));
        }
    }

    bool factorize_basis() {
        SparseMatrix B(m_, m_);
        std::vector<Eigen::Triplet<Scalar, Index>> triplets;
        triplets.reserve(static_cast<std::size_t>(3 * m_));
        for (Index p = 0; p < m_; ++p)
            for_column(head_[static_cast<std::size_t>(p)],
                       [&](Index r, Scalar v) { triplets.emplace_back(r, p, v); });
        B.setFromTriplets(triplets.begin(), triplets.end());
        B.makeCompressed();
        lu_.analyzePattern(B);
        lu_.factorize(B);
        ++refactorizations_;
        etas_.clear();
        return lu_.info() == Eigen::Success;
    }

    bool refactor() {
        if (m_ == 0) return true;
        if (!factorize_basis()) {
            if (resets_ > 2) return false;
            reset_to_slack_basis();
            if (!factorize_basis()) return false;
        }
        recompute_basic_values();
        return true;
    }

    void recompute_basic_values() {
        Vector rhs = Vector::Zero(m_);
        for (Index j = 0; j < total_; ++j) {
            if (status_[static_cast<std::size_t>(j)] == VarStatus::Basic || x_[j] == Scalar(0)) continue;
            const Scalar xj = x_[j];
            for_column(j, [&](Index r, Scalar v) { rhs[r] -= v * xj; });
        }
        Vector xb = ftran(rhs);
        for (Index p = 0; p < m_; ++p) x_[head_[static_cast<std::size_t>(p)]] = xb[p];
    }

    Vector ftran(const Vector& a) const {
        Vector v = lu_.solve(a);
        for (const auto& eta : etas_) {
            const Scalar vr = v[eta.pos] / eta.pivot;
            if (vr != Scalar(0))
                for (const auto& [i, alpha] : eta.entries) v[i] -= alpha * vr;
            v[eta.pos] = vr;
        }
        return v;
    }

    Vector btran(Vector w) const {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            Scalar acc = w[it->pos];
            for (const auto& [i, alpha] : it->entries) acc -= alpha * w[i];
            w[it->pos] = acc / it->pivot;
        }
        return lu_.transpose().solve(w);
    }

    Scalar column_dot(Index j, const Vector& y) const {
        Scalar s = 0;
        for_column(j, [&](Index r, Scalar v) { s += v * y[r]; });
        return s;
    }

    // Phase-one costs of the basic variables; returns the total infeasibility.
    Scalar infeasibility_costs(Vector& cb) const {
        Scalar total = 0;
        cb.setZero(m_);
        for (Index p = 0; p < m_; ++p) {
            const Index v = head_[static_cast<std::size_t>(p)];
            if (x_[v] < lower_[v] - feas_tol_) {
                cb[p] = -1;
                total += lower_[v] - x_[v];
            } else if (x_[v] > upper_[v] + feas_tol_) {
                cb[p] = 1;
                total += x_[v] - upper_[v];
            }
        }
        return total;
    }

    struct Candidate {
        Index var = -1;
        Scalar reduced_cost = 0;
        int direction = 0;
    };

    Candidate price(const Vector& y, Phase phase, bool bland) const {
        Candidate best;
        Scalar best_score = 0;
        const Scalar tol = phase == Phase::One ? Scalar(options_.optimality_tolerance) : opt_tol_;
        for (Index j = 0; j < total_; ++j) {
            const auto st = status_[static_cast<std::size_t>(j)];
            if (st == VarStatus::Basic || is_fixed(j)) continue;
            const Scalar c = phase == Phase::Two ? cost_[j] : Scalar(0);
            const Scalar d = c - column_dot(j, y);
            int dir = 0;
            if ((st == VarStatus::AtLower || st == VarStatus::FreeZero) && d < -tol) dir = 1;
            else if ((st == VarStatus::AtUpper || st == VarStatus::FreeZero) && d > tol) dir = -1;
            if (dir == 0) continue;
            if (bland) return {j, d, dir};
            if (std::abs(d) > best_score) {
                best_score = std::abs(d);
                best = {j, d, dir};
            }
        }
        return best;
    }

    struct Step {
        Index leave_pos = -1; // -1: bound flip of the entering variable
        Scalar length = kInf<Scalar>;
        bool leave_at_upper = false;
    };

    // Bound a basic variable moving at `rate` per unit step will hit, or
    // infinity when it has none in that direction.
    Scalar target_bound(Index v, Scalar rate, Phase phase, bool& at_upper) const {
        const Scalar xv = x_[v];
        if (rate < 0) {
            at_upper = false;
            if (phase == Phase::One) {
                if (xv < lower_[v] - feas_tol_) return -kInf<Scalar>;
                if (xv > upper_[v] + feas_tol_) {
                    at_upper = true;
                    return upper_[v];
                }
            }
            return lower_[v];
        }
        at_upper = true;
        if (phase == Phase::One) {
            if (xv > upper_[v] + feas_tol_) return kInf<Scalar>;
            if (xv < lower_[v] - feas_tol_) {
                at_upper = false;
                return lower_[v];
            }
        }
        return upper_[v];
    }

    Step ratio_test(const Vector& alpha, int dir, Index entering, Phase phase, bool bland) const {
        Step step;
        Scalar flip = kInf<Scalar>;
        if (std::isfinite(lower_[entering]) && std::isfinite(upper_[entering])) flip = upper_[entering] - lower_[entering];

        if (bland) {
            Index best_var = -1;
            for (Index p = 0; p < m_; ++p) {
                const Scalar a = alpha[p];
                if (std::abs(a) <= piv_tol_) continue;
                const Scalar rate = -dir * a;
                const Index v = head_[static_cast<std::size_t>(p)];
                bool at_upper = false;
                const Scalar bound = target_bound(v, rate, phase, at_upper);
                if (!std::isfinite(bound)) continue;
                const Scalar t = std::max<Scalar>(0, (bound - x_[v]) / rate);
                if (t < step.length || (t == step.length && v < best_var)) {
                    step = {p, t, at_upper};
                    best_var = v;
                }
            }
        } else {
            // Harris pass one: longest step keeping every basic variable within
            // its bound relaxed by the feasibility tolerance.
            Scalar relaxed = kInf<Scalar>;
            for (Index p = 0; p < m_; ++p) {
                const Scalar a = alpha[p];
                if (std::abs(a) <= piv_tol_) continue;
                const Scalar rate = -dir * a;
                const Index v = head_[static_cast<std::size_t>(p)];
                bool at_upper = false;
                const Scalar bound = target_bound(v, rate, phase, at_upper);
                if (!std::isfinite(bound)) continue;
                const Scalar slack = rate > 0 ? bound + feas_tol_ - x_[v] : bound - feas_tol_ - x_[v];
                relaxed = std::min(relaxed, std::max<Scalar>(0, slack / rate));
            }
            // Pass two: among blocking candidates within the relaxed step, take
            // the largest pivot magnitude.
            Scalar best_pivot = 0;
            if (std::isfinite(relaxed)) {
                for (Index p = 0; p < m_; ++p) {
                    const Scalar a = alpha[p];
                    if (std::abs(a) <= piv_tol_) continue;
                    const Scalar rate = -dir * a;
                    const Index v = head_[static_cast<std::size_t>(p)];
                    bool at_upper = false;
                    const Scalar bound = target_bound(v, rate, phase, at_upper);
                    if (!std::isfinite(bound)) continue;
                    const Scalar t = std::max<Scalar>(0, (bound - x_[v]) / rate);
                    if (t <= relaxed && std::abs(a) > best_pivot) {
                        best_pivot = std::abs(a);
                        step = {p, t, at_upper};
                    }
                }
            }
        }
        if (flip <= step.length) return {-1, flip, false};
        return step;
    }

    void pivot(Index entering, int dir, const Vector& alpha, const Step& step) {
        const Scalar t = step.length;
        if (t != Scalar(0)) {
            for (Index p = 0; p < m_; ++p)
                if (alpha[p] != Scalar(0)) x_[head_[static_cast<std::size_t>(p)]] -= dir * t * alpha[p];
        }
        if (step.leave_pos < 0) {
            auto& st = status_[static_cast<std::size_t>(entering)];
            st = dir > 0 ? VarStatus::AtUpper : VarStatus::AtLower;
            x_[entering] = dir > 0 ? upper_[entering] : lower_[entering];
            return;
        }
        const Index r = step.leave_pos;
        const Index leaving = head_[static_cast<std::size_t>(r)];
        x_[entering] += dir * t;
        x_[leaving] = step.leave_at_upper ? upper_[leaving] : lower_[leaving];
        status_[static_cast<std::size_t>(leaving)] = step.leave_at_upper ? VarStatus::AtUpper : VarStatus::AtLower;
        position_[static_cast<std::size_t>(leaving)] = -1;
        head_[static_cast<std::size_t>(r)] = entering;
        position_[static_cast<std::size_t>(entering)] = r;
        status_[static_cast<std::size_t>(entering)] = VarStatus::Basic;

        Eta eta{r, alpha[r], {}};
        for (Index p = 0; p < m_; ++p)
            if (p != r && alpha[p] != Scalar(0)) eta.entries.emplace_back(p, alpha[p]);
        etas_.push_back(std::move(eta));
    }

    Status iterate() {
        Vector cb(m_);
        int stalled = 0;
        bool bland = options_.pivot_rule == PivotRule::Bland;
        Phase last_phase = Phase::One;
        bool verified = false;

        while (true) {
            Scalar infeasibility = infeasibility_costs(cb);
            const Phase phase = infeasibility > 0 ? Phase::One : Phase::Two;
            if (phase != last_phase) {
                stalled = 0;
                bland = options_.pivot_rule == PivotRule::Bland;
                last_phase = phase;
            }
            if (phase == Phase::Two)
                for (Index p = 0; p < m_; ++p) cb[p] = cost_[head_[static_cast<std::size_t>(p)]];

            const Vector y = m_ > 0 ? btran(cb) : Vector();
            const Candidate enter = price(y, phase, bland);
            if (enter.var < 0) {
                // Confirm on a fresh factorization before declaring a terminal status.
                if (!verified && !etas_.empty()) {
                    if (!refactor()) return Status::NumericalError;
                    verified = true;
                    continue;
                }
                return phase == Phase::One ? Status::Infeasible : Status::Optimal;
            }
            verified = false;
            if (iterations_ >= max_iter_) return Status::IterationLimit;
            ++iterations_;

            Vector a = Vector::Zero(m_);
            for_column(enter.var, [&](Index r, Scalar v) { a[r] = v; });
            const Vector alpha = m_ > 0 ? ftran(a) : Vector();
            const Step step = ratio_test(alpha, enter.direction, enter.var, phase, bland);
            if (!std::isfinite(step.length)) {
                if (phase == Phase::Two) return Status::Unbounded;
                if (!etas_.empty()) {
                    if (!refactor()) return Status::NumericalError;
                    continue;
                }
                return Status::NumericalError;
            }

            const Scalar gain = std::abs(enter.reduced_cost) * step.length;
            const Scalar scale = phase == Phase::One ? std::max<Scalar>(1, infeasibility) : opt_tol_;
            if (gain > Scalar(1e-12) * scale) {
                stalled = 0;
                bland = options_.pivot_rule == PivotRule::Bland;
            } else if (++stalled >= options_.stall_threshold) {
                bland = true;
            }

            pivot(enter.var, enter.direction, alpha, step);
            if (static_cast<int>(etas_.size()) >= options_.refactor_interval) {
                if (!refactor()) return Status::NumericalError;
            }
        }
    }

    LpSolution<Scalar> finish(LpSolution<Scalar>& sol, Status status) {
        sol.status = status;
        sol.iterations = iterations_;
        sol.refactorizations = refactorizations_;
        sol.x = x_.head(n_);
        if (status == Status::Optimal) {
            for (Index j = 0; j < n_; ++j) sol.x[j] = std::clamp(sol.x[j], lower_[j], upper_[j]);
            const Scalar sign = problem_.sense() == Sense::Maximize ? Scalar(-1) : Scalar(1);
            Vector cb(m_);
            for (Index p = 0; p < m_; ++p) cb[p] = cost_[head_[static_cast<std::size_t>(p)]];
            const Vector y = m_ > 0 ? btran(cb) : Vector();
            sol.row_duals = sign * y;
            sol.reduced_costs.resize(n_);
            for (Index j = 0; j < n_; ++j) sol.reduced_costs[j] = sign * (cost_[j] - column_dot(j, y));
        }
        sol.column_status.assign(status_.begin(), status_.begin() + n_);
        sol.objective_value = problem_.evaluate_objective(sol.x);
        const auto res = residuals(problem_, sol.x);
        sol.max_primal_residual = res.max_primal;
        sol.max_bound_violation = res.max_bound;
        return sol;
    }
};

} // namespace detail

/// Solves `problem` with the two-phase bounded-variable revised simplex.
template <typename Scalar>
LpSolution<Scalar> solve(const LpProblem<Scalar>& problem, const SolverOptions& options = {}) {
    detail::RevisedSimplex<Scalar> solver(problem, options);
    return solver.run();
}

} // namespace pvsmooth::lp
