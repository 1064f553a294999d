#include "doctest.h"

#include "lp_oracle.hpp"
#include "random_lp.hpp"

#include "pvsmooth/lp/simplex.hpp"

using namespace pvsmooth;
using lp::Relation;
using lp::Sense;
using lp::Status;

namespace {

constexpr double inf = lp::kInf<double>;

lp::Problem two_box() {
    return lp::build_problem<double>(Sense::Maximize, {{0, inf}, {0, inf}},
                                     {{{{0, 1.0}}, Relation::LessEqual, 1.0, "x_cap"},
                                      {{{1, 1.0}}, Relation::LessEqual, 2.0, "y_cap"}},
                                     {1.0, 1.0});
}

} // namespace

TEST_CASE("build_problem validates indices, bounds and coefficients") {
    const auto p = two_box();
    CHECK(p.n_vars() == 2);
    CHECK(p.n_rows() == 2);

    CHECK_THROWS_AS(lp::build_problem<double>(Sense::Maximize, {{0, inf}, {0, inf}},
                                              {{{{5, 1.0}}, Relation::LessEqual, 1.0, ""}}, {1.0, 1.0}),
                    lp::ProblemError);
    CHECK_THROWS_AS(lp::build_problem<double>(Sense::Maximize, {{1.0, 0.0}}, {}, {1.0}), lp::ProblemError);
    CHECK_THROWS_AS(lp::build_problem<double>(Sense::Maximize, {{0, inf}},
                                              {{{{0, std::nan("")}}, Relation::LessEqual, 1.0, ""}}, {1.0}),
                    lp::ProblemError);
    CHECK_THROWS_AS(lp::build_problem<double>(Sense::Maximize, {{0, inf}},
                                              {{{{0, 1.0}, {0, 2.0}}, Relation::LessEqual, 1.0, ""}}, {1.0}),
                    lp::ProblemError);
    CHECK_THROWS_AS(lp::build_problem<double>(Sense::Maximize, {{0, inf}}, {}, {inf}), lp::ProblemError);
}

TEST_CASE("solve: box maximum by inspection") {
    const auto s = lp::solve(two_box());
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective_value == doctest::Approx(3.0));
    CHECK(s.x[0] == doctest::Approx(1.0));
    CHECK(s.x[1] == doctest::Approx(2.0));
}

TEST_CASE("solve: unbounded and infeasible") {
    const auto unbounded = lp::build_problem<double>(Sense::Maximize, {{0, inf}}, {}, {1.0});
    CHECK(lp::solve(unbounded).status == Status::Unbounded);

    const auto infeasible = lp::build_problem<double>(
        Sense::Minimize, {{0, inf}, {0, inf}},
        {{{{0, 1.0}, {1, 1.0}}, Relation::LessEqual, 1.0, ""}, {{{0, 1.0}, {1, 1.0}}, Relation::GreaterEqual, 2.0, ""}},
        {1.0, 1.0});
    CHECK(lp::solve(infeasible).status == Status::Infeasible);
}

TEST_CASE("solve: free and negative-bounded columns, equality rows") {
    // min x + 5y + 21 via z = 7 + y; the textbook TESTPROB optimum is 16.
    const auto p = lp::build_problem<double>(Sense::Minimize, {{0, 4}, {-1, 1}, {0, inf}},
                                             {{{{0, 1.0}, {1, 1.0}}, Relation::LessEqual, 4.0, "LIM1"},
                                              {{{0, 1.0}, {2, 1.0}}, Relation::GreaterEqual, 1.0, "LIM2"},
                                              {{{1, -1.0}, {2, 1.0}}, Relation::Equal, 7.0, "MYEQN"}},
                                             {1.0, 2.0, 3.0});
    const auto s = lp::solve(p);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective_value == doctest::Approx(16.0));
    CHECK(s.x[1] == doctest::Approx(-1.0));
    CHECK(s.x[2] == doctest::Approx(6.0));

    // A free column that must go negative.
    const auto f = lp::build_problem<double>(Sense::Minimize, {{-inf, inf}},
                                             {{{{0, 1.0}}, Relation::GreaterEqual, -3.0, ""}}, {1.0});
    const auto sf = lp::solve(f);
    REQUIRE(sf.status == Status::Optimal);
    CHECK(sf.x[0] == doctest::Approx(-3.0));
}

TEST_CASE("solve: iteration limit") {
    lp::SolverOptions opt;
    opt.max_iterations = 1;
    const auto p = lp::build_problem<double>(Sense::Maximize, {{0, inf}, {0, inf}, {0, inf}},
                                             {{{{0, 1.0}, {1, 2.0}, {2, 1.0}}, Relation::LessEqual, 4.0, ""},
                                              {{{0, 3.0}, {1, 1.0}, {2, 2.0}}, Relation::LessEqual, 5.0, ""},
                                              {{{0, 1.0}, {1, 1.0}, {2, 3.0}}, Relation::GreaterEqual, 1.0, ""}},
                                             {2.0, 3.0, 1.0});
    CHECK(lp::solve(p, opt).status == Status::IterationLimit);
    CHECK(lp::solve(p).status == Status::Optimal);
}

TEST_CASE("solve agrees with vertex enumeration on random LPs") {
    int optimal = 0;
    int infeasible = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        CAPTURE(seed);
        const auto p = test::random_lp(seed);
        const auto oracle = test::enumerate_vertices(p);
        const auto s = lp::solve(p);
        if (!oracle.feasible) {
            CHECK(s.status == Status::Infeasible);
            ++infeasible;
            continue;
        }
        REQUIRE(s.status == Status::Optimal);
        ++optimal;
        const double rel = std::abs(s.objective_value - oracle.objective) / std::max(1.0, std::abs(oracle.objective));
        CHECK(rel <= 1e-8);
        CHECK(s.max_bound_violation <= 1e-9);
        CHECK(s.max_primal_residual <= 1e-7 * (1.0 + p.rhs().cwiseAbs().maxCoeff()));
    }
    CHECK(optimal > 100);
    CHECK(infeasible > 0);
}

TEST_CASE("Bland-only pivoting reaches the same optimum") {
    lp::SolverOptions bland;
    bland.pivot_rule = lp::PivotRule::Bland;
    for (std::uint64_t seed = 300; seed < 360; ++seed) {
        CAPTURE(seed);
        const auto p = test::random_lp(seed);
        const auto a = lp::solve(p);
        const auto b = lp::solve(p, bland);
        REQUIRE(a.status == b.status);
        if (a.status == Status::Optimal) CHECK(a.objective_value == doctest::Approx(b.objective_value).epsilon(1e-9));
    }
}

TEST_CASE("optimality certificate: reduced-cost signs at the final basis") {
    for (std::uint64_t seed = 400; seed < 460; ++seed) {
        CAPTURE(seed);
        const auto p = test::random_lp(seed);
        const auto s = lp::solve(p);
        if (s.status != Status::Optimal) continue;
        const double scale = std::max(1.0, p.objective().cwiseAbs().maxCoeff());
        const double tol = 1e-9 * scale * 10;
        const double sign = p.sense() == Sense::Maximize ? 1.0 : -1.0;
        // Independent recomputation of c - A'y.
        const Eigen::VectorXd d = p.objective() - p.matrix().transpose() * s.row_duals;
        CHECK((d - s.reduced_costs).cwiseAbs().maxCoeff() <= 1e-9 * scale);
        for (Eigen::Index j = 0; j < p.n_vars(); ++j) {
            const auto st = s.column_status[static_cast<std::size_t>(j)];
            if (p.lower()[j] == p.upper()[j]) continue;
            if (st == lp::VarStatus::AtLower) CHECK(sign * d[j] <= tol);
            if (st == lp::VarStatus::AtUpper) CHECK(sign * d[j] >= -tol);
            if (st == lp::VarStatus::Basic || st == lp::VarStatus::FreeZero) CHECK(std::abs(d[j]) <= tol);
        }
    }
}

TEST_CASE("objective scaling leaves the argmax unchanged") {
    for (std::uint64_t seed = 500; seed < 540; ++seed) {
        CAPTURE(seed);
        const auto p = test::random_lp(seed);
        const auto a = lp::solve(p);
        const auto b = lp::solve(p.scaled_objective(3.0));
        REQUIRE(a.status == b.status);
        if (a.status != Status::Optimal) continue;
        CHECK((a.x - b.x).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(b.objective_value == doctest::Approx(3.0 * a.objective_value).epsilon(1e-12));
    }
}

TEST_CASE("solve is deterministic") {
    const auto p = test::random_lp(77);
    const auto a = lp::solve(p);
    const auto b = lp::solve(p);
    CHECK(a.iterations == b.iterations);
    CHECK(a.x == b.x);
}

TEST_CASE("degenerate cycling-prone LP terminates") {
    // Beale's example, which cycles under a naive largest-coefficient rule.
    const auto p = lp::build_problem<double>(
        Sense::Minimize, {{0, inf}, {0, inf}, {0, inf}, {0, inf}},
        {{{{0, 0.25}, {1, -60.0}, {2, -1.0 / 25.0}, {3, 9.0}}, Relation::LessEqual, 0.0, ""},
         {{{0, 0.5}, {1, -90.0}, {2, -1.0 / 50.0}, {3, 3.0}}, Relation::LessEqual, 0.0, ""},
         {{{2, 1.0}}, Relation::LessEqual, 1.0, ""}},
        {-0.75, 150.0, -0.02, 6.0});
    const auto s = lp::solve(p);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective_value == doctest::Approx(-0.05));
    const auto oracle = test::enumerate_vertices(p);
    CHECK(oracle.objective == doctest::Approx(-0.05));
}
