#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geoscan/hungarian.hpp"
#include "geoscan/lp.hpp"
#include "geoscan/rng.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

using namespace geoscan;

TEST_CASE("simple bounded minimization") {
    // min -x1 - 2 x2 s.t. x1 + x2 <= 4, x1 <= 2, x >= 0 -> x = (0 or 2, ...)
    LpProblem lp;
    lp.a_eq.resize(0, 2);
    lp.b_eq.resize(0);
    lp.a_ub.resize(2, 2);
    lp.a_ub << 1.0, 1.0, 1.0, 0.0;
    lp.b_ub.resize(2);
    lp.b_ub << 4.0, 2.0;
    lp.c.resize(2);
    lp.c << -1.0, -2.0;

    const LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(-8.0).epsilon(1e-9));
    CHECK(sol.x(1) == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(sol.dual_objective == doctest::Approx(sol.objective).epsilon(1e-9));
}

TEST_CASE("equality constraints with negative rhs") {
    // min x1 + x2 s.t. x1 - x2 = -3 -> x = (0, 3)
    LpProblem lp;
    lp.a_eq.resize(1, 2);
    lp.a_eq << 1.0, -1.0;
    lp.b_eq.resize(1);
    lp.b_eq << -3.0;
    lp.a_ub.resize(0, 2);
    lp.b_ub.resize(0);
    lp.c = Eigen::VectorXd::Ones(2);

    const LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(sol.x(0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(sol.x(1) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("infeasible and unbounded problems are classified") {
    SUBCASE("infeasible") {
        LpProblem lp;
        lp.a_eq.resize(0, 1);
        lp.b_eq.resize(0);
        lp.a_ub.resize(1, 1);
        lp.a_ub << 1.0;
        lp.b_ub.resize(1);
        lp.b_ub << -1.0;  // x <= -1 with x >= 0
        lp.c = Eigen::VectorXd::Ones(1);
        CHECK(solve_lp(lp).status == LpStatus::Infeasible);
    }
    SUBCASE("unbounded") {
        LpProblem lp;
        lp.a_eq.resize(0, 1);
        lp.b_eq.resize(0);
        lp.a_ub.resize(1, 1);
        lp.a_ub << -1.0;
        lp.b_ub.resize(1);
        lp.b_ub << 0.0;
        lp.c.resize(1);
        lp.c << -1.0;  // minimize -x, x unconstrained above
        CHECK(solve_lp(lp).status == LpStatus::Unbounded);
    }
}

TEST_CASE("random dense LPs satisfy strong duality and feasibility") {
    Rng rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform_u64(8));
        const int mu = 2 + static_cast<int>(rng.uniform_u64(5));

        LpProblem lp;
        lp.a_eq.resize(0, n);
        lp.b_eq.resize(0);
        lp.a_ub.resize(mu, n);
        lp.b_ub.resize(mu);
        lp.c.resize(n);
        for (int j = 0; j < n; ++j) lp.c(j) = rng.uniform(-1.0, 1.0);
        for (int i = 0; i < mu; ++i) {
            for (int j = 0; j < n; ++j) lp.a_ub(i, j) = rng.uniform(-1.0, 1.0);
            lp.b_ub(i) = rng.uniform(0.5, 2.0);  // x = 0 feasible
        }
        // Keep it bounded: add sum(x) <= 10.
        lp.a_ub.conservativeResize(mu + 1, n);
        lp.a_ub.row(mu).setOnes();
        lp.b_ub.conservativeResize(mu + 1);
        lp.b_ub(mu) = 10.0;

        const LpSolution sol = solve_lp(lp);
        REQUIRE(sol.status == LpStatus::Optimal);
        // Primal feasibility
        CHECK((lp.a_ub * sol.x - lp.b_ub).maxCoeff() < 1e-8);
        CHECK(sol.x.minCoeff() > -1e-10);
        // Strong duality
        const double scale = std::max(1.0, std::abs(sol.objective));
        CHECK(std::abs(sol.objective - sol.dual_objective) / scale < 1e-6);
        // Dual feasibility for the ub rows of a min problem: y <= 0 and
        // c - a_ub' y >= 0.
        CHECK(sol.dual_ub.maxCoeff() < 1e-8);
        CHECK((lp.c - lp.a_ub.transpose() * sol.dual_ub).minCoeff() > -1e-8);
    }
}

TEST_CASE("determinism: identical problems yield identical solutions") {
    Rng rng(7);
    LpProblem lp;
    const int n = 12;
    lp.a_eq.resize(3, n);
    lp.b_eq.resize(3);
    lp.a_ub.resize(0, n);
    lp.b_ub.resize(0);
    lp.c = Eigen::VectorXd::Ones(n);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < n; ++j) lp.a_eq(i, j) = rng.uniform(-2.0, 2.0);
        lp.b_eq(i) = rng.uniform(-1.0, 1.0);
    }
    const LpSolution a = solve_lp(lp);
    const LpSolution b = solve_lp(lp);
    REQUIRE(a.status == LpStatus::Optimal);
    CHECK(a.objective == b.objective);
    CHECK((a.x - b.x).norm() == 0.0);
}

TEST_CASE("hungarian matches brute force on all permutations") {
    Rng rng(55);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_u64(6));
        Eigen::MatrixXd cost(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) cost(i, j) = rng.uniform(0.0, 10.0);

        const std::vector<int> got = solve_assignment(cost);
        const double got_cost = assignment_cost(cost, got);

        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        double best = std::numeric_limits<double>::infinity();
        do {
            best = std::min(best, assignment_cost(cost, perm));
        } while (std::next_permutation(perm.begin(), perm.end()));

        CHECK(got_cost == doctest::Approx(best).epsilon(1e-12));
        // got must be a permutation
        std::vector<int> sorted = got;
        std::sort(sorted.begin(), sorted.end());
        for (int i = 0; i < n; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
    }
}

TEST_CASE("hungarian picks the cheaper pairing on a symmetric 2x2") {
    Eigen::MatrixXd cost(2, 2);
    cost << 1.0, 5.0, 5.0, 2.0;  // diagonal 3 < off-diagonal 10
    const std::vector<int> got = solve_assignment(cost);
    CHECK(got[0] == 0);
    CHECK(got[1] == 1);

    cost << 7.0, 1.0, 2.0, 9.0;  // off-diagonal cheaper
    const std::vector<int> swapped = solve_assignment(cost);
    CHECK(swapped[0] == 1);
    CHECK(swapped[1] == 0);
}
