#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "bacnoma/linprog.hpp"
#include "bacnoma/rng.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace bacnoma;
using linprog::LpProblem;
using linprog::LpSolution;
using linprog::LpStatus;

TEST_CASE("one-dimensional box") {
  LpProblem p;
  p.objective = {1.0};
  p.a_ub = {{1.0}};
  p.b_ub = {3.0};
  const LpSolution sol = linprog::solve(p);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sol.objective_value == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("flat optimal face resolves to one vertex deterministically") {
  LpProblem p;
  p.objective = {1.0, 1.0};
  p.a_ub = {{1.0, 1.0}};
  p.b_ub = {1.0};
  const LpSolution a = linprog::solve(p);
  REQUIRE(a.status == LpStatus::Optimal);
  CHECK(a.objective_value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(linprog::solution_feasible(p, a));
  const LpSolution b = linprog::solve(p);
  CHECK(a.x == b.x);
  CHECK(a.objective_value == b.objective_value);
}

TEST_CASE("equality rows are honored") {
  LpProblem p;
  p.objective = {0.0, 1.0};
  p.a_eq = {{1.0, 1.0}};
  p.b_eq = {2.0};
  p.a_ub = {{0.0, 1.0}};
  p.b_ub = {1.5};
  const LpSolution sol = linprog::solve(p);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.x[0] + sol.x[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sol.x[1] == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("infeasible and unbounded statuses") {
  LpProblem infeasible;
  infeasible.objective = {1.0};
  infeasible.a_ub = {{1.0}};
  infeasible.b_ub = {-1.0};
  CHECK(linprog::solve(infeasible).status == LpStatus::Infeasible);

  LpProblem unbounded;
  unbounded.objective = {1.0};
  CHECK(linprog::solve(unbounded).status == LpStatus::Unbounded);

  LpProblem unbounded_ray;
  unbounded_ray.objective = {1.0, 0.0};
  unbounded_ray.a_ub = {{-1.0, 1.0}};
  unbounded_ray.b_ub = {0.0};
  CHECK(linprog::solve(unbounded_ray).status == LpStatus::Unbounded);
}

TEST_CASE("malformed problems are rejected") {
  LpProblem ragged;
  ragged.objective = {1.0, 1.0};
  ragged.a_ub = {{1.0}};
  ragged.b_ub = {1.0};
  CHECK_THROWS_AS(linprog::solve(ragged), std::invalid_argument);

  LpProblem missing_rhs;
  missing_rhs.objective = {1.0};
  missing_rhs.a_ub = {{1.0}};
  CHECK_THROWS_AS(linprog::solve(missing_rhs), std::invalid_argument);
}

TEST_CASE("objective agrees with vertex enumeration on random small LPs") {
  rng::Stream stream(0x11707);
  int optimal = 0, infeasible = 0, unbounded = 0;
  for (int i = 0; i < 400; ++i) {
    const LpProblem p = gen::random_lp(stream, i % 3 == 0);
    const LpSolution sol = linprog::solve(p);
    const oracle::VertexScan scan = oracle::enumerate_vertices(p);
    switch (sol.status) {
      case LpStatus::Optimal: {
        ++optimal;
        REQUIRE(linprog::solution_feasible(p, sol));
        REQUIRE(scan.found_vertex);
        const double want = scan.best_objective;
        REQUIRE(std::fabs(sol.objective_value - want) <=
                1e-9 * (1.0 + std::fabs(want)));
        break;
      }
      case LpStatus::Infeasible:
        ++infeasible;
        REQUIRE(!scan.found_vertex);
        break;
      case LpStatus::Unbounded:
        // Unboundedness is invisible to a vertex scan, but feasibility
        // is not: some vertex must exist.
        ++unbounded;
        REQUIRE(scan.found_vertex);
        break;
    }
  }
  // The generator must exercise all three outcomes.
  CHECK(optimal > 200);
  CHECK(infeasible > 10);
  CHECK(unbounded > 10);
}

TEST_CASE("solutions satisfy the stated tolerances") {
  rng::Stream stream(0x5eed);
  for (int i = 0; i < 200; ++i) {
    const LpProblem p = gen::random_lp(stream, i % 4 == 0);
    const LpSolution sol = linprog::solve(p);
    if (sol.status != LpStatus::Optimal) continue;
    for (double v : sol.x) CHECK(v >= -1e-10);
    for (std::size_t r = 0; r < p.a_ub.size(); ++r) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < p.num_vars(); ++j) {
        lhs += p.a_ub[r][j] * sol.x[j];
      }
      CHECK(lhs <= p.b_ub[r] + 1e-8 * (1.0 + std::fabs(p.b_ub[r])));
    }
    for (std::size_t r = 0; r < p.a_eq.size(); ++r) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < p.num_vars(); ++j) {
        lhs += p.a_eq[r][j] * sol.x[j];
      }
      CHECK(std::fabs(lhs - p.b_eq[r]) <=
            1e-8 * (1.0 + std::fabs(p.b_eq[r])));
    }
  }
}

TEST_CASE("repeat solves are bitwise identical") {
  rng::Stream stream(0xd5);
  for (int i = 0; i < 50; ++i) {
    const LpProblem p = gen::random_lp(stream, i % 2 == 0);
    const LpSolution a = linprog::solve(p);
    const LpSolution b = linprog::solve(p);
    REQUIRE(a.status == b.status);
    if (a.status == LpStatus::Optimal) {
      CHECK(a.x == b.x);
      CHECK(a.objective_value == b.objective_value);
    }
  }
}

TEST_CASE("random_vertex stays inside a box") {
  LpProblem box;
  box.objective = {0.0, 0.0};
  box.a_ub = {{1.0, 0.0}, {0.0, 1.0}};
  box.b_ub = {1.0, 1.0};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    rng::Stream stream(seed);
    const LpSolution sol = linprog::random_vertex(box, stream);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.x[0] >= -1e-10);
    CHECK(sol.x[0] <= 1.0 + 1e-8);
    CHECK(sol.x[1] >= -1e-10);
    CHECK(sol.x[1] <= 1.0 + 1e-8);
  }
}

TEST_CASE("random_vertex visits more than one vertex of the box") {
  LpProblem box;
  box.objective = {0.0, 0.0};
  box.a_ub = {{1.0, 0.0}, {0.0, 1.0}};
  box.b_ub = {1.0, 1.0};
  bool corner[2][2] = {{false, false}, {false, false}};
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    rng::Stream stream(seed);
    const LpSolution sol = linprog::random_vertex(box, stream);
    corner[sol.x[0] > 0.5][sol.x[1] > 0.5] = true;
  }
  int hit = 0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) hit += corner[a][b];
  }
  CHECK(hit >= 3);
}

TEST_CASE("random_vertex on a single-point region") {
  LpProblem point;
  point.objective = {0.0};
  point.a_ub = {{1.0}};
  point.b_ub = {0.0};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    rng::Stream stream(seed);
    const LpSolution sol = linprog::random_vertex(point, stream);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(std::fabs(sol.x[0]) <= 1e-10);
  }
}

TEST_CASE("random_vertex is deterministic in the stream state") {
  LpProblem box;
  box.objective = {0.0, 0.0};
  box.a_ub = {{1.0, 1.0}};
  box.b_ub = {1.0};
  rng::Stream a(42), b(42);
  const LpSolution sa = linprog::random_vertex(box, a);
  const LpSolution sb = linprog::random_vertex(box, b);
  CHECK(sa.x == sb.x);
}
