#ifndef BACNOMA_LINPROG_HPP
#define BACNOMA_LINPROG_HPP

#include <cstddef>
#include <vector>

#include "bacnoma/rng.hpp"

namespace bacnoma::linprog {

// Dense LP in the form
//   maximize  objective . x
//   s.t.      a_ub x <= b_ub,  a_eq x = b_eq,  x >= 0.
struct LpProblem {
  std::vector<double> objective;
  std::vector<std::vector<double>> a_ub;
  std::vector<double> b_ub;
  std::vector<std::vector<double>> a_eq;
  std::vector<double> b_eq;

  std::size_t num_vars() const {
    if (!objective.empty()) return objective.size();
    if (!a_ub.empty()) return a_ub.front().size();
    if (!a_eq.empty()) return a_eq.front().size();
    return 0;
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;         // valid iff status == Optimal
  double objective_value = 0.0;  // valid iff status == Optimal
};

// Two-phase dense simplex with Bland's anti-cycling rule. Returns a basic
// optimal solution (a vertex). Deterministic: identical inputs give
// bitwise-identical output. Throws std::invalid_argument on malformed input.
LpSolution solve(const LpProblem& problem);

// Random vertex of the feasible region: solves the LP with an objective
// drawn uniformly from the unit sphere using `stream`. The objective field
// of `constraints` is ignored. Deterministic given the stream state.
LpSolution random_vertex(const LpProblem& constraints, rng::Stream& stream);

// Post-hoc feasibility check used by tests and debug builds: all inequality
// rows within tol*(1 + |b|), equality rows within the same bound, and
// x >= -1e-10.
bool solution_feasible(const LpProblem& problem, const LpSolution& solution,
                       double tol = 1e-8);

}  // namespace bacnoma::linprog

#endif  // BACNOMA_LINPROG_HPP
