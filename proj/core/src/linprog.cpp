#include "bacnoma/linprog.hpp"

#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

namespace bacnoma::linprog {

namespace {

constexpr double kPivotTol = 1e-9;
// Optimality test. Kept well below kPivotTol: a reduced cost left between
// the two would silently strand the solution one pivot short of optimal,
// which shows up as a baseline scheme beating the optimizer by ~1e-9 on
// near-degenerate instances. 1e-11 still clears accumulated tableau noise
// on equilibrated rows by two orders of magnitude.
constexpr double kReducedCostTol = 1e-11;

void validate(const LpProblem& p) {
  const std::size_t n = p.num_vars();
  if (n == 0) {
    throw std::invalid_argument("linprog: empty problem");
  }
  if (!p.objective.empty() && p.objective.size() != n) {
    throw std::invalid_argument("linprog: objective length mismatch");
  }
  if (p.a_ub.size() != p.b_ub.size()) {
    throw std::invalid_argument("linprog: a_ub rows != b_ub length");
  }
  if (p.a_eq.size() != p.b_eq.size()) {
    throw std::invalid_argument("linprog: a_eq rows != b_eq length");
  }
  for (const auto& row : p.a_ub) {
    if (row.size() != n) {
      throw std::invalid_argument("linprog: a_ub column count mismatch");
    }
  }
  for (const auto& row : p.a_eq) {
    if (row.size() != n) {
      throw std::invalid_argument("linprog: a_eq column count mismatch");
    }
  }
}

// Dense tableau over columns [structural | slack | artificial | rhs].
// Dead columns (retired artificials) are skipped by index.
class Simplex {
 public:
  explicit Simplex(const LpProblem& p) : n_(p.num_vars()) {
    const std::size_t mu = p.a_ub.size();
    const std::size_t me = p.a_eq.size();
    n_slack_ = mu;
    // Row layout: all inequalities first, then equalities.
    for (std::size_t i = 0; i < mu; ++i) {
      rows_.push_back(p.a_ub[i]);
      rhs_.push_back(p.b_ub[i]);
    }
    for (std::size_t i = 0; i < me; ++i) {
      rows_.push_back(p.a_eq[i]);
      rhs_.push_back(p.b_eq[i]);
    }
    const std::size_t m = rows_.size();
    for (std::size_t i = 0; i < m; ++i) {
      rows_[i].resize(n_ + n_slack_, 0.0);
    }
    // Slack columns and row-sign normalization (rhs >= 0).
    std::vector<bool> needs_artificial(m, false);
    for (std::size_t i = 0; i < m; ++i) {
      const bool is_ub = i < mu;
      const bool negate = rhs_[i] < 0.0;
      if (negate) {
        for (auto& v : rows_[i]) v = -v;
        rhs_[i] = -rhs_[i];
      }
      if (is_ub) {
        rows_[i][n_ + i] = negate ? -1.0 : 1.0;
        needs_artificial[i] = negate;
      } else {
        needs_artificial[i] = true;
      }
    }
    // Artificial columns, one per row that lacks an identity column.
    cols_ = n_ + n_slack_;
    basis_.assign(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
      if (needs_artificial[i]) {
        const std::size_t col = cols_;
        for (std::size_t r = 0; r < m; ++r) {
          rows_[r].push_back(r == i ? 1.0 : 0.0);
        }
        ++cols_;
        artificial_.push_back(col);
        basis_[i] = col;
      } else {
        basis_[i] = n_ + i;  // slack
      }
    }
    dead_.assign(total_cols(), false);
  }

  LpStatus run(const std::vector<double>& objective) {
    if (!artificial_.empty()) {
      // Phase 1: maximize -sum(artificials).
      std::vector<double> phase1(total_cols(), 0.0);
      for (std::size_t col : artificial_) phase1[col] = -1.0;
      init_reduced_costs(phase1);
      if (iterate() == LpStatus::Unbounded) {
        // -sum(artificials) <= 0 is bounded above; cannot happen.
        throw std::runtime_error("linprog: phase 1 reported unbounded");
      }
      double b_scale = 0.0;
      for (double b : rhs_) b_scale = std::max(b_scale, std::fabs(b));
      if (objective_value_ < -1e-8 * (1.0 + b_scale)) {
        return LpStatus::Infeasible;
      }
      retire_artificials();
    }
    // Phase 2.
    std::vector<double> full(total_cols(), 0.0);
    for (std::size_t j = 0; j < objective.size(); ++j) full[j] = objective[j];
    init_reduced_costs(full);
    return iterate();
  }

  std::vector<double> extract() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (basis_[i] < n_) {
        x[basis_[i]] = rhs_[i];
      }
    }
    return x;
  }

 private:
  std::size_t total_cols() const { return cols_; }

  void init_reduced_costs(const std::vector<double>& cost) {
    reduced_ = cost;
    objective_value_ = 0.0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const double cb = cost[basis_[i]];
      if (cb != 0.0) {
        for (std::size_t j = 0; j < reduced_.size(); ++j) {
          reduced_[j] -= cb * rows_[i][j];
        }
        objective_value_ += cb * rhs_[i];
      }
    }
  }

  // Bland's rule: entering = lowest-index column with positive reduced cost;
  // leaving = min-ratio row, ties broken by lowest basis index.
  LpStatus iterate() {
    const std::size_t m = rows_.size();
    for (;;) {
      std::size_t enter = total_cols();
      for (std::size_t j = 0; j < total_cols(); ++j) {
        if (!dead_[j] && reduced_[j] > kReducedCostTol) {
          enter = j;
          break;
        }
      }
      if (enter == total_cols()) {
        return LpStatus::Optimal;
      }
      std::size_t leave = m;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        const double a = rows_[i][enter];
        if (a > kPivotTol) {
          const double ratio = rhs_[i] / a;
          if (ratio < best_ratio ||
              (ratio == best_ratio && leave < m &&
               basis_[i] < basis_[leave])) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave == m) {
        return LpStatus::Unbounded;
      }
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t r, std::size_t s) {
    const double inv = 1.0 / rows_[r][s];
    for (auto& v : rows_[r]) v *= inv;
    rhs_[r] *= inv;
    rows_[r][s] = 1.0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == r) continue;
      const double factor = rows_[i][s];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < rows_[i].size(); ++j) {
        rows_[i][j] -= factor * rows_[r][j];
      }
      rows_[i][s] = 0.0;
      rhs_[i] -= factor * rhs_[r];
    }
    const double red = reduced_[s];
    if (red != 0.0) {
      for (std::size_t j = 0; j < reduced_.size(); ++j) {
        reduced_[j] -= red * rows_[r][j];
      }
      reduced_[s] = 0.0;
      objective_value_ += red * rhs_[r];
    }
    basis_[r] = s;
  }

  // After phase 1: pivot basic artificials onto any live column, or drop the
  // (redundant) row when none exists, then kill the artificial columns.
  void retire_artificials() {
    std::vector<bool> is_artificial(total_cols(), false);
    for (std::size_t col : artificial_) is_artificial[col] = true;
    for (std::size_t i = 0; i < rows_.size();) {
      if (!is_artificial[basis_[i]]) {
        ++i;
        continue;
      }
      std::size_t s = total_cols();
      for (std::size_t j = 0; j < total_cols(); ++j) {
        if (!is_artificial[j] && !dead_[j] && std::fabs(rows_[i][j]) > kPivotTol) {
          s = j;
          break;
        }
      }
      if (s == total_cols()) {
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(i));
        rhs_.erase(rhs_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
        continue;
      }
      pivot(i, s);
      ++i;
    }
    for (std::size_t col : artificial_) dead_[col] = true;
  }

  std::size_t n_;
  std::size_t n_slack_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::vector<double>> rows_;
  std::vector<double> rhs_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> artificial_;
  std::vector<bool> dead_;
  std::vector<double> reduced_;
  double objective_value_ = 0.0;
};

}  // namespace

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Infeasible:
      return "infeasible";
    case LpStatus::Unbounded:
      return "unbounded";
  }
  return "unknown";
}

LpSolution solve(const LpProblem& problem) {
  validate(problem);
  const std::size_t n = problem.num_vars();
  std::vector<double> objective = problem.objective;
  objective.resize(n, 0.0);

  Simplex simplex(problem);
  LpSolution out;
  out.status = simplex.run(objective);
  if (out.status != LpStatus::Optimal) {
    return out;
  }
  out.x = simplex.extract();
  out.objective_value = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    out.objective_value += objective[j] * out.x[j];
  }
  assert(solution_feasible(problem, out));
  return out;
}

LpSolution random_vertex(const LpProblem& constraints, rng::Stream& stream) {
  LpProblem p = constraints;
  const std::size_t n = p.num_vars();
  p.objective.assign(n, 0.0);
  double norm = 0.0;
  while (norm == 0.0) {
    for (auto& c : p.objective) c = stream.normal();
    for (double c : p.objective) norm += c * c;
    norm = std::sqrt(norm);
  }
  for (auto& c : p.objective) c /= norm;
  LpSolution sol = solve(p);
  if (sol.status == LpStatus::Unbounded) {
    // Unbounded in the sampled direction; the opposite vertex still exists
    // for regions bounded the other way.
    for (auto& c : p.objective) c = -c;
    sol = solve(p);
  }
  return sol;
}

bool solution_feasible(const LpProblem& problem, const LpSolution& solution,
                       double tol) {
  if (solution.status != LpStatus::Optimal) {
    return false;
  }
  const auto& x = solution.x;
  if (x.size() != problem.num_vars()) {
    return false;
  }
  for (double v : x) {
    if (!(v >= -1e-10)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < problem.a_ub.size(); ++i) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      lhs += problem.a_ub[i][j] * x[j];
    }
    if (!(lhs <= problem.b_ub[i] + tol * (1.0 + std::fabs(problem.b_ub[i])))) {
      return false;
    }
  }
  for (std::size_t i = 0; i < problem.a_eq.size(); ++i) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      lhs += problem.a_eq[i][j] * x[j];
    }
    if (!(std::fabs(lhs - problem.b_eq[i]) <=
          tol * (1.0 + std::fabs(problem.b_eq[i])))) {
      return false;
    }
  }
  return true;
}

}  // namespace bacnoma::linprog
