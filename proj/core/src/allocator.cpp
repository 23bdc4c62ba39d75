#include "bacnoma/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "bacnoma/specfun.hpp"

namespace bacnoma::alloc {

Params Params::from_scenario(const model::ScenarioConfig& config) {
  Params params;
  params.alpha = config.alpha;
  params.sigma2 = config.sigma2;
  params.eps0 = model::epsilon0(config.r0);
  params.p_max = config.p_max;
  return params;
}

const char* to_string(AllocStatus status) {
  return status == AllocStatus::Optimal ? "optimal" : "infeasible";
}

namespace {

constexpr double kRecoveryZMin = 1e-12;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double kernel_bits(double ratio) {
  return specfun::avg_rate_kernel(ratio) / std::numbers::ln2;
}

// Fills allocation, ratio and rate from a recovered power vector.
AllocationResult finish(const model::ChannelRealization& ch,
                        const Params& params, std::vector<double> p) {
  AllocationResult out;
  out.status = AllocStatus::Optimal;
  const std::size_t m = ch.device_count();
  double num = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    num += ch.h_sq[i] * ch.h_sq[i] * p[i + 1];
  }
  out.objective_ratio = num / (params.alpha * ch.hsi_sq * p[0] + params.sigma2);
  out.p_star = kernel_bits(out.objective_ratio);
  out.allocation.p0 = std::clamp(p[0], 0.0, params.p_max);
  out.allocation.eta.resize(m, 0.0);
  if (p[0] > 0.0) {
    for (std::size_t i = 0; i < m; ++i) {
      out.allocation.eta[i] = clamp01(p[i + 1] / p[0]);
    }
  }
  out.p_vector = std::move(p);
  return out;
}

std::vector<double> scaled_row(const std::vector<double>& row) {
  double peak = 0.0;
  for (double v : row) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return row;
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) out[j] = row[j] / peak;
  return out;
}

// Simplex tableaus accumulate last-bit noise, so the same mathematical
// vertex reached through different pivot paths (or through the substitution
// recovery) comes back with different final bits, and schemes that land on
// the same vertex then report rates differing by an ulp in either direction.
// Re-deriving the point from its active rows makes the returned vector a
// pure function of the vertex identity: coinciding schemes report identical
// powers, hence identical rates. Leaves p untouched (returns false) when the
// active set is rank-deficient or the re-solve drifts, so this can only
// refine a solver result, never invent one.
bool snap_to_vertex(const CompactProblem& cp, std::vector<double>& p) {
  const std::size_t n = cp.a.size();
  std::vector<double> q(n);
  for (std::size_t j = 0; j < n; ++j) q[j] = p[j] / cp.power_unit;

  std::vector<std::vector<double>> tight;  // rows [A_i | b_i'], b' = b/pu
  for (std::size_t i = 0; i < cp.A.size(); ++i) {
    const double bp = cp.b[i] / cp.power_unit;
    double lhs = 0.0;
    for (std::size_t j = 0; j < n; ++j) lhs += cp.A[i][j] * q[j];
    if (std::fabs(lhs - bp) > 1e-9 * (1.0 + std::fabs(bp))) continue;
    std::vector<double> row(cp.A[i]);
    row.push_back(bp);
    tight.push_back(std::move(row));
  }
  if (tight.size() < n) return false;

  // Gaussian elimination over the tight rows with scaled partial pivoting;
  // the first n pivot rows define the vertex, surplus rows are redundant.
  std::vector<double> scale(tight.size(), 0.0);
  for (std::size_t i = 0; i < tight.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      scale[i] = std::max(scale[i], std::fabs(tight[i][j]));
    }
    if (scale[i] == 0.0) scale[i] = 1.0;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = -1.0;
    for (std::size_t i = col; i < tight.size(); ++i) {
      const double score = std::fabs(tight[i][col]) / scale[i];
      if (score > best) {
        best = score;
        pivot = i;
      }
    }
    if (best < 1e-12) return false;
    std::swap(tight[col], tight[pivot]);
    std::swap(scale[col], scale[pivot]);
    for (std::size_t i = col + 1; i < tight.size(); ++i) {
      const double f = tight[i][col] / tight[col][col];
      if (f == 0.0) continue;
      for (std::size_t j = col; j <= n; ++j) tight[i][j] -= f * tight[col][j];
      tight[i][col] = 0.0;
    }
  }
  std::vector<double> snapped(n, 0.0);
  for (std::size_t row = n; row-- > 0;) {
    double v = tight[row][n];
    for (std::size_t j = row + 1; j < n; ++j) v -= tight[row][j] * snapped[j];
    snapped[row] = v / tight[row][row];
    if (snapped[row] == 0.0) snapped[row] = 0.0;  // normalize -0
  }

  for (std::size_t j = 0; j < n; ++j) {
    if (std::fabs(snapped[j] - q[j]) > 1e-6 * (1.0 + std::fabs(q[j]))) {
      return false;
    }
    if (snapped[j] < -1e-10) return false;
  }
  for (std::size_t i = 0; i < cp.A.size(); ++i) {
    const double bp = cp.b[i] / cp.power_unit;
    double lhs = 0.0;
    for (std::size_t j = 0; j < n; ++j) lhs += cp.A[i][j] * snapped[j];
    if (lhs > bp + 1e-8 * (1.0 + std::fabs(bp))) return false;
  }
  for (std::size_t j = 0; j < n; ++j) p[j] = cp.power_unit * snapped[j];
  return true;
}

// Constraint block in LP power units (q = p / power_unit): A q <= b',
// b' = b / power_unit, each row max-abs equilibrated.
linprog::LpProblem feasibility_lp(const CompactProblem& cp) {
  linprog::LpProblem lp;
  const std::size_t n = cp.a.size();
  for (std::size_t i = 0; i < cp.A.size(); ++i) {
    std::vector<double> row(n + 1);
    for (std::size_t j = 0; j < n; ++j) row[j] = cp.A[i][j];
    row[n] = cp.b[i] / cp.power_unit;
    row = scaled_row(row);
    lp.b_ub.push_back(row[n]);
    row.pop_back();
    lp.a_ub.push_back(std::move(row));
  }
  lp.objective.assign(n, 0.0);
  return lp;
}

}  // namespace

CompactProblem build_compact(const model::ChannelRealization& ch, double alpha,
                             double sigma2, double eps0, double p_max) {
  if (!(eps0 >= 0.0)) throw std::invalid_argument("build_compact: eps0 < 0");
  if (!(p_max > 0.0)) throw std::invalid_argument("build_compact: p_max <= 0");
  const std::size_t m = ch.device_count();
  const std::size_t n = m + 1;

  CompactProblem cp;
  cp.sigma2 = sigma2;
  cp.a.assign(n, 0.0);
  cp.d.assign(n, 0.0);
  cp.d[0] = alpha * ch.hsi_sq;
  cp.a1.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    cp.a[i + 1] = ch.h_sq[i] * ch.h_sq[i];
    cp.a1[i] = eps0 * ch.g_sq[i] * ch.h_sq[i];
  }

  cp.A.assign(2 * m + 3, std::vector<double>(n, 0.0));
  cp.b.assign(2 * m + 3, 0.0);
  cp.A[0][0] = -ch.h0_sq;
  for (std::size_t i = 0; i < m; ++i) cp.A[0][i + 1] = cp.a1[i];
  cp.b[0] = -eps0 * sigma2;
  for (std::size_t i = 0; i < m; ++i) {
    cp.A[1 + i][i + 1] = -1.0;          // P_m >= 0
    cp.A[1 + m + i][0] = -1.0;          // P_m <= P0
    cp.A[1 + m + i][i + 1] = 1.0;
  }
  cp.A[2 * m + 1][0] = -1.0;            // P0 >= 0
  cp.A[2 * m + 2][0] = 1.0;             // P0 <= p_max
  cp.b[2 * m + 2] = p_max;

  cp.power_unit = p_max;
  cp.gain_unit = *std::max_element(cp.a.begin(), cp.a.end());
  if (cp.gain_unit <= 0.0) cp.gain_unit = 1.0;
  return cp;
}

linprog::LpProblem charnes_cooper_lp(const CompactProblem& cp) {
  const std::size_t n = cp.a.size();
  linprog::LpProblem lp;
  lp.objective.resize(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) lp.objective[j] = cp.a[j] / cp.gain_unit;

  for (std::size_t i = 0; i < cp.A.size(); ++i) {
    std::vector<double> row(n + 1);
    for (std::size_t j = 0; j < n; ++j) row[j] = cp.A[i][j];
    row[n] = -cp.b[i] / cp.power_unit;
    lp.a_ub.push_back(scaled_row(row));
    lp.b_ub.push_back(0.0);
  }

  std::vector<double> eq(n + 2);
  for (std::size_t j = 0; j < n; ++j) eq[j] = cp.d[j];
  eq[n] = cp.sigma2 / cp.power_unit;
  eq[n + 1] = 1.0;  // right-hand side, equilibrated with the row
  eq = scaled_row(eq);
  lp.b_eq.push_back(eq[n + 1]);
  eq.pop_back();
  lp.a_eq.push_back(std::move(eq));
  return lp;
}

namespace {

// Shared by the average-rate and fixed-excitation solvers; they differ only
// by a positive factor on the LP objective, which cannot change the argmax.
AllocationResult solve_via_lp(const model::ChannelRealization& ch,
                              const Params& params, double objective_scale) {
  const CompactProblem cp = build_compact(ch, params.alpha, params.sigma2,
                                          params.eps0, params.p_max);
  const std::size_t n = cp.a.size();

  if (std::all_of(cp.a.begin(), cp.a.end(),
                  [](double v) { return v == 0.0; })) {
    // No device reaches the base station; any feasible point is optimal.
    if (params.p_max * ch.h0_sq < params.eps0 * params.sigma2) {
      return AllocationResult{};
    }
    std::vector<double> p(n, 0.0);
    p[0] = params.p_max;
    return finish(ch, params, std::move(p));
  }

  const linprog::LpProblem lp = charnes_cooper_lp(cp);
  const linprog::LpSolution sol = linprog::solve(lp);
  if (sol.status == linprog::LpStatus::Infeasible) return AllocationResult{};
  if (sol.status == linprog::LpStatus::Unbounded) {
    throw std::runtime_error(
        "solve_optimal: LP unbounded on a bounded feasible set");
  }
  const double z = sol.x[n];
  if (z <= kRecoveryZMin) {
    throw std::runtime_error(
        "solve_optimal: substitution variable z below recovery threshold");
  }
  std::vector<double> p(n);
  for (std::size_t j = 0; j < n; ++j) {
    p[j] = cp.power_unit * (sol.x[j] / z);
  }
  snap_to_vertex(cp, p);
  AllocationResult out = finish(ch, params, std::move(p));
  out.charnes_cooper_z = z;
  out.lp_objective = sol.objective_value * cp.gain_unit * objective_scale;
  return out;
}

}  // namespace

AllocationResult solve_optimal(const model::ChannelRealization& ch,
                               const Params& params) {
  return solve_via_lp(ch, params, 1.0);
}

AllocationResult solve_instantaneous(const model::ChannelRealization& ch,
                                     const Params& params, double s0_sq) {
  if (!(s0_sq > 0.0)) {
    throw std::invalid_argument("solve_instantaneous: s0_sq must be positive");
  }
  return solve_via_lp(ch, params, s0_sq);
}

AllocationResult closed_form_two_user(const model::ChannelRealization& ch,
                                      const Params& params) {
  if (ch.device_count() != 2) {
    throw std::invalid_argument("closed_form_two_user: needs exactly 2 devices");
  }
  const double w1 = ch.g_sq[0] * ch.h_sq[0];
  const double w2 = ch.g_sq[1] * ch.h_sq[1];
  const double cap = params.eps0 > 0.0
                         ? ch.h0_sq / params.eps0
                         : std::numeric_limits<double>::infinity();
  const double c1 = ch.h_sq[0] * ch.h_sq[0];
  const double c2 = ch.h_sq[1] * ch.h_sq[1];

  double best1 = 0.0;
  double best2 = 0.0;
  double best_obj = 0.0;
  // Candidates constructed on the cap line can land an ulp past it when
  // w.eta is recomputed, so the cap check carries rounding-sized slack.
  const double cap_slack =
      8.0 * std::numeric_limits<double>::epsilon() * (cap + w1 + w2);
  const auto consider = [&](double e1, double e2) {
    if (!(e1 >= 0.0 && e1 <= 1.0 && e2 >= 0.0 && e2 <= 1.0)) return;
    if (w1 * e1 + w2 * e2 > cap + cap_slack) return;
    const double obj = c1 * e1 + c2 * e2;
    if (obj > best_obj || (obj == best_obj &&
                           (e1 > best1 || (e1 == best1 && e2 > best2)))) {
      best_obj = obj;
      best1 = e1;
      best2 = e2;
    }
  };

  consider(0.0, 0.0);
  consider(1.0, 0.0);
  consider(0.0, 1.0);
  consider(1.0, 1.0);
  // Intersections of w.eta = cap with the four box edges.
  if (std::isfinite(cap)) {
    if (w1 > 0.0) {
      consider(cap / w1, 0.0);
      consider((cap - w2) / w1, 1.0);
    }
    if (w2 > 0.0) {
      consider(0.0, cap / w2);
      consider(1.0, (cap - w1) / w2);
    }
  }

  std::vector<double> p{params.p_max, best1 * params.p_max,
                        best2 * params.p_max};
  AllocationResult out = finish(ch, params, std::move(p));
  // Report the vertex exactly; finish() derives eta by division, which can
  // round away the closed form.
  out.allocation.eta = {best1, best2};
  return out;
}

AllocationResult random_allocation(const model::ChannelRealization& ch,
                                   const Params& params, rng::Stream& stream) {
  const CompactProblem cp = build_compact(ch, params.alpha, params.sigma2,
                                          params.eps0, params.p_max);
  const linprog::LpProblem lp = feasibility_lp(cp);
  const linprog::LpSolution sol = linprog::random_vertex(lp, stream);
  if (sol.status != linprog::LpStatus::Optimal) return AllocationResult{};
  std::vector<double> p(sol.x.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    p[j] = cp.power_unit * sol.x[j];
  }
  snap_to_vertex(cp, p);
  return finish(ch, params, std::move(p));
}

AllocationResult oma_allocation(const model::ChannelRealization& ch,
                                const Params& params, int device_index) {
  const int m = static_cast<int>(ch.device_count());
  if (device_index < 1 || device_index > m) {
    throw std::invalid_argument("oma_allocation: device_index out of range");
  }
  const std::size_t i = static_cast<std::size_t>(device_index - 1);
  model::ChannelRealization solo;
  solo.h0_sq = ch.h0_sq;
  solo.h_sq = {ch.h_sq[i]};
  solo.g_sq = {ch.g_sq[i]};
  solo.hsi_sq = ch.hsi_sq;

  AllocationResult one = solve_optimal(solo, params);
  if (one.status != AllocStatus::Optimal) return one;

  // Re-expand, then snap against the full-width system: when the full
  // optimizer lands on this same single-device vertex, both must report it
  // through the identical row solve.
  std::vector<double> p(static_cast<std::size_t>(m) + 1, 0.0);
  p[0] = one.p_vector[0];
  p[i + 1] = one.p_vector[1];
  const CompactProblem cp = build_compact(ch, params.alpha, params.sigma2,
                                          params.eps0, params.p_max);
  snap_to_vertex(cp, p);
  AllocationResult out = finish(ch, params, std::move(p));
  out.charnes_cooper_z = one.charnes_cooper_z;
  out.lp_objective = one.lp_objective;
  return out;
}

AllocationResult grid_oracle(const model::ChannelRealization& ch,
                             const Params& params, double p0_fixed,
                             int steps) {
  const std::size_t m = ch.device_count();
  if (m > 3) {
    throw std::invalid_argument("grid_oracle: more than 3 devices");
  }
  if (steps < 100) throw std::invalid_argument("grid_oracle: steps < 100");
  if (!(p0_fixed > 0.0 && p0_fixed <= params.p_max)) {
    throw std::invalid_argument("grid_oracle: p0 outside (0, p_max]");
  }

  std::vector<double> w(m);   // downlink interference weight per unit eta
  std::vector<double> c(m);   // objective gain per unit eta
  for (std::size_t i = 0; i < m; ++i) {
    w[i] = ch.g_sq[i] * ch.h_sq[i];
    c[i] = ch.h_sq[i] * ch.h_sq[i];
  }
  // Feasible iff eps0 (P0 sum eta w + sigma2) <= P0 |h0|^2. The denominator
  // of the rate objective is constant at fixed P0, so the best point is the
  // feasible point with the largest sum eta c.
  const double budget =
      p0_fixed * ch.h0_sq - params.eps0 * params.sigma2;

  std::vector<int> idx(m, 0);
  std::vector<double> eta(m, 0.0);
  std::vector<double> best;
  double best_gain = -1.0;
  const double inv = 1.0 / static_cast<double>(steps);
  for (;;) {
    for (std::size_t i = 0; i < m; ++i) eta[i] = idx[i] * inv;
    double iw = 0.0;
    for (std::size_t i = 0; i < m; ++i) iw += eta[i] * w[i];
    if (params.eps0 * p0_fixed * iw <= budget) {
      double gain = 0.0;
      for (std::size_t i = 0; i < m; ++i) gain += eta[i] * c[i];
      if (gain >= best_gain) {
        best_gain = gain;
        best = eta;
      }
    }
    std::size_t k = 0;
    while (k < m && ++idx[k] > steps) {
      idx[k] = 0;
      ++k;
    }
    if (k == m) break;
  }
  if (best_gain < 0.0) return AllocationResult{};

  std::vector<double> p(m + 1);
  p[0] = p0_fixed;
  for (std::size_t i = 0; i < m; ++i) p[i + 1] = best[i] * p0_fixed;
  AllocationResult out = finish(ch, params, std::move(p));
  out.allocation.eta = std::move(best);
  return out;
}

nlohmann::json result_to_json(const AllocationResult& result) {
  nlohmann::json j;
  j["status"] = to_string(result.status);
  if (result.status != AllocStatus::Optimal) return j;
  j["allocation"] = {{"p0", result.allocation.p0},
                     {"eta", result.allocation.eta}};
  j["p_vector"] = result.p_vector;
  j["objective_ratio"] = result.objective_ratio;
  j["p_star"] = result.p_star;
  return j;
}

}  // namespace bacnoma::alloc
