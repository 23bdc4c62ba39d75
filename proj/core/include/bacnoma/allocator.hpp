#ifndef BACNOMA_ALLOCATOR_HPP
#define BACNOMA_ALLOCATOR_HPP

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "bacnoma/linprog.hpp"
#include "bacnoma/model.hpp"
#include "bacnoma/rng.hpp"

namespace bacnoma::alloc {

struct Params {
  double alpha = 0.0;   // residual self-interference coefficient
  double sigma2 = 0.0;  // noise power, watts
  double eps0 = 0.0;    // downlink SINR threshold 2^r0 - 1
  double p_max = 0.0;   // power budget, watts

  static Params from_scenario(const model::ScenarioConfig& config);
};

// Fractional program over p = [P0, P1..PM] with P_m the effective reflected
// power eta_m P0: maximize (a.p)/(d.p + sigma2) subject to A p <= b.
// Rows of A: downlink threshold [-|h0|^2, a1]; P_m >= 0; P_m <= P0;
// P0 >= 0; P0 <= p_max. Blocks are stored in raw units; power_unit and
// gain_unit record the rescaling applied when the LP is formed, so solutions
// come back in watts.
struct CompactProblem {
  std::vector<double> a;   // [0, |h_1|^4, ..., |h_M|^4]
  std::vector<double> d;   // [alpha |h_SI|^2, 0, ..., 0]
  std::vector<double> a1;  // [eps0 |g_m|^2 |h_m|^2, ...]
  std::vector<std::vector<double>> A;  // (2M+3) x (M+1)
  std::vector<double> b;
  double sigma2 = 0.0;
  double power_unit = 1.0;  // watts per LP power unit (= p_max)
  double gain_unit = 1.0;   // raw objective gain per LP objective unit

  std::size_t device_count() const { return a1.size(); }
};

enum class AllocStatus { Optimal, Infeasible };
const char* to_string(AllocStatus status);

struct AllocationResult {
  model::Allocation allocation;
  std::vector<double> p_vector;   // [P0, P1..PM], watts
  double objective_ratio = 0.0;   // a.p / (d.p + sigma2)
  double p_star = 0.0;            // average sum rate of the allocation, BPCU
  AllocStatus status = AllocStatus::Infeasible;

  // Solver diagnostics, zero when the scheme did not go through the
  // fractional-to-LP substitution. Not serialized.
  double charnes_cooper_z = 0.0;
  double lp_objective = 0.0;
};

CompactProblem build_compact(const model::ChannelRealization& ch, double alpha,
                             double sigma2, double eps0, double p_max);

// The substitution y = q/(d.q + s2), z = 1/(d.q + s2) on the power-rescaled
// problem (q = p/power_unit, s2 = sigma2/power_unit) turns the ratio into the
// linear objective a.y: maximize a.y subject to A y <= b z, d.y + s2 z = 1,
// y, z >= 0. Variables are [y_0..y_M, z]; rows are max-abs equilibrated.
linprog::LpProblem charnes_cooper_lp(const CompactProblem& cp);

// Maximizes the average sum rate. Infeasible iff p_max |h0|^2 < eps0 sigma2
// (the downlink target fails even with every device silent). Throws
// std::runtime_error if the LP misbehaves (unbounded, or z* <= 1e-12).
AllocationResult solve_optimal(const model::ChannelRealization& ch,
                               const Params& params);

// Maximizes the rate at a fixed excitation power s0_sq > 0. The LP objective
// is s0_sq * a, and a positive factor on the objective cannot move the
// argmax, so the factor is folded into the recorded objective rescaling and
// the solve is shared with solve_optimal; the recovered allocation is
// identical by construction. p_star still reports the average-rate objective
// of that allocation.
AllocationResult solve_instantaneous(const model::ChannelRealization& ch,
                                     const Params& params, double s0_sq);

// Two-device high-SNR solution: with the noise term dropped, P0 cancels and
// the problem reduces to maximizing eta_1 |h_1|^4 + eta_2 |h_2|^4 over the
// polygon {0 <= eta <= 1, w.eta <= |h0|^2/eps0}, w_m = |g_m|^2 |h_m|^2,
// solved by vertex enumeration. Ties break toward larger eta_1, then larger
// eta_2. P0 is pinned to p_max; the reported objective is the exact average
// rate of the returned allocation. Requires M = 2.
AllocationResult closed_form_two_user(const model::ChannelRealization& ch,
                                      const Params& params);

// A random vertex of the feasibility region A p <= b (no substitution
// needed: the feasible set is explicit in p). Reports the achieved average
// rate of that vertex.
AllocationResult random_allocation(const model::ChannelRealization& ch,
                                   const Params& params, rng::Stream& stream);

// Restricts the scenario to one device (1-based index) and solves the
// single-device problem; the result is re-expanded to full width with the
// idle devices at eta = 0.
AllocationResult oma_allocation(const model::ChannelRealization& ch,
                                const Params& params, int device_index);

// Exhaustive search over the eta grid {0, 1/steps, ..., 1}^M at fixed P0,
// skipping points that violate the downlink threshold. Cost guard: M <= 3,
// steps >= 100.
AllocationResult grid_oracle(const model::ChannelRealization& ch,
                             const Params& params, double p0_fixed, int steps);

nlohmann::json result_to_json(const AllocationResult& result);

}  // namespace bacnoma::alloc

#endif  // BACNOMA_ALLOCATOR_HPP
