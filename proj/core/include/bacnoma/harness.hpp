#ifndef BACNOMA_HARNESS_HPP
#define BACNOMA_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bacnoma/allocator.hpp"
#include "bacnoma/model.hpp"

namespace bacnoma::harness {

inline constexpr const char* kVersion = "0.1.0";

enum class Scheme { NomaOptimal, NomaRandom, OmaRoundRobin };
const char* to_string(Scheme scheme);
std::optional<Scheme> scheme_from_name(std::string_view name);

enum class SweepKind { None, DeviceCount, Alpha };
const char* to_string(SweepKind kind);

struct ExperimentSpec {
  model::ScenarioConfig base;
  SweepKind sweep = SweepKind::None;
  std::vector<double> sweep_values;  // device counts or alpha values
  int trials = 5000;
  std::vector<Scheme> schemes{Scheme::NomaOptimal, Scheme::NomaRandom,
                              Scheme::OmaRoundRobin};
  std::uint64_t master_seed = model::kDefaultSeed;
  int jobs = 0;  // worker cap; 0 picks one per hardware thread

  // Throws std::invalid_argument. A device-count sweep needs the uniform
  // square placement, since an explicit list pins M.
  void validate() const;
};

// One sweep value. Per-trial rates are kept (indexed by trial, zero where
// the trial was infeasible) so paired per-trial comparisons stay possible
// after aggregation.
struct SweepCell {
  double sweep_value = 0.0;
  int trials = 0;
  int infeasible = 0;
  std::vector<char> feasible;              // [trial]
  std::vector<std::vector<double>> rates;  // [scheme][trial], BPCU
  std::vector<double> mean_bpcu;           // [scheme]; NaN when no feasible trial
  std::vector<double> stderr_bpcu;         // [scheme]; NaN when no feasible trial
};

struct SweepResult {
  std::vector<Scheme> schemes;
  std::vector<SweepCell> cells;
};

// Runs every requested scheme on the same channel draw, trial by trial.
// Trial seeds derive from (master_seed, sweep_value, trial), so the result
// is independent of worker count and execution order. Trials failing the
// downlink budget p_max |h0|^2 >= eps0 sigma2 are counted and excluded.
SweepResult run_sweep(const ExperimentSpec& spec);

// Fixed two-device geometry with fading off: exact solver against the
// closed form and the exhaustive grid, at the solver's P0 and at a
// reference P0 (the rate surface is nearly flat in P0, which the caller
// can check via rate_at_reference_p0).
struct DeterministicStudy {
  alloc::AllocationResult lp;
  alloc::AllocationResult closed_form;
  alloc::AllocationResult oracle_at_lp_p0;
  alloc::AllocationResult oracle_at_reference;
  double reference_p0 = 0.0;
  double rate_at_reference_p0 = 0.0;       // solver's eta rated at reference_p0
  double max_objective_discrepancy = 0.0;  // max pairwise rate gap, BPCU
};

DeterministicStudy run_deterministic_study(const model::ScenarioConfig& config,
                                           int grid_steps = 1000,
                                           double reference_p0 = 0.043);

// Header "sweep_value,scheme,mean_bpcu,stderr_bpcu,infeasible,trials", one
// row per cell and scheme, numbers at 9 significant digits, empty mean and
// stderr fields for an all-infeasible cell.
void emit_csv(const SweepResult& result, const std::string& path);

// JSON sidecar describing the run: scenario echo, sweep, schemes, seed,
// version, wall time, free-form notes.
void emit_metadata(const ExperimentSpec& spec, const std::string& path,
                   double wall_seconds,
                   const std::vector<std::string>& notes = {});

// Two-device study geometry: devices pinned at (-2,0) and (2,0), no fading,
// alpha = 0.005, target rate 1 BPCU.
model::ScenarioConfig two_device_scenario();

// Sweep baseline: devices uniform in the 5 m square, fading on,
// alpha = 0.01, target rate 1 BPCU.
model::ScenarioConfig sweep_scenario();

}  // namespace bacnoma::harness

#endif  // BACNOMA_HARNESS_HPP
