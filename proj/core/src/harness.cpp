#include "bacnoma/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "bacnoma/scenario_io.hpp"

namespace bacnoma::harness {

namespace {

// Sub-stream tag for the random-vertex scheme, kept apart from the channel
// stream so every scheme sees the same realization.
constexpr std::uint64_t kRandomSchemeTag = 0x52414e445645525Eull;

}  // namespace

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::NomaOptimal: return "noma_optimal";
    case Scheme::NomaRandom: return "noma_random";
    case Scheme::OmaRoundRobin: return "oma_roundrobin";
  }
  return "unknown";
}

std::optional<Scheme> scheme_from_name(std::string_view name) {
  if (name == "noma_optimal") return Scheme::NomaOptimal;
  if (name == "noma_random") return Scheme::NomaRandom;
  if (name == "oma_roundrobin") return Scheme::OmaRoundRobin;
  return std::nullopt;
}

const char* to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::None: return "none";
    case SweepKind::DeviceCount: return "device_count";
    case SweepKind::Alpha: return "alpha";
  }
  return "unknown";
}

void ExperimentSpec::validate() const {
  base.validate();
  if (trials < 1) throw std::invalid_argument("ExperimentSpec: trials < 1");
  if (schemes.empty()) {
    throw std::invalid_argument("ExperimentSpec: no schemes requested");
  }
  if (sweep == SweepKind::None) return;
  if (sweep_values.empty()) {
    throw std::invalid_argument("ExperimentSpec: empty sweep list");
  }
  for (double v : sweep_values) {
    if (sweep == SweepKind::DeviceCount) {
      if (!(v >= 1.0) || v != std::floor(v)) {
        throw std::invalid_argument(
            "ExperimentSpec: device counts must be integers >= 1");
      }
      if (base.device_placement.kind != model::DevicePlacement::Kind::UniformSquare) {
        throw std::invalid_argument(
            "ExperimentSpec: device-count sweep needs uniform placement");
      }
    } else {
      if (!(v >= 0.0 && v < 1.0)) {
        throw std::invalid_argument(
            "ExperimentSpec: alpha values must lie in [0, 1)");
      }
    }
  }
}

namespace {

model::ScenarioConfig cell_config(const ExperimentSpec& spec, double value) {
  model::ScenarioConfig config = spec.base;
  config.seed = spec.master_seed;
  if (spec.sweep == SweepKind::DeviceCount) {
    config.m = static_cast<int>(std::llround(value));
  } else if (spec.sweep == SweepKind::Alpha) {
    config.alpha = value;
  }
  config.validate();
  return config;
}

void run_trial(const ExperimentSpec& spec, const model::ScenarioConfig& config,
               double value, int trial, SweepCell& cell) {
  const std::uint64_t seed_t = rng::derive(
      spec.master_seed, rng::bits_of(value), static_cast<std::uint64_t>(trial));
  rng::Stream stream(seed_t);
  const model::ChannelRealization ch = model::sample_channels(config, stream);
  const alloc::Params params = alloc::Params::from_scenario(config);

  if (params.p_max * ch.h0_sq < params.eps0 * params.sigma2) return;
  cell.feasible[static_cast<std::size_t>(trial)] = 1;

  for (std::size_t si = 0; si < spec.schemes.size(); ++si) {
    alloc::AllocationResult res;
    switch (spec.schemes[si]) {
      case Scheme::NomaOptimal:
        res = alloc::solve_optimal(ch, params);
        break;
      case Scheme::NomaRandom: {
        rng::Stream sub(rng::derive(seed_t, kRandomSchemeTag));
        res = alloc::random_allocation(ch, params, sub);
        break;
      }
      case Scheme::OmaRoundRobin:
        res = alloc::oma_allocation(ch, params, 1 + trial % config.m);
        break;
    }
    if (res.status != alloc::AllocStatus::Optimal) {
      throw std::runtime_error(
          "run_sweep: solver reported infeasible past the budget gate");
    }
    cell.rates[si][static_cast<std::size_t>(trial)] = res.p_star;
  }
}

SweepCell run_cell(const ExperimentSpec& spec, double value) {
  const model::ScenarioConfig config = cell_config(spec, value);
  SweepCell cell;
  cell.sweep_value = value;
  cell.trials = spec.trials;
  cell.feasible.assign(static_cast<std::size_t>(spec.trials), 0);
  cell.rates.assign(spec.schemes.size(),
                    std::vector<double>(static_cast<std::size_t>(spec.trials), 0.0));

  int jobs = spec.jobs > 0
                 ? spec.jobs
                 : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::clamp(jobs, 1, spec.trials);

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (int t = next.fetch_add(1); t < spec.trials; t = next.fetch_add(1)) {
      try {
        run_trial(spec, config, value, t, cell);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  cell.infeasible = static_cast<int>(
      std::count(cell.feasible.begin(), cell.feasible.end(), 0));
  const int n = spec.trials - cell.infeasible;
  cell.mean_bpcu.assign(spec.schemes.size(),
                        std::numeric_limits<double>::quiet_NaN());
  cell.stderr_bpcu.assign(spec.schemes.size(),
                          std::numeric_limits<double>::quiet_NaN());
  if (n == 0) return cell;
  for (std::size_t si = 0; si < spec.schemes.size(); ++si) {
    double sum = 0.0;
    for (int t = 0; t < spec.trials; ++t) {
      if (cell.feasible[static_cast<std::size_t>(t)]) {
        sum += cell.rates[si][static_cast<std::size_t>(t)];
      }
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (int t = 0; t < spec.trials; ++t) {
      if (cell.feasible[static_cast<std::size_t>(t)]) {
        const double d = cell.rates[si][static_cast<std::size_t>(t)] - mean;
        ss += d * d;
      }
    }
    cell.mean_bpcu[si] = mean;
    cell.stderr_bpcu[si] = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  }
  return cell;
}

}  // namespace

SweepResult run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<double> values = spec.sweep == SweepKind::None
                                   ? std::vector<double>{0.0}
                                   : spec.sweep_values;
  SweepResult out;
  out.schemes = spec.schemes;
  out.cells.reserve(values.size());
  for (double value : values) {
    out.cells.push_back(run_cell(spec, value));
  }
  return out;
}

DeterministicStudy run_deterministic_study(const model::ScenarioConfig& config,
                                           int grid_steps,
                                           double reference_p0) {
  if (config.fading) {
    throw std::invalid_argument("deterministic study: fading must be off");
  }
  if (config.m != 2) {
    throw std::invalid_argument("deterministic study: needs exactly 2 devices");
  }
  if (config.device_placement.kind != model::DevicePlacement::Kind::Explicit) {
    throw std::invalid_argument("deterministic study: needs explicit placement");
  }
  rng::Stream stream(config.seed);
  const model::ChannelRealization ch = model::sample_channels(config, stream);
  const alloc::Params params = alloc::Params::from_scenario(config);

  DeterministicStudy study;
  study.reference_p0 = reference_p0;
  study.lp = alloc::solve_optimal(ch, params);
  if (study.lp.status != alloc::AllocStatus::Optimal) {
    throw std::runtime_error("deterministic study: instance infeasible");
  }
  study.closed_form = alloc::closed_form_two_user(ch, params);
  study.oracle_at_lp_p0 =
      alloc::grid_oracle(ch, params, study.lp.allocation.p0, grid_steps);
  study.oracle_at_reference =
      alloc::grid_oracle(ch, params, reference_p0, grid_steps);

  model::Allocation shifted = study.lp.allocation;
  shifted.p0 = reference_p0;
  study.rate_at_reference_p0 =
      model::average_sum_rate(ch, shifted, config.alpha, config.sigma2);

  const double rates[] = {study.lp.p_star, study.closed_form.p_star,
                          study.oracle_at_lp_p0.p_star,
                          study.oracle_at_reference.p_star};
  for (double a : rates) {
    for (double b : rates) {
      study.max_objective_discrepancy =
          std::max(study.max_objective_discrepancy, std::abs(a - b));
    }
  }
  return study;
}

namespace {

std::string nine_digits(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

void emit_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "sweep_value,scheme,mean_bpcu,stderr_bpcu,infeasible,trials\n";
  for (const SweepCell& cell : result.cells) {
    for (std::size_t si = 0; si < result.schemes.size(); ++si) {
      out << nine_digits(cell.sweep_value) << ','
          << to_string(result.schemes[si]) << ',';
      if (std::isfinite(cell.mean_bpcu[si])) {
        out << nine_digits(cell.mean_bpcu[si]) << ','
            << nine_digits(cell.stderr_bpcu[si]);
      } else {
        out << ',';
      }
      out << ',' << cell.infeasible << ',' << cell.trials << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void emit_metadata(const ExperimentSpec& spec, const std::string& path,
                   double wall_seconds,
                   const std::vector<std::string>& notes) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["scenario"] = model::scenario_to_json(spec.base);
  j["sweep"] = to_string(spec.sweep);
  j["sweep_values"] = spec.sweep_values;
  j["trials"] = spec.trials;
  nlohmann::json names = nlohmann::json::array();
  for (Scheme s : spec.schemes) names.push_back(to_string(s));
  j["schemes"] = std::move(names);
  j["master_seed"] = spec.master_seed;
  j["wall_seconds"] = wall_seconds;
  j["notes"] = notes;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

model::ScenarioConfig two_device_scenario() {
  model::ScenarioConfig config;
  config.m = 2;
  config.bs_position = {0.0, 0.0};
  config.user_position = {3.0, 0.0};
  config.device_placement.kind = model::DevicePlacement::Kind::Explicit;
  config.device_placement.positions = {{-2.0, 0.0}, {2.0, 0.0}};
  config.path_loss_exponent = 3.0;
  config.alpha = 0.005;
  config.sigma2 = model::dbm_to_watts(-94.0);
  config.p_max = model::dbm_to_watts(20.0);
  config.r0 = 1.0;
  config.fading = false;
  return config;
}

model::ScenarioConfig sweep_scenario() {
  model::ScenarioConfig config;
  config.m = 2;
  config.bs_position = {0.0, 0.0};
  config.user_position = {3.0, 0.0};
  config.device_placement.kind = model::DevicePlacement::Kind::UniformSquare;
  config.device_placement.edge = 5.0;
  config.path_loss_exponent = 3.0;
  config.alpha = 0.01;
  config.sigma2 = model::dbm_to_watts(-94.0);
  config.p_max = model::dbm_to_watts(20.0);
  config.r0 = 1.0;
  config.fading = true;
  return config;
}

}  // namespace bacnoma::harness
