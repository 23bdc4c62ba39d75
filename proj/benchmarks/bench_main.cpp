// Microbenchmarks for the hot paths: kernel evaluation, the simplex solve
// at small and large device counts, channel sampling, and a full paired
// sweep trial. Not registered with ctest; run the binary directly.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "bacnoma/allocator.hpp"
#include "bacnoma/harness.hpp"
#include "bacnoma/linprog.hpp"
#include "bacnoma/model.hpp"
#include "bacnoma/rng.hpp"
#include "bacnoma/specfun.hpp"

using namespace bacnoma;

namespace {

struct Instance {
  model::ChannelRealization ch;
  alloc::Params params;
};

Instance draw_instance(int m, std::uint64_t seed) {
  model::ScenarioConfig config = harness::sweep_scenario();
  config.m = m;
  const alloc::Params params = alloc::Params::from_scenario(config);
  for (std::uint64_t attempt = 0;; ++attempt) {
    rng::Stream stream(rng::derive(seed, attempt));
    const auto ch = model::sample_channels(config, stream);
    if (params.p_max * ch.h0_sq >= params.eps0 * params.sigma2) {
      return {ch, params};
    }
  }
}

void bm_kernel(benchmark::State& state) {
  double x = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(specfun::avg_rate_kernel(x));
    x = x < 1e3 ? x * 1.01 : 1e-3;
  }
}
BENCHMARK(bm_kernel);

void bm_simplex(benchmark::State& state) {
  const Instance inst = draw_instance(static_cast<int>(state.range(0)), 0xb1);
  const alloc::CompactProblem cp =
      alloc::build_compact(inst.ch, inst.params.alpha, inst.params.sigma2,
                           inst.params.eps0, inst.params.p_max);
  const linprog::LpProblem lp = alloc::charnes_cooper_lp(cp);
  for (auto _ : state) {
    benchmark::DoNotOptimize(linprog::solve(lp));
  }
}
BENCHMARK(bm_simplex)->Arg(2)->Arg(8);

void bm_solve_optimal(benchmark::State& state) {
  const Instance inst = draw_instance(static_cast<int>(state.range(0)), 0xb2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(alloc::solve_optimal(inst.ch, inst.params));
  }
}
BENCHMARK(bm_solve_optimal)->Arg(2)->Arg(8);

void bm_sample_channels(benchmark::State& state) {
  model::ScenarioConfig config = harness::sweep_scenario();
  config.m = static_cast<int>(state.range(0));
  rng::Stream stream(0xb3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model::sample_channels(config, stream));
  }
}
BENCHMARK(bm_sample_channels)->Arg(2)->Arg(8);

// One paired trial: a shared channel draw rated under all three schemes.
void bm_paired_trial(benchmark::State& state) {
  const Instance inst = draw_instance(4, 0xb4);
  std::uint64_t trial = 0;
  for (auto _ : state) {
    const auto best = alloc::solve_optimal(inst.ch, inst.params);
    rng::Stream random_stream(rng::derive(0xb4, trial, 17));
    const auto random =
        alloc::random_allocation(inst.ch, inst.params, random_stream);
    const auto oma = alloc::oma_allocation(
        inst.ch, inst.params, 1 + static_cast<int>(trial % 4));
    benchmark::DoNotOptimize(best.p_star + random.p_star + oma.p_star);
    ++trial;
  }
}
BENCHMARK(bm_paired_trial);

void bm_grid_oracle(benchmark::State& state) {
  const Instance inst = draw_instance(2, 0xb5);
  const auto lp = alloc::solve_optimal(inst.ch, inst.params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        alloc::grid_oracle(inst.ch, inst.params, lp.allocation.p0, 500));
  }
}
BENCHMARK(bm_grid_oracle);

}  // namespace

BENCHMARK_MAIN();
