#ifndef BACNOMA_TESTS_GENERATORS_HPP
#define BACNOMA_TESTS_GENERATORS_HPP

// Shared random-instance builders for the test binaries.

#include <cstdint>
#include <vector>

#include "bacnoma/allocator.hpp"
#include "bacnoma/harness.hpp"
#include "bacnoma/linprog.hpp"
#include "bacnoma/model.hpp"
#include "bacnoma/rng.hpp"

namespace gen {

// Small LP with integer-grid coefficients so the vertex-enumeration oracle
// never sees an ill-conditioned active set. b_ub entries are mostly
// nonnegative, which keeps a healthy share of instances feasible; negative
// entries are allowed so the infeasible path gets exercised too.
inline bacnoma::linprog::LpProblem random_lp(bacnoma::rng::Stream& stream,
                                             bool with_eq) {
  using bacnoma::linprog::LpProblem;
  const auto grid = [&](double lo, double hi) {
    const int steps = static_cast<int>((hi - lo) * 2.0 + 0.5);
    const int k = static_cast<int>(stream.uniform01() * (steps + 1));
    return lo + 0.5 * k;
  };

  LpProblem p;
  const int n = 1 + static_cast<int>(stream.uniform01() * 5.0);    // 1..5
  const int rows = 1 + static_cast<int>(stream.uniform01() * 6.0); // 1..6
  p.objective.resize(static_cast<std::size_t>(n));
  for (auto& c : p.objective) c = grid(-3.0, 3.0);

  const int n_ub = with_eq ? rows - 1 : rows;
  for (int i = 0; i < n_ub; ++i) {
    std::vector<double> row(static_cast<std::size_t>(n));
    for (auto& v : row) v = grid(-3.0, 3.0);
    p.a_ub.push_back(row);
    p.b_ub.push_back(stream.uniform01() < 0.15 ? grid(-3.0, -0.5)
                                               : grid(0.0, 4.0));
  }
  if (with_eq) {
    // Right-hand side taken from a random nonnegative point, so the
    // equality never makes the instance trivially infeasible by itself.
    std::vector<double> row(static_cast<std::size_t>(n));
    std::vector<double> x0(static_cast<std::size_t>(n));
    double rhs = 0.0;
    for (int j = 0; j < n; ++j) {
      row[static_cast<std::size_t>(j)] = grid(-2.0, 2.0);
      x0[static_cast<std::size_t>(j)] = grid(0.0, 2.0);
      rhs += row[static_cast<std::size_t>(j)] * x0[static_cast<std::size_t>(j)];
    }
    p.a_eq.push_back(row);
    p.b_eq.push_back(rhs);
  }
  // A box row keeps most instances bounded without forcing it.
  if (stream.uniform01() < 0.7) {
    std::vector<double> row(static_cast<std::size_t>(n), 1.0);
    p.a_ub.push_back(row);
    p.b_ub.push_back(grid(1.0, 4.0));
  }
  return p;
}

// Channel draw from the sweep baseline scenario with the requested device
// count, resampled until the downlink budget is satisfiable. `tag` keeps
// different test sites on unrelated streams.
inline bacnoma::model::ChannelRealization feasible_channel(
    std::uint64_t seed, std::uint64_t tag, int m,
    bacnoma::alloc::Params* params_out = nullptr) {
  namespace bn = bacnoma;
  bn::model::ScenarioConfig config = bn::harness::sweep_scenario();
  config.m = m;
  const bn::alloc::Params params = bn::alloc::Params::from_scenario(config);
  for (std::uint64_t attempt = 0;; ++attempt) {
    bn::rng::Stream stream(bn::rng::derive(seed, tag, attempt));
    const auto ch = bn::model::sample_channels(config, stream);
    if (params.p_max * ch.h0_sq >= params.eps0 * params.sigma2) {
      if (params_out != nullptr) *params_out = params;
      return ch;
    }
  }
}

}  // namespace gen

#endif  // BACNOMA_TESTS_GENERATORS_HPP
