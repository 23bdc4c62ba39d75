#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bacnoma/allocator.hpp"
#include "bacnoma/harness.hpp"
#include "bacnoma/linprog.hpp"
#include "bacnoma/model.hpp"
#include "bacnoma/rng.hpp"
#include "bacnoma/scenario_io.hpp"
#include "bacnoma/specfun.hpp"

namespace {

namespace alloc = bacnoma::alloc;
namespace harness = bacnoma::harness;
namespace linprog = bacnoma::linprog;
namespace model = bacnoma::model;
namespace rng = bacnoma::rng;
namespace specfun = bacnoma::specfun;

constexpr std::uint64_t kOracleCheckTag = 0x6f7261636c65ull;
constexpr std::uint64_t kSelftestTag = 0x73656c66ull;

struct Options {
  std::string config_path;
  std::string out_path;
  int trials = 5000;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<std::string> scheme_names;
  int jobs = 0;
  bool quiet = false;
};

void print_eta(const std::vector<double>& eta) {
  std::printf("[");
  for (std::size_t i = 0; i < eta.size(); ++i) {
    std::printf(i ? ", %.6g" : "%.6g", eta[i]);
  }
  std::printf("]");
}

// Returns false and reports on stderr when a name is unknown.
bool parse_schemes(const std::vector<std::string>& names,
                   std::vector<harness::Scheme>& out) {
  if (names.empty()) return true;
  out.clear();
  for (const std::string& name : names) {
    const auto scheme = harness::scheme_from_name(name);
    if (!scheme) {
      std::cerr << "error: unknown scheme \"" << name
                << "\" (expected noma_optimal, noma_random, oma_roundrobin)\n";
      return false;
    }
    out.push_back(*scheme);
  }
  return true;
}

bool load_config(const Options& opt, model::ScenarioConfig& config) {
  if (opt.config_path.empty()) return true;
  try {
    config = model::load_scenario(opt.config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return false;
  }
  return true;
}

int cmd_solve(const Options& opt) {
  model::ScenarioConfig config;
  if (opt.config_path.empty()) {
    std::cerr << "error: solve needs --config\n";
    return 2;
  }
  if (!load_config(opt, config)) return 2;
  if (opt.seed_set) config.seed = opt.seed;

  rng::Stream stream(config.seed);
  const model::ChannelRealization ch = model::sample_channels(config, stream);
  const alloc::Params params = alloc::Params::from_scenario(config);

  const double budget = params.p_max * ch.h0_sq;
  const double need = params.eps0 * params.sigma2;
  if (budget < need) {
    std::fprintf(stderr,
                 "infeasible: p_max*|h0|^2 = %.6g W is below eps0*sigma2 = "
                 "%.6g W, so the downlink rate target r0 = %g BPCU cannot be "
                 "met even with every device silent\n",
                 budget, need, config.r0);
    return 1;
  }

  const alloc::AllocationResult res = alloc::solve_optimal(ch, params);
  if (res.status != alloc::AllocStatus::Optimal) {
    std::cerr << "error: solver reported infeasible\n";
    return 1;
  }

  model::RateReport report;
  report.avg_sum_rate = res.p_star;
  report.inst_sum_rate = model::instantaneous_sum_rate(
      ch, res.allocation, 1.0, params.alpha, params.sigma2);
  report.downlink_rate = model::downlink_rate(ch, res.allocation, params.sigma2);

  if (!opt.quiet) {
    std::printf("seed            %llu\n",
                static_cast<unsigned long long>(config.seed));
    std::printf("P0              %.9g W\n", res.allocation.p0);
    std::printf("eta             ");
    print_eta(res.allocation.eta);
    std::printf("\n");
    std::printf("objective ratio %.9g\n", res.objective_ratio);
    std::printf("avg sum rate    %.9g BPCU\n", report.avg_sum_rate);
    std::printf("inst rate @1    %.9g BPCU\n", report.inst_sum_rate);
    std::printf("downlink rate   %.9g BPCU (target %g)\n",
                report.downlink_rate, config.r0);
  }
  if (!opt.out_path.empty()) {
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << opt.out_path << "\n";
      return 1;
    }
    out << alloc::result_to_json(res).dump(2) << "\n";
  }
  return 0;
}

int cmd_study(const Options& opt, int steps) {
  model::ScenarioConfig config = harness::two_device_scenario();
  if (!load_config(opt, config)) return 2;

  harness::DeterministicStudy study;
  try {
    study = harness::run_deterministic_study(config, steps);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  const double oracle_gap =
      study.lp.p_star - study.oracle_at_lp_p0.p_star;
  const double ref_rel =
      std::abs(study.rate_at_reference_p0 - study.lp.p_star) /
      study.lp.p_star;
  if (!opt.quiet) {
    std::printf("solver      P0 %.9g W, eta ", study.lp.allocation.p0);
    print_eta(study.lp.allocation.eta);
    std::printf(", rate %.9g BPCU\n", study.lp.p_star);
    std::printf("closed form P0 %.9g W, eta ",
                study.closed_form.allocation.p0);
    print_eta(study.closed_form.allocation.eta);
    std::printf(", rate %.9g BPCU\n", study.closed_form.p_star);
    std::printf("grid oracle @ solver P0: eta ");
    print_eta(study.oracle_at_lp_p0.allocation.eta);
    std::printf(", rate %.9g BPCU (gap %.3g)\n",
                study.oracle_at_lp_p0.p_star, oracle_gap);
    std::printf("grid oracle @ P0 = %.3g: eta ", study.reference_p0);
    print_eta(study.oracle_at_reference.allocation.eta);
    std::printf(", rate %.9g BPCU\n", study.oracle_at_reference.p_star);
    std::printf("rate at reference P0 %.9g BPCU (rel diff %.3g)\n",
                study.rate_at_reference_p0, ref_rel);
    std::printf("max objective discrepancy %.3g BPCU\n",
                study.max_objective_discrepancy);
  }
  if (!opt.out_path.empty()) {
    nlohmann::json j;
    j["solver"] = alloc::result_to_json(study.lp);
    j["closed_form"] = alloc::result_to_json(study.closed_form);
    j["oracle_at_solver_p0"] = alloc::result_to_json(study.oracle_at_lp_p0);
    j["oracle_at_reference_p0"] =
        alloc::result_to_json(study.oracle_at_reference);
    j["reference_p0"] = study.reference_p0;
    j["rate_at_reference_p0"] = study.rate_at_reference_p0;
    j["max_objective_discrepancy"] = study.max_objective_discrepancy;
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << opt.out_path << "\n";
      return 1;
    }
    out << j.dump(2) << "\n";
  }
  return 0;
}

int run_sweep_command(const Options& opt, harness::SweepKind kind) {
  harness::ExperimentSpec spec;
  spec.base = harness::sweep_scenario();
  std::vector<std::string> notes;
  if (kind == harness::SweepKind::DeviceCount) {
    spec.sweep_values = {2, 3, 4, 5, 6, 7, 8};
    notes.push_back("defaults: alpha = 0.01, r0 = 1 BPCU");
  } else {
    spec.base.r0 = 3.0;
    spec.base.m = 4;
    spec.sweep_values = {0.01, 0.02, 0.05, 0.1, 0.2, 0.5};
    notes.push_back("defaults: M = 4, r0 = 3 BPCU");
  }
  if (!load_config(opt, spec.base)) return 2;
  spec.sweep = kind;
  spec.trials = opt.trials;
  spec.master_seed = opt.seed_set ? opt.seed : spec.base.seed;
  spec.jobs = opt.jobs;
  if (!parse_schemes(opt.scheme_names, spec.schemes)) return 2;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const harness::SweepResult result = harness::run_sweep(spec);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  if (!opt.quiet) {
    const char* label =
        kind == harness::SweepKind::DeviceCount ? "M" : "alpha";
    for (const harness::SweepCell& cell : result.cells) {
      std::printf("%s = %g (%d/%d infeasible)\n", label, cell.sweep_value,
                  cell.infeasible, cell.trials);
      for (std::size_t si = 0; si < result.schemes.size(); ++si) {
        if (std::isfinite(cell.mean_bpcu[si])) {
          std::printf("  %-14s %.6g +- %.3g BPCU\n",
                      harness::to_string(result.schemes[si]),
                      cell.mean_bpcu[si], cell.stderr_bpcu[si]);
        } else {
          std::printf("  %-14s (no feasible trials)\n",
                      harness::to_string(result.schemes[si]));
        }
      }
    }
    std::printf("wall time %.2f s\n", wall);
  }
  if (!opt.out_path.empty()) {
    try {
      harness::emit_csv(result, opt.out_path);
      harness::emit_metadata(spec, opt.out_path + ".meta.json", wall, notes);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 0;
}

int cmd_oracle_check(const Options& opt, int trials, int steps) {
  model::ScenarioConfig config = harness::sweep_scenario();
  config.m = 2;
  if (!load_config(opt, config)) return 2;
  if (config.m > 3) {
    std::cerr << "error: oracle-check needs M <= 3\n";
    return 2;
  }
  const std::uint64_t master = opt.seed_set ? opt.seed : config.seed;
  const alloc::Params params0 = alloc::Params::from_scenario(config);

  int checked = 0;
  int skipped = 0;
  double worst_over = 0.0;   // oracle above solver, should stay ~0
  double worst_slack = 0.0;  // solver above oracle, relative to the bound
  for (int t = 0; t < trials; ++t) {
    rng::Stream stream(rng::derive(master, kOracleCheckTag,
                                   static_cast<std::uint64_t>(t)));
    const model::ChannelRealization ch = model::sample_channels(config, stream);
    if (params0.p_max * ch.h0_sq < params0.eps0 * params0.sigma2) {
      ++skipped;
      continue;
    }
    const alloc::AllocationResult lp = alloc::solve_optimal(ch, params0);
    const alloc::AllocationResult oracle =
        alloc::grid_oracle(ch, params0, lp.allocation.p0, steps);
    ++checked;

    // One grid step per eta coordinate, f' <= f'(0) = 1.
    const double p0 = lp.allocation.p0;
    double gain_sum = 0.0;
    for (double h : ch.h_sq) gain_sum += h * h;
    const double denom = params0.alpha * p0 * ch.hsi_sq + params0.sigma2;
    const double bound =
        std::numbers::log2e * p0 * gain_sum / (denom * steps);
    const double fp_eps = 1e-9 * (1.0 + std::abs(lp.p_star));

    worst_over = std::max(worst_over, oracle.p_star - lp.p_star);
    if (bound > 0.0) {
      worst_slack =
          std::max(worst_slack, (lp.p_star - oracle.p_star) / bound);
    }
    if (oracle.p_star > lp.p_star + fp_eps ||
        lp.p_star - oracle.p_star > bound + fp_eps) {
      std::fprintf(stderr,
                   "FAIL trial %d: solver %.12g BPCU, oracle %.12g BPCU, "
                   "discretization bound %.3g\n",
                   t, lp.p_star, oracle.p_star, bound);
      return 1;
    }
  }
  if (!opt.quiet) {
    std::printf("oracle-check ok: %d instances (%d infeasible skipped), "
                "max oracle excess %.3g BPCU, max gap %.3g of bound\n",
                checked, skipped, worst_over, worst_slack);
  }
  return 0;
}

struct SelftestReport {
  int failures = 0;
  bool quiet = false;

  void check(bool ok, const char* name) {
    if (!ok) {
      ++failures;
      std::printf("FAIL %s\n", name);
    } else if (!quiet) {
      std::printf("ok   %s\n", name);
    }
  }
};

void selftest_specfun(SelftestReport& report) {
  bool monotone = true;
  double prev = specfun::avg_rate_kernel(0.0);
  for (int i = 0; i < 200; ++i) {
    const double x = std::pow(10.0, -3.0 + 6.0 * (i + 1) / 200.0);
    const double v = specfun::avg_rate_kernel(x);
    if (!(v > prev)) monotone = false;
    prev = v;
  }
  report.check(specfun::avg_rate_kernel(0.0) == 0.0, "kernel value at 0");
  report.check(monotone, "kernel monotone on log grid");

  bool derivative_ok = true;
  for (double x : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const double h = x * 1e-6;
    const double fd = (specfun::avg_rate_kernel(x + h) -
                       specfun::avg_rate_kernel(x - h)) /
                      (2.0 * h);
    const double cf = specfun::avg_rate_kernel_derivative(x);
    if (std::abs(cf - fd) > 1e-6 * std::abs(cf)) derivative_ok = false;
  }
  report.check(derivative_ok, "kernel derivative vs central differences");

  const double t = 50.0;
  report.check(std::abs(specfun::e1_scaled(t) * t - 1.0) < 0.02,
               "e1 leading asymptotic at t = 50");
  report.check(specfun::ei_neg(2.0) == -specfun::e1(2.0),
               "ei_neg is the negation of e1");
}

void selftest_linprog(SelftestReport& report) {
  linprog::LpProblem box;
  box.objective = {1.0};
  box.a_ub = {{1.0}};
  box.b_ub = {3.0};
  const linprog::LpSolution sol = linprog::solve(box);
  report.check(sol.status == linprog::LpStatus::Optimal &&
                   std::abs(sol.objective_value - 3.0) < 1e-12,
               "one-dimensional box LP");

  linprog::LpProblem face;
  face.objective = {1.0, 1.0};
  face.a_ub = {{1.0, 1.0}};
  face.b_ub = {1.0};
  const linprog::LpSolution fsol = linprog::solve(face);
  report.check(fsol.status == linprog::LpStatus::Optimal &&
                   std::abs(fsol.objective_value - 1.0) < 1e-12,
               "flat-face LP objective");

  linprog::LpProblem infeasible;
  infeasible.objective = {1.0};
  infeasible.a_ub = {{1.0}, {-1.0}};
  infeasible.b_ub = {1.0, -2.0};
  report.check(linprog::solve(infeasible).status ==
                   linprog::LpStatus::Infeasible,
               "infeasible LP detection");

  linprog::LpProblem unbounded;
  unbounded.objective = {1.0};
  report.check(linprog::solve(unbounded).status ==
                   linprog::LpStatus::Unbounded,
               "unbounded LP detection");

  linprog::LpProblem cube;
  cube.objective = {0.0, 0.0};
  cube.a_ub = {{1.0, 0.0}, {0.0, 1.0}};
  cube.b_ub = {1.0, 1.0};
  bool vertices_ok = true;
  rng::Stream stream(rng::derive(kSelftestTag, 1));
  for (int i = 0; i < 50; ++i) {
    const linprog::LpSolution v = linprog::random_vertex(cube, stream);
    if (v.status != linprog::LpStatus::Optimal ||
        !linprog::solution_feasible(cube, v)) {
      vertices_ok = false;
    }
  }
  report.check(vertices_ok, "random vertices stay feasible");
}

void selftest_allocator(SelftestReport& report) {
  model::ScenarioConfig config = harness::sweep_scenario();
  config.m = 3;
  const alloc::Params params = alloc::Params::from_scenario(config);

  bool recovery_ok = true;
  bool ratio_ok = true;
  bool random_ok = true;
  bool oma_ok = true;
  bool inst_ok = true;
  int done = 0;
  for (std::uint64_t t = 0; done < 25 && t < 200; ++t) {
    rng::Stream stream(rng::derive(kSelftestTag, 2, t));
    const model::ChannelRealization ch = model::sample_channels(config, stream);
    if (params.p_max * ch.h0_sq < params.eps0 * params.sigma2) continue;
    ++done;

    const alloc::AllocationResult best = alloc::solve_optimal(ch, params);
    const alloc::CompactProblem cp = alloc::build_compact(
        ch, params.alpha, params.sigma2, params.eps0, params.p_max);
    for (std::size_t i = 0; i < cp.A.size(); ++i) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < cp.A[i].size(); ++j) {
        lhs += cp.A[i][j] * best.p_vector[j];
      }
      if (lhs > cp.b[i] + 1e-8 * (1.0 + std::abs(cp.b[i]))) recovery_ok = false;
    }
    if (std::abs(best.objective_ratio - best.lp_objective) >
        1e-8 * (1.0 + std::abs(best.lp_objective))) {
      ratio_ok = false;
    }

    rng::Stream sub(rng::derive(kSelftestTag, 3, t));
    const alloc::AllocationResult random =
        alloc::random_allocation(ch, params, sub);
    if (random.p_star > best.p_star + 1e-9) random_ok = false;

    for (int device = 1; device <= config.m; ++device) {
      const alloc::AllocationResult oma =
          alloc::oma_allocation(ch, params, device);
      if (oma.p_star > best.p_star + 1e-9) oma_ok = false;
    }

    const alloc::AllocationResult inst =
        alloc::solve_instantaneous(ch, params, 5.0);
    if (std::abs(inst.allocation.p0 - best.allocation.p0) > 1e-9) {
      inst_ok = false;
    }
    for (std::size_t i = 0; i < best.allocation.eta.size(); ++i) {
      if (std::abs(inst.allocation.eta[i] - best.allocation.eta[i]) > 1e-9) {
        inst_ok = false;
      }
    }
  }
  report.check(done == 25, "enough feasible instances drawn");
  report.check(recovery_ok, "recovered powers satisfy the constraint block");
  report.check(ratio_ok, "fractional objective matches the LP objective");
  report.check(random_ok, "random vertex never beats the solver");
  report.check(oma_ok, "single-device solve never beats the solver");
  report.check(inst_ok, "fixed-excitation solve matches the average solve");
}

void selftest_model(SelftestReport& report) {
  const model::ScenarioConfig config = harness::sweep_scenario();
  const nlohmann::json j = model::scenario_to_json(config);
  const model::ScenarioConfig back = model::scenario_from_json(j);
  report.check(back.m == config.m && back.alpha == config.alpha &&
                   back.sigma2 == config.sigma2 && back.p_max == config.p_max &&
                   back.r0 == config.r0 && back.seed == config.seed,
               "scenario JSON round trip");
  report.check(std::abs(model::watts_to_dbm(model::dbm_to_watts(-94.0)) +
                        94.0) < 1e-12,
               "dBm round trip");
}

int cmd_selftest(const Options& opt) {
  SelftestReport report;
  report.quiet = opt.quiet;
  selftest_specfun(report);
  selftest_linprog(report);
  selftest_allocator(report);
  selftest_model(report);
  if (report.failures > 0) {
    std::printf("%d check(s) failed\n", report.failures);
    return 1;
  }
  if (!opt.quiet) std::printf("all checks passed\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"backscatter NOMA resource allocation"};
  app.require_subcommand(1);

  Options opt;
  const auto add_common = [&](CLI::App* cmd, bool with_out) {
    cmd->add_option("--config", opt.config_path, "scenario JSON file");
    if (with_out) cmd->add_option("--out", opt.out_path, "output file");
    cmd->add_flag("--quiet", opt.quiet, "suppress the summary");
    return cmd;
  };
  const auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", opt.seed, "master seed")
        ->each([&](const std::string&) { opt.seed_set = true; });
  };

  CLI::App* solve = add_common(app.add_subcommand(
      "solve", "solve one scenario instance"), true);
  add_seed(solve);

  CLI::App* study = add_common(app.add_subcommand(
      "fig3", "deterministic two-device study"), true);
  int study_steps = 1000;
  study->add_option("--steps", study_steps, "grid resolution");

  CLI::App* sweep_m = add_common(app.add_subcommand(
      "sweep-m", "sweep the device count"), true);
  add_seed(sweep_m);
  sweep_m->add_option("--trials", opt.trials, "Monte Carlo trials per cell");
  sweep_m->add_option("--scheme", opt.scheme_names, "schemes to run")
      ->delimiter(',');
  sweep_m->add_option("--jobs", opt.jobs, "worker thread cap");

  CLI::App* sweep_alpha = add_common(app.add_subcommand(
      "sweep-alpha", "sweep the self-interference coefficient"), true);
  add_seed(sweep_alpha);
  sweep_alpha->add_option("--trials", opt.trials, "Monte Carlo trials per cell");
  sweep_alpha->add_option("--scheme", opt.scheme_names, "schemes to run")
      ->delimiter(',');
  sweep_alpha->add_option("--jobs", opt.jobs, "worker thread cap");

  CLI::App* oracle = add_common(app.add_subcommand(
      "oracle-check", "solver vs exhaustive grid on random instances"), false);
  add_seed(oracle);
  int oracle_trials = 50;
  int oracle_steps = 500;
  oracle->add_option("--trials", oracle_trials, "instances to check");
  oracle->add_option("--steps", oracle_steps, "grid resolution");

  CLI::App* selftest = add_common(app.add_subcommand(
      "selftest", "run the built-in property checks"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (app.got_subcommand(solve)) return cmd_solve(opt);
    if (app.got_subcommand(study)) return cmd_study(opt, study_steps);
    if (app.got_subcommand(sweep_m)) {
      return run_sweep_command(opt, harness::SweepKind::DeviceCount);
    }
    if (app.got_subcommand(sweep_alpha)) {
      return run_sweep_command(opt, harness::SweepKind::Alpha);
    }
    if (app.got_subcommand(oracle)) {
      return cmd_oracle_check(opt, oracle_trials, oracle_steps);
    }
    if (app.got_subcommand(selftest)) return cmd_selftest(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
