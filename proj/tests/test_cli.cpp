#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

// End-to-end checks against the built binary: exit codes, error wording,
// and file outputs. Paths come in through compile definitions.

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run_cli(const std::string& args) {
  const std::string out_path = "cli_stdout_tmp.txt";
  const std::string err_path = "cli_stderr_tmp.txt";
  const std::string cmd = std::string("\"") + BACNOMA_CLI_PATH + "\" " + args +
                          " >" + out_path + " 2>" + err_path;
  const int status = std::system(cmd.c_str());
  RunResult result;
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return result;
}

std::string data_file(const std::string& name) {
  return std::string(BACNOMA_TEST_DATA_DIR) + "/" + name;
}

std::string config_file(const std::string& name) {
  return std::string(BACNOMA_CONFIG_DIR) + "/" + name;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

int count_lines(const std::string& text) {
  int lines = 0;
  for (char c : text) lines += c == '\n';
  return lines;
}

}  // namespace

TEST_CASE("a subcommand is required") {
  const RunResult res = run_cli("");
  CHECK(res.exit_code == 2);
  CHECK(contains(res.err, "subcommand"));
}

TEST_CASE("help exits cleanly") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("solve --help").exit_code == 0);
}

TEST_CASE("unknown flags and subcommands are parse errors") {
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("fig3 --no-such-flag").exit_code == 2);
  CHECK(run_cli("solve --config").exit_code == 2);  // missing value
}

TEST_CASE("solve on the study scenario") {
  const RunResult res =
      run_cli("solve --config " + config_file("two_device.json"));
  CHECK(res.exit_code == 0);
  CHECK(contains(res.out, "P0"));
  CHECK(contains(res.out, "eta"));
  CHECK(contains(res.out, "downlink rate"));
  CHECK(res.err.empty());
}

TEST_CASE("solve writes machine output only to --out") {
  const std::string out_path = "cli_solve_tmp.json";
  const RunResult res = run_cli("solve --config " + config_file("two_device.json") +
                                " --quiet --out " + out_path);
  CHECK(res.exit_code == 0);
  CHECK(res.out.empty());
  const nlohmann::json j = nlohmann::json::parse(slurp(out_path));
  std::remove(out_path.c_str());
  CHECK(j.at("status") == "optimal");
  REQUIRE(j.at("allocation").at("eta").size() == 2);
  const double eta1 = j.at("allocation").at("eta")[1].get<double>();
  CHECK(eta1 > 0.28);
  CHECK(eta1 < 0.30);
}

TEST_CASE("a config missing p_max is a usage error naming the field") {
  const RunResult res =
      run_cli("solve --config " + data_file("broken_missing_pmax.json"));
  CHECK(res.exit_code == 2);
  CHECK(contains(res.err, "p_max"));
}

TEST_CASE("an unreadable config is a usage error") {
  CHECK(run_cli("solve --config definitely_not_here.json").exit_code == 2);
  CHECK(run_cli("solve").exit_code == 2);
}

TEST_CASE("an infeasible instance exits 1 and cites the budget") {
  const RunResult res =
      run_cli("solve --config " + data_file("infeasible.json"));
  CHECK(res.exit_code == 1);
  CHECK(contains(res.err, "infeasible"));
  CHECK(contains(res.err, "eps0*sigma2"));
  CHECK(contains(res.err, "every device silent"));
}

TEST_CASE("fig3 prints the deterministic study") {
  const RunResult res = run_cli("fig3");
  CHECK(res.exit_code == 0);
  CHECK(contains(res.out, "solver"));
  CHECK(contains(res.out, "closed form"));
  CHECK(contains(res.out, "grid oracle"));
  CHECK(contains(res.out, "0.28"));
}

TEST_CASE("unknown scheme names are rejected") {
  const RunResult res = run_cli("sweep-m --trials 5 --scheme carrier_pigeon");
  CHECK(res.exit_code == 2);
  CHECK(contains(res.err, "carrier_pigeon"));
}

TEST_CASE("sweep-m emits the full CSV and a metadata sidecar") {
  const std::string out_path = "cli_sweep_m_tmp.csv";
  const RunResult res =
      run_cli("sweep-m --trials 8 --quiet --out " + out_path);
  CHECK(res.exit_code == 0);
  const std::string text = slurp(out_path);
  CHECK(contains(
      text, "sweep_value,scheme,mean_bpcu,stderr_bpcu,infeasible,trials"));
  CHECK(count_lines(text) == 1 + 7 * 3);  // M in {2..8} x 3 schemes

  const nlohmann::json meta =
      nlohmann::json::parse(slurp(out_path + ".meta.json"));
  CHECK(meta.at("sweep") == "device_count");
  CHECK(meta.at("trials") == 8);
  std::remove(out_path.c_str());
  std::remove((out_path + ".meta.json").c_str());
}

TEST_CASE("sweep-alpha covers the default alpha grid") {
  const std::string out_path = "cli_sweep_a_tmp.csv";
  const RunResult res =
      run_cli("sweep-alpha --trials 5 --quiet --out " + out_path);
  CHECK(res.exit_code == 0);
  const std::string text = slurp(out_path);
  std::remove(out_path.c_str());
  std::remove((out_path + ".meta.json").c_str());
  CHECK(count_lines(text) == 1 + 6 * 3);  // six alphas x 3 schemes
  CHECK(contains(text, "0.5,"));
}

TEST_CASE("identical sweep invocations give identical bytes") {
  const std::string pa = "cli_repeat_a_tmp.csv";
  const std::string pb = "cli_repeat_b_tmp.csv";
  CHECK(run_cli("sweep-m --trials 6 --quiet --out " + pa).exit_code == 0);
  CHECK(run_cli("sweep-m --trials 6 --quiet --out " + pb).exit_code == 0);
  const std::string a = slurp(pa), b = slurp(pb);
  CHECK(!a.empty());
  CHECK(a == b);
  std::remove(pa.c_str());
  std::remove(pb.c_str());
  std::remove((pa + ".meta.json").c_str());
  std::remove((pb + ".meta.json").c_str());
}

TEST_CASE("a different seed changes the sweep") {
  const std::string pa = "cli_seed_a_tmp.csv";
  const std::string pb = "cli_seed_b_tmp.csv";
  CHECK(run_cli("sweep-m --trials 6 --quiet --out " + pa).exit_code == 0);
  CHECK(run_cli("sweep-m --trials 6 --seed 7 --quiet --out " + pb)
            .exit_code == 0);
  CHECK(slurp(pa) != slurp(pb));
  std::remove(pa.c_str());
  std::remove(pb.c_str());
  std::remove((pa + ".meta.json").c_str());
  std::remove((pb + ".meta.json").c_str());
}

TEST_CASE("oracle-check passes on random instances") {
  const RunResult res = run_cli("oracle-check --trials 5 --steps 150");
  CHECK(res.exit_code == 0);
  CHECK(contains(res.out, "max oracle excess"));
}

TEST_CASE("selftest passes") {
  const RunResult res = run_cli("selftest");
  CHECK(res.exit_code == 0);
  CHECK(contains(res.out, "ok"));
}
