#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "nsgap/experiment.hpp"

using namespace nsgap;
namespace fs = std::filesystem;

namespace {

const char* kSmallRun = R"(initial_condition:
  name: taylor-green
solver:
  dim: 2
  n: 16
  m: 4
  dt: 0.002
  T: 0.2
)";

fs::path scratch(const std::string& tag) {
  static std::mt19937_64 rng{std::random_device{}()};
  const fs::path p = fs::temp_directory_path() / ("nsgap-test-" + tag + "-" + std::to_string(rng() % 1000000007));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.yaml";
  std::ofstream(p) << text;
  return p;
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "nsgap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = nsgap_main(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::string parse_error(const std::string& text) {
  try {
    (void)parse_config(text, "cfg.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config parsing: defaults and fields") {
  const auto c = parse_config(kSmallRun);
  CHECK(c.initial.name == "taylor-green");
  CHECK(c.solver.grid.n == 16);
  CHECK(c.solver.m == 4);
  CHECK(c.solver.integrator == Integrator::kImexRk2);
  CHECK(c.analysis.beta.size() == 4);
  CHECK(c.sweep_m.empty());
}

TEST_CASE("config errors name the field and the line") {
  const std::string bad_dt = std::string(kSmallRun).replace(std::string(kSmallRun).find("0.002"), 5, "fast");
  const auto e1 = parse_error(bad_dt);
  CHECK(e1.find("cfg.yaml:7") != std::string::npos);
  CHECK(e1.find("solver.dt") != std::string::npos);

  const auto e2 = parse_error(std::string(kSmallRun) + "  colour: blue\n");
  CHECK(e2.find("colour") != std::string::npos);
  CHECK(e2.find("cfg.yaml:9") != std::string::npos);

  const auto e3 = parse_error("initial_condition:\n  name: taylor-green\n");
  CHECK(e3.find("solver") != std::string::npos);

  const auto e4 = parse_error(std::string(kSmallRun) + "analysis:\n  beta: []\n");
  CHECK(e4.find("analysis.beta") != std::string::npos);

  const auto e5 = parse_error(std::string(kSmallRun) + "sweep:\n  m: [2, 4, 99]\n");
  CHECK(e5.find("sweep.m") != std::string::npos);

  const auto e6 = parse_error("initial_condition:\n  name: vortex\n" + std::string(kSmallRun).substr(40));
  CHECK(e6.find("vortex") != std::string::npos);

  CHECK(parse_error("lemma:\n  weight: reciprocal\n").find("initial_condition") != std::string::npos);
  CHECK_NOTHROW(parse_config("lemma:\n  weight: reciprocal\n", "cfg", false));
}

TEST_CASE("config hash is deterministic and sensitive") {
  const auto a = parse_config(kSmallRun);
  const auto b = parse_config(std::string("# comment\n") + kSmallRun);
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 64);
  auto c = a;
  c.solver.dt = 0.001;
  CHECK(config_hash(a) != config_hash(c));
  CHECK(canonical_yaml(parse_config(canonical_yaml(a))) == canonical_yaml(a));
}

TEST_CASE("run writes byte-identical artifacts for the same config") {
  const fs::path root = scratch("run");
  const auto cfg = parse_config(kSmallRun);
  const auto r1 = run_into(cfg, (root / "a").string());
  const auto r2 = run_into(cfg, (root / "b").string());
  for (const char* f : {"trajectory.csv", "ledger.csv", "ledger.json", "config.yaml"}) {
    CAPTURE(f);
    CHECK(fs::exists(root / "a" / f));
    CHECK(slurp(root / "a" / f) == slurp(root / "b" / f));
  }
  CHECK(slurp(root / "a" / "trajectory.csv").rfind("time,energy,grad_norm_sq,dgrad_dt\n", 0) == 0);
  CHECK(slurp(root / "a" / "ledger.csv").rfind("s,t,residual,p_ratio,inequality_ok\n", 0) == 0);
  const auto rec = nlohmann::json::parse(slurp(root / "a" / "record.json"));
  CHECK(rec["config_hash"] == config_hash(cfg));
  CHECK(rec["tool_version"] == kToolVersion);
  CHECK(r1.E0 == doctest::Approx(2.0 * 3.14159265358979 * 3.14159265358979));
  CHECK(r1.worst_residual == r2.worst_residual);
  fs::remove_all(root);
}

TEST_CASE("cli: run, analyze and report") {
  const fs::path root = scratch("cli");
  const auto cfg = write_config(root, std::string(kSmallRun) + "analysis:\n  t: 0.2\n");
  std::string out, err;
  REQUIRE(cli({"run", "--config", cfg.string(), "--out", (root / "out").string()}, &out, &err) == 0);
  fs::path run_dir;
  for (const auto& e : fs::directory_iterator(root / "out")) run_dir = e.path();
  CHECK(run_dir.filename().string().rfind("run-", 0) == 0);

  REQUIRE(cli({"analyze", run_dir.string(), "--config", cfg.string()}, &out, &err) == 0);
  for (const char* f : {"analysis.json", "excursions.csv", "energy.svg", "dissipation.svg"}) {
    CAPTURE(f);
    CHECK(fs::exists(run_dir / f));
  }
  const auto svg = slurp(run_dir / "energy.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("href") == std::string::npos);
  const auto analysis = nlohmann::json::parse(slurp(run_dir / "analysis.json"));
  CHECK(analysis["tool_version"] == kToolVersion);
  CHECK(analysis.contains("config_hash"));

  REQUIRE(cli({"report", run_dir.string()}, &out, &err) == 0);
  CHECK(fs::exists(run_dir / "report.json"));
  fs::remove_all(root);
}

TEST_CASE("cli: usage and configuration errors exit 1") {
  const fs::path root = scratch("usage");
  std::string out, err;
  CHECK(cli({}, &out, &err) == 1);
  CHECK(cli({"frobnicate"}, &out, &err) == 1);
  CHECK(cli({"run"}, &out, &err) == 1);
  CHECK(cli({"run", "--config", (root / "missing.yaml").string()}, &out, &err) == 1);
  const auto bad = write_config(root, "initial_condition:\n  name: taylor-green\nsolver:\n  dim: 2\n  n: 16\n");
  CHECK(cli({"run", "--config", bad.string(), "--out", root.string()}, &out, &err) == 1);
  CHECK(err.find("solver") != std::string::npos);
  CHECK(cli({"report", (root / "nothing").string()}, &out, &err) == 1);
  CHECK(cli({"--version"}, &out, &err) == 0);
  CHECK(out.find(kToolVersion) != std::string::npos);
  fs::remove_all(root);
}

TEST_CASE("cli: numerical failure exits 2") {
  const fs::path root = scratch("numeric");
  const auto cfg = write_config(root, R"(initial_condition:
  name: random
  amplitude: 200
solver:
  dim: 2
  n: 16
  m: 8
  dt: 0.05
  T: 0.5
)");
  std::string out, err;
  CHECK(cli({"run", "--config", cfg.string(), "--out", root.string()}, &out, &err) == 2);
  CHECK(err.find("CFL") != std::string::npos);
  fs::remove_all(root);
}

TEST_CASE("cli: analyze with R below R0 names the threshold") {
  const fs::path root = scratch("r0");
  const auto cfg = write_config(root, std::string(kSmallRun) + "analysis:\n  t: 0.2\n  R: [0.001, 0.002, 0.004]\n");
  std::string out, err;
  REQUIRE(cli({"run", "--config", cfg.string(), "--out", (root / "out").string()}, &out, &err) == 0);
  fs::path run_dir;
  for (const auto& e : fs::directory_iterator(root / "out")) run_dir = e.path();
  CHECK(cli({"analyze", run_dir.string(), "--config", cfg.string()}, &out, &err) == 1);
  CHECK(err.find("R0") != std::string::npos);
  fs::remove_all(root);
}

TEST_CASE("sweep: complete and partial") {
  const fs::path root = scratch("sweep");
  const auto ok_cfg = write_config(root, std::string(kSmallRun) + "sweep:\n  m: [2, 4, 6]\n");
  std::string out, err;
  REQUIRE(cli({"sweep", "--config", ok_cfg.string(), "--out", (root / "ok").string(), "--jobs", "2"}, &out, &err) == 0);
  fs::path sweep_dir;
  for (const auto& e : fs::directory_iterator(root / "ok")) sweep_dir = e.path();
  CHECK(fs::exists(sweep_dir / "gap_report.json"));
  for (const char* m : {"m2", "m4", "m6"}) CHECK(fs::exists(sweep_dir / m / "trajectory.csv"));
  REQUIRE(cli({"analyze", sweep_dir.string()}, &out, &err) == 0);
  CHECK(fs::exists(sweep_dir / "ladder.svg"));
  CHECK(nlohmann::json::parse(slurp(sweep_dir / "analysis.json")).contains("config_hash"));

  // Large modes at this amplitude violate the CFL limit; small ones do not.
  auto cfg = parse_config(R"(initial_condition:
  name: random
  amplitude: 40
  slope: 0
solver:
  dim: 2
  n: 32
  m: 2
  dt: 0.003
  T: 0.1
sweep:
  m: [1, 2, 12]
)");
  const auto res = cmd_sweep(cfg, (root / "partial").string(), 1);
  CHECK(res.partial);
  REQUIRE(res.runs.size() == 3);
  CHECK(res.runs[0].status == "ok");
  CHECK(res.runs[2].status == "failed");
  CHECK(res.report["partial"] == true);
  fs::remove_all(root);
}

TEST_CASE("verify-lemma") {
  const fs::path root = scratch("lemma");
  std::string out, err;
  CHECK(cli({"verify-lemma", "spike", "--out", root.string()}, &out, &err) == 0);
  const auto j = nlohmann::json::parse(slurp(root / "lemma-spike" / "lemma_report.json"));
  CHECK(j["verdict"] == "pass");
  CHECK(j["tool_version"] == kToolVersion);
  CHECK(cli({"verify-lemma", "overshoot", "--out", root.string()}, &out, &err) == 0);
  CHECK(out.find("hypothesis-violation") != std::string::npos);
  CHECK(cli({"verify-lemma", "wobble", "--out", root.string()}, &out, &err) == 1);
  CHECK(err.find("spike") != std::string::npos);
  CHECK(cli({"report", (root / "lemma-spike").string()}, &out, &err) == 0);
  fs::remove_all(root);
}

#ifdef NSGAP_CLI_PATH
TEST_CASE("installed binary maps exit codes") {
  CHECK(std::system((std::string(NSGAP_CLI_PATH) + " --version > /dev/null").c_str()) == 0);
  const int rc = std::system((std::string(NSGAP_CLI_PATH) + " run 2> /dev/null").c_str());
  CHECK(WEXITSTATUS(rc) == 1);
}
#endif
