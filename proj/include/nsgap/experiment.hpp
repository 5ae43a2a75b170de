#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsgap/extrapolation.hpp"
#include "nsgap/gap_functionals.hpp"
#include "nsgap/trajectory.hpp"

namespace nsgap {

inline constexpr const char* kToolVersion = "nsgap 0.1.0";

/// Bad configuration or usage (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure during a run or analysis (exit code 2).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2, kExitPartial = 3 };

struct InitialCondition {
  /// taylor-green | random | single-mode
  std::string name;
  std::uint64_t seed = 1;
  double amplitude = 1.0;
  /// Energy spectrum slope for random data.
  double slope = -3.0;
  /// Wavevector for single-mode data.
  std::array<int, 3> mode{1, 0, 0};
};

struct AnalysisSpec {
  std::optional<double> s;
  std::optional<double> t;
  /// reciprocal | exponential
  std::vector<std::string> weights{"reciprocal", "exponential"};
  double K = 1.0;
  std::vector<double> beta{0.2, 0.1, 0.05, 0.025};
  std::vector<double> gamma{0.2, 0.1, 0.05, 0.025};
  /// Cutoff exponents for the mean-value construction.
  std::vector<double> alpha{0.5, 1.0, 2.0, 8.0};
  /// Cutoff and excursion levels; empty picks multiples of R0.
  std::vector<double> R;
  CutoffShape cutoff_shape = CutoffShape::kLinear;
  CutoffArgument cutoff_argument = CutoffArgument::kSquaredNorm;
  double shift = 0.0;
  ExtrapolationModel inner = ExtrapolationModel::kRichardson;
  ExtrapolationModel outer = ExtrapolationModel::kRichardson;
};

struct LemmaSpec {
  std::vector<double> alpha{0.2, 0.1, 0.05, 0.025};
  std::vector<int> m{100, 1000, 10000, 100000};
  std::vector<double> R{1.0, 2.0, 4.0, 8.0};
  /// reciprocal | exponential
  std::string weight = "reciprocal";
};

struct ExperimentConfig {
  InitialCondition initial;
  SolverConfig solver;
  AnalysisSpec analysis;
  LemmaSpec lemma;
  /// m ladder for sweeps.
  std::vector<int> sweep_m;
};

/// Parses YAML text; errors name the field and the line (`origin:line: ...`).
/// With `need_run` false the initial_condition and solver sections may be
/// omitted (analysis or lemma settings only).
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "config",
                              bool need_run = true);
ExperimentConfig load_config(const std::string& path, bool need_run = true);
/// Deterministic YAML rendering of every field that affects results.
std::string canonical_yaml(const ExperimentConfig& config);
/// SHA-256 hex digest of canonical_yaml.
std::string config_hash(const ExperimentConfig& config);

/// Initial field built from the config, before mollification.
SpectralField make_initial(const ExperimentConfig& config);

struct RunRecord {
  std::string config_hash;
  std::string dir;
  std::string trajectory_csv;
  std::string status = "ok";
  std::string message;
  double E0 = 0.0;
  double worst_residual = 0.0;
  std::string started;
  std::string finished;
};

nlohmann::json to_json(const RunRecord& record);
nlohmann::json ledger_json(const Trajectory& traj, const std::string& hash);

/// Simulates and writes trajectory.csv, ledger.json, ledger.csv, record.json
/// and config.yaml into `dir`. Throws NumericalError on a failed run.
RunRecord run_into(const ExperimentConfig& config, const std::string& dir);
/// run_into(out_dir/run-<hash12>).
RunRecord cmd_run(const ExperimentConfig& config, const std::string& out_dir);

struct SweepResult {
  std::string dir;
  std::vector<RunRecord> runs;
  nlohmann::json report;
  bool partial = false;
};

/// One run per sweep_m entry under out_dir/sweep-<hash12>/m<m>, up to `jobs`
/// concurrently; writes gap_report.json. Failed points are reported, not thrown.
SweepResult cmd_sweep(const ExperimentConfig& config, const std::string& out_dir, int jobs);

/// Gap, mean-value, excursion and ledger analysis of one trajectory.
nlohmann::json analyze_trajectory(const Trajectory& traj, const AnalysisSpec& spec, const std::string& hash);
/// Iterated limits over an m ladder of trajectories sharing the same spec.
nlohmann::json gap_ladder_report(const std::vector<Trajectory>& trajs, const AnalysisSpec& spec,
                                 const std::string& hash);

/// Analyzes a run or sweep directory in place: analysis.json, excursions.csv and SVG plots.
nlohmann::json cmd_analyze(const std::string& dir, const std::optional<AnalysisSpec>& spec);

nlohmann::json cmd_verify_lemma(const std::string& family, const LemmaSpec& spec);

/// Collects the JSON reports under a run or sweep directory.
nlohmann::json cmd_report(const std::string& dir);

/// Full command-line entry point; returns the process exit code.
int nsgap_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nsgap
