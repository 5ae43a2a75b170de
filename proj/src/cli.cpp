#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nsgap/energy_ledger.hpp"
#include "nsgap/experiment.hpp"
#include "nsgap/solver.hpp"

namespace nsgap {
namespace {

struct Flags {
  std::string config;
  std::string out = "out";
  int jobs = 0;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string target;
};

void common(CLI::App* cmd, Flags& f, bool config_required) {
  auto* c = cmd->add_option("--config", f.config, "YAML configuration file");
  if (config_required) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_option("--jobs", f.jobs, "Concurrent sweep points, or OpenMP threads for run/analyze")
      ->check(CLI::NonNegativeNumber);
  f.seed_opt = cmd->add_option("--seed", f.seed, "Seed override for random initial data");
}

void apply_threads(int jobs) {
#ifdef _OPENMP
  if (jobs > 0) omp_set_num_threads(jobs);
#else
  (void)jobs;
#endif
}

ExperimentConfig load(const Flags& f, bool need_run) {
  ExperimentConfig c = load_config(f.config, need_run);
  if (f.seed_opt != nullptr && f.seed_opt->count() > 0) c.initial.seed = f.seed;
  return c;
}

void save(const std::filesystem::path& path, const nlohmann::json& j) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path) << j.dump(2) << "\n";
}

}  // namespace

int nsgap_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mollified Navier-Stokes energy-gap lab"};
  app.name("nsgap");
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", kToolVersion);

  Flags run_f, sweep_f, analyze_f, lemma_f, report_f;
  auto* run_cmd = app.add_subcommand("run", "Simulate one configuration and write its energy ledger");
  common(run_cmd, run_f, true);
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the sweep.m ladder and aggregate the gap report");
  common(sweep_cmd, sweep_f, true);
  auto* analyze_cmd = app.add_subcommand("analyze", "Gap, mean-value and excursion analysis of a run or sweep");
  analyze_cmd->add_option("dir", analyze_f.target, "Run or sweep directory")->required();
  common(analyze_cmd, analyze_f, false);
  auto* lemma_cmd = app.add_subcommand("verify-lemma", "Check the limit lemma on a sequence family");
  lemma_cmd->add_option("family", lemma_f.target, "Family name")->required();
  common(lemma_cmd, lemma_f, false);
  auto* report_cmd = app.add_subcommand("report", "Summarize the reports under a directory");
  report_cmd->add_option("dir", report_f.target, "Run, sweep or lemma directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) {
      apply_threads(run_f.jobs);
      const RunRecord r = cmd_run(load(run_f, true), run_f.out);
      out << "run " << r.dir << "\n"
          << "  config_hash " << r.config_hash << "\n"
          << "  E0 " << r.E0 << "  worst energy residual " << r.worst_residual << "\n";
      return kExitOk;
    }
    if (*sweep_cmd) {
      const SweepResult s = cmd_sweep(load(sweep_f, true), sweep_f.out, std::max(1, sweep_f.jobs));
      out << "sweep " << s.dir << "\n";
      for (const auto& r : s.runs) out << "  " << r.status << "  " << r.dir << (r.message.empty() ? "" : "  " + r.message) << "\n";
      return s.partial ? kExitPartial : kExitOk;
    }
    if (*analyze_cmd) {
      apply_threads(analyze_f.jobs);
      std::optional<AnalysisSpec> spec;
      if (!analyze_f.config.empty()) spec = load(analyze_f, false).analysis;
      const auto j = cmd_analyze(analyze_f.target, spec);
      out << "analysis written to " << analyze_f.target << "\n";
      if (j.contains("ledger")) out << "  p_ratio " << j["ledger"]["p_ratio"] << "\n";
      return kExitOk;
    }
    if (*lemma_cmd) {
      LemmaSpec spec;
      if (!lemma_f.config.empty()) spec = load(lemma_f, false).lemma;
      const auto j = cmd_verify_lemma(lemma_f.target, spec);
      const auto path = std::filesystem::path(lemma_f.out) / ("lemma-" + lemma_f.target) / "lemma_report.json";
      save(path, j);
      out << lemma_f.target << ": " << j["verdict"].get<std::string>() << "  (" << path.string() << ")\n";
      return kExitOk;
    }
    if (*report_cmd) {
      const auto j = cmd_report(report_f.target);
      out << j["kind"].get<std::string>() << " report written to " << report_f.target << "/report.json\n";
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const CflViolation& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DegenerateTrajectory& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace nsgap
