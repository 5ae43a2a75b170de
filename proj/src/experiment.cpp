#include "nsgap/experiment.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nsgap/energy_ledger.hpp"
#include "nsgap/excursion.hpp"
#include "nsgap/limit_lemma.hpp"
#include "nsgap/solver.hpp"
#include "nsgap/svg_plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace nsgap {
namespace {

// ---------------------------------------------------------------- config parsing

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    const int line = at.IsDefined() ? at.Mark().line + 1 : 0;
    if (line > 0) throw ConfigError(origin_ + ":" + std::to_string(line) + ": " + msg);
    throw ConfigError(origin_ + ": " + msg);
  }

  /// Rejects keys outside `allowed`, so typos do not pass silently.
  void only(const YAML::Node& map, const std::string& path, std::set<std::string> allowed) const {
    if (!map.IsMap()) fail(map, "field '" + path + "' must be a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, "unknown field '" + path + "." + key + "'");
    }
  }

  YAML::Node require(const YAML::Node& map, const std::string& path, const std::string& key) const {
    const YAML::Node n = map[key];
    if (!n) fail(map, "missing required field '" + path + "." + key + "'");
    return n;
  }

  template <class T>
  T as(const YAML::Node& n, const std::string& field, const char* what) const {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, "field '" + field + "' must be " + what);
    }
  }

  template <class T>
  void get(const YAML::Node& map, const std::string& path, const std::string& key, T& out,
           const char* what) const {
    const YAML::Node n = map[key];
    if (n) out = as<T>(n, path + "." + key, what);
  }

  template <class T>
  void get_list(const YAML::Node& map, const std::string& path, const std::string& key,
                std::vector<T>& out, const char* what) const {
    const YAML::Node n = map[key];
    if (!n) return;
    if (!n.IsSequence()) fail(n, "field '" + path + "." + key + "' must be a list");
    out.clear();
    for (const auto& item : n) out.push_back(as<T>(item, path + "." + key, what));
  }

 private:
  std::string origin_;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string list(const std::vector<T>& xs) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      s += fmt(xs[i]);
    } else if constexpr (std::is_same_v<T, std::string>) {
      s += xs[i];
    } else {
      s += std::to_string(xs[i]);
    }
  }
  return s + "]";
}

const char* to_string(MollifierProfile p) { return p == MollifierProfile::kSharp ? "sharp" : "smooth"; }
const char* to_string(CutoffShape s) { return s == CutoffShape::kLinear ? "linear" : "smooth"; }
const char* to_string(CutoffArgument a) {
  return a == CutoffArgument::kSquaredNorm ? "squared-norm" : "shifted-norm";
}

std::string now_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("missing artifact " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

/// NaN-safe number for JSON.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json ladder_json(const GapLadder& g) {
  json j;
  j["functional"] = g.functional;
  j["parameter"] = g.parameter_name;
  j["parameters"] = g.parameters;
  j["m"] = g.m_values;
  j["values"] = g.values;
  json inner = json::array();
  for (const auto& e : g.m_limits) inner.push_back({{"limit", num(e.limit)}, {"error", num(e.error)}});
  j["m_limits"] = inner;
  j["limit"] = num(g.limit.limit);
  j["error"] = num(g.limit.error);
  j["non_monotone"] = g.limit.non_monotone;
  j["error_bar"] = num(g.error_bar);
  return j;
}

WeightFunction weight_by_name(const std::string& name, double K) {
  if (name == "reciprocal") return WeightFunction::reciprocal(K);
  if (name == "exponential") return WeightFunction::exponential(K);
  throw ConfigError("unknown weight '" + name + "' (expected reciprocal or exponential)");
}

CutoffFunction cutoff_for(const AnalysisSpec& spec, double R, double alpha) {
  CutoffFunction c;
  c.R = R;
  c.alpha = alpha;
  c.shape = spec.cutoff_shape;
  c.argument = spec.cutoff_argument;
  c.shift = spec.shift;
  return c;
}

struct Window {
  double s;
  double t;
};

Window window_of(const Trajectory& traj, const AnalysisSpec& spec) {
  Window w{spec.s.value_or(traj.times.front()), spec.t.value_or(traj.times.back())};
  try {
    (void)traj.index_of(w.s);
    (void)traj.index_of(w.t);
  } catch (const std::out_of_range& e) {
    throw ConfigError(std::string("analysis window: ") + e.what());
  }
  if (!(w.s < w.t)) throw ConfigError("analysis window needs s < t");
  return w;
}

/// Explicit levels, or R0 times {2, 4, 8, 16}.
std::vector<double> levels_for(const Trajectory& traj, const AnalysisSpec& spec, double t) {
  if (!spec.R.empty()) return spec.R;
  const double r0 = cutoff_threshold(traj, t);
  return {2.0 * r0, 4.0 * r0, 8.0 * r0, 16.0 * r0};
}

}  // namespace

// ---------------------------------------------------------------- config

ExperimentConfig parse_config(const std::string& text, const std::string& origin, bool need_run) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(origin + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  const Reader r(origin);
  if (!root.IsMap()) throw ConfigError(origin + ": top level must be a mapping");
  r.only(root, "config", {"initial_condition", "solver", "analysis", "sweep", "lemma"});

  ExperimentConfig c;
  c.initial.name = "taylor-green";
  if (need_run || root["initial_condition"]) {
    const YAML::Node ic = r.require(root, "config", "initial_condition");
    r.only(ic, "initial_condition", {"name", "seed", "amplitude", "slope", "mode"});
    c.initial.name = r.as<std::string>(r.require(ic, "initial_condition", "name"), "initial_condition.name",
                                       "a string");
    if (c.initial.name != "taylor-green" && c.initial.name != "random" && c.initial.name != "single-mode") {
      r.fail(ic["name"], "unknown initial condition '" + c.initial.name +
                             "' (expected taylor-green, random or single-mode)");
    }
    r.get(ic, "initial_condition", "seed", c.initial.seed, "an unsigned integer");
    r.get(ic, "initial_condition", "amplitude", c.initial.amplitude, "a number");
    r.get(ic, "initial_condition", "slope", c.initial.slope, "a number");
    std::vector<int> mode;
    r.get_list(ic, "initial_condition", "mode", mode, "an integer");
    if (!mode.empty()) {
      if (mode.size() > 3) r.fail(ic["mode"], "field 'initial_condition.mode' has more than 3 entries");
      c.initial.mode = {0, 0, 0};
      std::copy(mode.begin(), mode.end(), c.initial.mode.begin());
    }
  }

  int n = c.solver.grid.n;
  if (need_run || root["solver"]) {
    const YAML::Node sv = r.require(root, "config", "solver");
    r.only(sv, "solver", {"dim", "n", "m", "dt", "T", "integrator", "mollifier", "dealias", "nonlinear",
                          "mollify_initial", "sample_every", "cfl_max"});
    const int dim = r.as<int>(r.require(sv, "solver", "dim"), "solver.dim", "an integer");
    n = r.as<int>(r.require(sv, "solver", "n"), "solver.n", "an integer");
    try {
      c.solver.grid = make_grid(dim, n);
    } catch (const std::invalid_argument& e) {
      r.fail(sv["n"], e.what());
    }
    c.solver.m = r.as<int>(r.require(sv, "solver", "m"), "solver.m", "an integer");
    c.solver.dt = r.as<double>(r.require(sv, "solver", "dt"), "solver.dt", "a number");
    c.solver.T = r.as<double>(r.require(sv, "solver", "T"), "solver.T", "a number");
    if (sv["integrator"]) {
      try {
        const auto name = r.as<std::string>(sv["integrator"], "solver.integrator", "a string");
        c.solver.integrator = integrator_from_string(name);
      } catch (const std::invalid_argument& e) {
        r.fail(sv["integrator"], e.what());
      }
    }
    if (sv["mollifier"]) {
      const auto p = r.as<std::string>(sv["mollifier"], "solver.mollifier", "a string");
      if (p == "sharp") {
        c.solver.mollifier = MollifierProfile::kSharp;
      } else if (p == "smooth") {
        c.solver.mollifier = MollifierProfile::kSmooth;
      } else {
        r.fail(sv["mollifier"], "unknown mollifier '" + p + "' (expected sharp or smooth)");
      }
    }
    r.get(sv, "solver", "dealias", c.solver.dealias, "a boolean");
    r.get(sv, "solver", "nonlinear", c.solver.nonlinear, "a boolean");
    r.get(sv, "solver", "mollify_initial", c.solver.mollify_initial, "a boolean");
    r.get(sv, "solver", "sample_every", c.solver.sample_every, "an integer");
    r.get(sv, "solver", "cfl_max", c.solver.cfl_max, "a number");
    try {
      validate(c.solver);
    } catch (const std::invalid_argument& e) {
      r.fail(sv, e.what());
    }
  }

  if (const YAML::Node sw = root["sweep"]) {
    r.only(sw, "sweep", {"m"});
    r.get_list(sw, "sweep", "m", c.sweep_m, "an integer");
    for (const int m : c.sweep_m) {
      if (m < 1 || m > n / 2) r.fail(sw["m"], "sweep.m entries must lie in [1, n/2]");
    }
  }

  if (const YAML::Node an = root["analysis"]) {
    r.only(an, "analysis", {"s", "t", "weights", "K", "beta", "gamma", "alpha", "R", "cutoff_shape",
                            "cutoff_argument", "shift", "inner", "outer"});
    auto& a = c.analysis;
    if (an["s"]) a.s = r.as<double>(an["s"], "analysis.s", "a number");
    if (an["t"]) a.t = r.as<double>(an["t"], "analysis.t", "a number");
    r.get_list(an, "analysis", "weights", a.weights, "a string");
    for (const auto& w : a.weights) {
      if (w != "reciprocal" && w != "exponential") {
        r.fail(an["weights"], "unknown weight '" + w + "' (expected reciprocal or exponential)");
      }
    }
    r.get(an, "analysis", "K", a.K, "a number");
    if (!(a.K > 0.0)) r.fail(an["K"], "analysis.K must be > 0");
    r.get_list(an, "analysis", "beta", a.beta, "a number");
    r.get_list(an, "analysis", "gamma", a.gamma, "a number");
    for (const char* key : {"beta", "gamma"}) {
      const auto& xs = std::string(key) == "beta" ? a.beta : a.gamma;
      if (xs.size() < 3) r.fail(an[key], std::string("analysis.") + key + " needs at least 3 values");
      std::set<double> seen;
      for (const double x : xs) {
        if (!(x > 0.0) || !seen.insert(x).second) {
          r.fail(an[key], std::string("analysis.") + key + " values must be distinct and > 0");
        }
      }
    }
    r.get_list(an, "analysis", "alpha", a.alpha, "a number");
    if (a.alpha.empty()) r.fail(an["alpha"], "analysis.alpha must not be empty");
    for (const double x : a.alpha) {
      if (!(x > 0.0)) r.fail(an["alpha"], "analysis.alpha entries must be > 0");
    }
    r.get_list(an, "analysis", "R", a.R, "a number");
    for (const double R : a.R) {
      if (!(R > 0.0)) r.fail(an["R"], "analysis.R values must be > 0");
    }
    if (an["cutoff_shape"]) {
      const auto s = r.as<std::string>(an["cutoff_shape"], "analysis.cutoff_shape", "a string");
      if (s == "linear") {
        a.cutoff_shape = CutoffShape::kLinear;
      } else if (s == "smooth") {
        a.cutoff_shape = CutoffShape::kSmooth;
      } else {
        r.fail(an["cutoff_shape"], "unknown cutoff shape '" + s + "' (expected linear or smooth)");
      }
    }
    if (an["cutoff_argument"]) {
      const auto s = r.as<std::string>(an["cutoff_argument"], "analysis.cutoff_argument", "a string");
      if (s == "squared-norm") {
        a.cutoff_argument = CutoffArgument::kSquaredNorm;
      } else if (s == "shifted-norm") {
        a.cutoff_argument = CutoffArgument::kShiftedNorm;
      } else {
        r.fail(an["cutoff_argument"],
               "unknown cutoff argument '" + s + "' (expected squared-norm or shifted-norm)");
      }
    }
    r.get(an, "analysis", "shift", a.shift, "a number");
    for (const char* key : {"inner", "outer"}) {
      if (!an[key]) continue;
      try {
        const auto model = extrapolation_model_from_string(
            r.as<std::string>(an[key], std::string("analysis.") + key, "a string"));
        (std::string(key) == "inner" ? a.inner : a.outer) = model;
      } catch (const std::invalid_argument& e) {
        r.fail(an[key], e.what());
      }
    }
  }

  if (const YAML::Node lm = root["lemma"]) {
    r.only(lm, "lemma", {"alpha", "m", "R", "weight"});
    r.get_list(lm, "lemma", "alpha", c.lemma.alpha, "a number");
    r.get_list(lm, "lemma", "m", c.lemma.m, "an integer");
    r.get_list(lm, "lemma", "R", c.lemma.R, "a number");
    r.get(lm, "lemma", "weight", c.lemma.weight, "a string");
    if (c.lemma.weight != "reciprocal" && c.lemma.weight != "exponential") {
      r.fail(lm["weight"], "unknown lemma weight '" + c.lemma.weight + "'");
    }
    if (c.lemma.alpha.size() < 3 || c.lemma.m.size() < 3 || c.lemma.R.size() < 3) {
      r.fail(lm, "lemma ladders need at least 3 values each");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, bool need_run) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path, need_run);
}

std::string canonical_yaml(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "initial_condition:\n"
    << "  name: " << c.initial.name << "\n"
    << "  seed: " << c.initial.seed << "\n"
    << "  amplitude: " << fmt(c.initial.amplitude) << "\n"
    << "  slope: " << fmt(c.initial.slope) << "\n"
    << "  mode: [" << c.initial.mode[0] << ", " << c.initial.mode[1] << ", " << c.initial.mode[2] << "]\n";
  const auto& s = c.solver;
  o << "solver:\n"
    << "  dim: " << s.grid.dim << "\n"
    << "  n: " << s.grid.n << "\n"
    << "  m: " << s.m << "\n"
    << "  dt: " << fmt(s.dt) << "\n"
    << "  T: " << fmt(s.T) << "\n"
    << "  integrator: " << to_string(s.integrator) << "\n"
    << "  mollifier: " << to_string(s.mollifier) << "\n"
    << "  dealias: " << (s.dealias ? "true" : "false") << "\n"
    << "  nonlinear: " << (s.nonlinear ? "true" : "false") << "\n"
    << "  mollify_initial: " << (s.mollify_initial ? "true" : "false") << "\n"
    << "  sample_every: " << s.sample_every << "\n"
    << "  cfl_max: " << fmt(s.cfl_max) << "\n";
  if (!c.sweep_m.empty()) o << "sweep:\n  m: " << list(c.sweep_m) << "\n";
  const auto& a = c.analysis;
  o << "analysis:\n";
  if (a.s) o << "  s: " << fmt(*a.s) << "\n";
  if (a.t) o << "  t: " << fmt(*a.t) << "\n";
  o << "  weights: " << list(a.weights) << "\n"
    << "  K: " << fmt(a.K) << "\n"
    << "  beta: " << list(a.beta) << "\n"
    << "  gamma: " << list(a.gamma) << "\n"
    << "  alpha: " << list(a.alpha) << "\n";
  if (!a.R.empty()) o << "  R: " << list(a.R) << "\n";
  o << "  cutoff_shape: " << to_string(a.cutoff_shape) << "\n"
    << "  cutoff_argument: " << to_string(a.cutoff_argument) << "\n"
    << "  shift: " << fmt(a.shift) << "\n"
    << "  inner: " << to_string(a.inner) << "\n"
    << "  outer: " << to_string(a.outer) << "\n";
  o << "lemma:\n"
    << "  alpha: " << list(c.lemma.alpha) << "\n"
    << "  m: " << list(c.lemma.m) << "\n"
    << "  R: " << list(c.lemma.R) << "\n"
    << "  weight: " << c.lemma.weight << "\n";
  return o.str();
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = canonical_yaml(config);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

SpectralField make_initial(const ExperimentConfig& config) {
  const Grid& g = config.solver.grid;
  const auto& ic = config.initial;
  if (ic.name == "taylor-green") return scaled(taylor_green(g), ic.amplitude);
  if (ic.name == "random") return scaled(random_divfree(g, ic.slope, ic.seed), ic.amplitude);
  if (ic.name == "single-mode") {
    try {
      return single_mode(g, ic.mode, ic.amplitude);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("initial_condition.mode: ") + e.what());
    }
  }
  throw ConfigError("unknown initial condition '" + ic.name + "'");
}

// ---------------------------------------------------------------- run

json to_json(const RunRecord& r) {
  return {{"tool_version", kToolVersion}, {"config_hash", r.config_hash}, {"dir", r.dir},
          {"trajectory_csv", r.trajectory_csv}, {"status", r.status},   {"message", r.message},
          {"E0", num(r.E0)},                   {"worst_residual", num(r.worst_residual)},
          {"started", r.started},              {"finished", r.finished}};
}

json ledger_json(const Trajectory& traj, const std::string& hash) {
  const double E0 = traj.energy.front();
  const LedgerReport whole = ledger_report(traj, traj.times.front(), traj.times.back());
  const PairScan scan = scan_all_pairs(traj);
  json j;
  j["tool_version"] = kToolVersion;
  j["config_hash"] = hash;
  j["E0"] = E0;
  j["samples"] = traj.size();
  j["tolerance"] = ledger_tolerance(traj);
  j["window"] = {{"s", whole.s},
                 {"t", whole.t},
                 {"residual", whole.residual},
                 {"p_ratio", num(whole.p_ratio)},
                 {"inequality_ok", whole.inequality_ok}};
  j["worst_pair"] = {{"s", scan.worst_s}, {"t", scan.worst_t}, {"residual", scan.worst_residual}};
  j["worst_residual_rel"] = scan.worst_residual / E0;
  j["all_inequalities_ok"] = scan.all_inequalities_ok;
  return j;
}

RunRecord run_into(const ExperimentConfig& config, const std::string& dir) {
  RunRecord rec;
  rec.config_hash = config_hash(config);
  rec.dir = dir;
  rec.started = now_utc();
  fs::create_directories(dir);
  write_text(fs::path(dir) / "config.yaml", canonical_yaml(config));

  Trajectory traj;
  try {
    traj = run(config.solver, make_initial(config));
  } catch (const CflViolation& e) {
    throw NumericalError(std::string(e.what()));
  }
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (!std::isfinite(traj.energy[i]) || !std::isfinite(traj.grad_norm_sq[i])) {
      throw NumericalError("non-finite energy at t = " + fmt(traj.times[i]));
    }
  }
  rec.trajectory_csv = (fs::path(dir) / "trajectory.csv").string();
  write_trajectory_csv(traj, rec.trajectory_csv);

  const json ledger = ledger_json(traj, rec.config_hash);
  write_json(fs::path(dir) / "ledger.json", ledger);
  std::vector<LedgerReport> rows;
  for (std::size_t i = 1; i < traj.size(); ++i) rows.push_back(ledger_report(traj, traj.times.front(), traj.times[i]));
  std::ofstream csv(fs::path(dir) / "ledger.csv", std::ios::binary);
  write_ledger_csv(rows, csv);

  rec.E0 = traj.energy.front();
  rec.worst_residual = ledger["worst_pair"]["residual"].get<double>();
  rec.finished = now_utc();
  write_json(fs::path(dir) / "record.json", to_json(rec));
  return rec;
}

RunRecord cmd_run(const ExperimentConfig& config, const std::string& out_dir) {
  return run_into(config, (fs::path(out_dir) / ("run-" + config_hash(config).substr(0, 12))).string());
}

// ---------------------------------------------------------------- analysis

json analyze_trajectory(const Trajectory& traj, const AnalysisSpec& spec, const std::string& hash) {
  const Window w = window_of(traj, spec);
  const double E0 = traj.energy.front();
  const double tol = ledger_tolerance(traj);
  json j;
  j["tool_version"] = kToolVersion;
  j["config_hash"] = hash;
  j["m"] = traj.config.m;
  j["s"] = w.s;
  j["t"] = w.t;
  j["E0"] = E0;
  j["quadrature_tolerance"] = tol;

  const LedgerReport lr = ledger_report(traj, w.s, w.t);
  j["ledger"] = {{"residual", lr.residual}, {"p_ratio", num(lr.p_ratio)}, {"inequality_ok", lr.inequality_ok}};

  json gaps = json::array();
  for (const auto& name : spec.weights) {
    const WeightFunction g = weight_by_name(name, spec.K);
    json rows = json::array();
    std::vector<LadderPoint> direct_ladder, parts_ladder;
    double worst = 0.0;
    for (const double beta : spec.beta) {
      const double d = g_gap_direct(traj, w.s, w.t, g, beta);
      const double b = g_gap_by_parts(traj, w.s, w.t, g, beta);
      worst = std::max(worst, std::abs(d - b));
      rows.push_back({{"beta", beta}, {"direct", d}, {"by_parts", b}, {"difference", d - b}});
      direct_ladder.push_back({beta, d});
      parts_ladder.push_back({beta, b});
    }
    const auto ed = extrapolate(direct_ladder, spec.outer);
    const auto eb = extrapolate(parts_ladder, spec.outer);
    gaps.push_back({{"weight", g.name()},
                    {"rows", rows},
                    {"worst_difference", worst},
                    {"identity_ok", worst <= 10.0 * tol},
                    {"direct_limit", {{"limit", ed.limit}, {"error", ed.error}}},
                    {"by_parts_limit", {{"limit", eb.limit}, {"error", eb.error}}}});
  }
  j["G"] = gaps;

  json hrows = json::array();
  std::vector<LadderPoint> hl;
  for (const double gamma : spec.gamma) {
    const double h = h_gap(traj, w.s, w.t, spec.K, gamma);
    hrows.push_back({{"gamma", gamma}, {"value", h}});
    hl.push_back({gamma, h});
  }
  const auto eh = extrapolate(hl, spec.outer);
  j["H"] = {{"K", spec.K}, {"rows", hrows}, {"limit", eh.limit}, {"error", eh.error}};

  const std::vector<double> levels = levels_for(traj, spec, w.t);
  const double r0 = cutoff_threshold(traj, w.t);
  json mv = json::array();
  for (const double R : levels) {
    if (!(R > r0)) {
      throw ConfigError("analysis.R = " + fmt(R) + " is not above R0 = A/(2t) = " + fmt(r0));
    }
    for (const double alpha : spec.alpha) {
      const auto res = p_meanvalue(traj, w.t, cutoff_for(spec, R, alpha));
      json row = {{"R", R}, {"alpha", alpha}, {"ratio", res.ratio}, {"below_R", res.below_R}};
      row["h"] = res.h ? json(*res.h) : json(nullptr);
      row["instant"] = res.instant ? json(*res.instant) : json(nullptr);
      mv.push_back(row);
    }
  }
  j["mean_value"] = {{"t", w.t}, {"alpha", spec.alpha}, {"R0", r0}, {"levels", mv}};

  json exc = json::array();
  const auto& D = traj.grad_norm_sq;
  for (const double R : levels) {
    json row = {{"R", R}};
    const double ds = D[traj.index_of(w.s)];
    const double dt = D[traj.index_of(w.t)];
    if (!(ds < R && dt < R)) {
      row["skipped"] = "D(s) = " + fmt(ds) + " or D(t) = " + fmt(dt) + " is not below R";
      exc.push_back(row);
      continue;
    }
    const ExcursionSet set = decompose(traj, R, w.s, w.t);
    const ESumReport es = e_sum(traj, set);
    const PairingReport pr = check_pairing(traj, set);
    const MeeCheck mee = mee_identity_check(traj, w.s, w.t, R);
    row["p11"] = set.p11;
    row["p12"] = set.p12;
    row["p21"] = set.p21;
    row["p22"] = set.p22;
    row["total_measure"] = set.total_measure;
    row["measure_bound"] = E0 / (2.0 * R);
    row["measure_ok"] = measure_bound_check(set, E0);
    row["E_sum"] = es.E_sum;
    row["B"] = es.has_pair ? json(es.B) : json(nullptr);
    row["pairing_ok"] = pr.ok();
    row["mee_residual"] = mee.residual;
    exc.push_back(row);
  }
  j["excursions"] = exc;
  return j;
}

json gap_ladder_report(const std::vector<Trajectory>& trajs, const AnalysisSpec& spec, const std::string& hash) {
  json j;
  j["tool_version"] = kToolVersion;
  j["config_hash"] = hash;
  if (trajs.empty()) throw ConfigError("gap ladder: no trajectories");
  std::vector<int> ms;
  for (const auto& tr : trajs) ms.push_back(tr.config.m);
  j["m"] = ms;
  if (ms.size() == 2) {
    j["ladder_skipped"] = "two m values cannot be extrapolated; need one or at least three";
    return j;
  }
  const Window w = window_of(trajs.front(), spec);
  /// The beta -> 0 limit of the by-parts form is the ledger residual itself,
  /// so the measured residual bounds the quadrature floor from below.
  double floor = 0.0;
  for (const auto& tr : trajs) {
    window_of(tr, spec);
    floor = std::max({floor, ledger_tolerance(tr), std::abs(energy_residual(tr, w.s, w.t))});
  }
  j["s"] = w.s;
  j["t"] = w.t;
  j["E0"] = trajs.front().energy.front();
  j["quadrature_floor"] = floor;

  json gl = json::array();
  for (const auto& name : spec.weights) {
    const WeightFunction g = weight_by_name(name, spec.K);
    const auto direct = iterated_limit(
        "G_direct", "beta", spec.beta, ms,
        [&](std::size_t p, std::size_t k) { return g_gap_direct(trajs[k], w.s, w.t, g, spec.beta[p]); },
        spec.inner, spec.outer, floor);
    const auto parts = iterated_limit(
        "G_by_parts", "beta", spec.beta, ms,
        [&](std::size_t p, std::size_t k) { return g_gap_by_parts(trajs[k], w.s, w.t, g, spec.beta[p]); },
        spec.inner, spec.outer, floor);
    gl.push_back({{"weight", g.name()}, {"direct", ladder_json(direct)}, {"by_parts", ladder_json(parts)}});
  }
  j["G"] = gl;
  j["H"] = ladder_json(iterated_limit(
      "H", "gamma", spec.gamma, ms,
      [&](std::size_t p, std::size_t k) { return h_gap(trajs[k], w.s, w.t, spec.K, spec.gamma[p]); },
      spec.inner, spec.outer, floor));

  json pr = json::array();
  for (const auto& tr : trajs) pr.push_back({{"m", tr.config.m}, {"p_ratio", p_ratio(tr, w.s, w.t)}});
  j["p_ratio"] = pr;

  json mv = json::array();
  for (const auto& tr : trajs) {
    json row = {{"m", tr.config.m}};
    json lv = json::array();
    for (const double R : levels_for(tr, spec, w.t)) {
      for (const double alpha : spec.alpha) {
        const auto res = p_meanvalue(tr, w.t, cutoff_for(spec, R, alpha));
        lv.push_back({{"R", R}, {"alpha", alpha}, {"ratio", res.ratio}, {"below_R", res.below_R}});
      }
    }
    row["levels"] = lv;
    mv.push_back(row);
  }
  j["mean_value"] = mv;

  json es = json::array();
  for (const auto& tr : trajs) {
    const double dmax = *std::max_element(tr.grad_norm_sq.begin(), tr.grad_norm_sq.end());
    const double R = 1.5 * dmax;
    const ExcursionSet set = decompose(tr, R, w.s, w.t);
    es.push_back({{"m", tr.config.m}, {"R", R}, {"E_sum", e_sum(tr, set).E_sum},
                  {"counts", {set.p11, set.p12, set.p21, set.p22}}});
  }
  j["E_sum_above_max"] = es;
  return j;
}

namespace {

Trajectory load_run(const fs::path& dir, ExperimentConfig* config) {
  const fs::path csv = dir / "trajectory.csv";
  const fs::path cfg = dir / "config.yaml";
  if (!fs::exists(csv)) throw ConfigError("missing artifact " + csv.string());
  if (!fs::exists(cfg)) throw ConfigError("missing artifact " + cfg.string());
  *config = load_config(cfg.string());
  Trajectory traj = read_trajectory_csv(csv.string());
  traj.config = config->solver;
  return traj;
}

void plot_run(const fs::path& dir, const Trajectory& traj, const json& analysis) {
  LinePlot e;
  e.title = "Energy, m = " + std::to_string(traj.config.m);
  e.x_label = "t";
  e.y_label = "||v||^2";
  e.series.push_back({"E(t)", traj.times, traj.energy});
  write_svg(e, (dir / "energy.svg").string());

  LinePlot d;
  d.title = "Dissipation, m = " + std::to_string(traj.config.m);
  d.x_label = "t";
  d.y_label = "||grad v||^2";
  d.series.push_back({"D(t)", traj.times, traj.grad_norm_sq});
  for (const auto& row : analysis["excursions"]) {
    if (row.contains("skipped")) continue;
    const double R = row["R"].get<double>();
    d.band = std::make_pair(R, 2.0 * R);
    const ExcursionSet set = decompose(traj, R, analysis["s"].get<double>(), analysis["t"].get<double>());
    for (const auto& x : set.excursions) d.spans.push_back({x.t_start, x.t_end, std::to_string(x.kind)});
    break;
  }
  write_svg(d, (dir / "dissipation.svg").string());
}

void write_excursions(const fs::path& dir, const Trajectory& traj, const json& analysis) {
  std::ofstream out(dir / "excursions.csv", std::ios::binary);
  for (const auto& row : analysis["excursions"]) {
    if (row.contains("skipped")) continue;
    write_excursions_csv(
        decompose(traj, row["R"].get<double>(), analysis["s"].get<double>(), analysis["t"].get<double>()), out);
    return;
  }
  write_excursions_csv(ExcursionSet{}, out);
}

json analyze_run_dir(const fs::path& dir, const std::optional<AnalysisSpec>& spec) {
  ExperimentConfig cfg;
  const Trajectory traj = load_run(dir, &cfg);
  const json a = analyze_trajectory(traj, spec.value_or(cfg.analysis), config_hash(cfg));
  write_json(dir / "analysis.json", a);
  write_excursions(dir, traj, a);
  plot_run(dir, traj, a);
  return a;
}

std::vector<fs::path> sweep_points(const fs::path& dir) {
  std::vector<std::pair<int, fs::path>> pts;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_directory() && name.size() > 1 && name[0] == 'm' &&
        fs::exists(entry.path() / "trajectory.csv")) {
      pts.emplace_back(std::stoi(name.substr(1)), entry.path());
    }
  }
  std::sort(pts.begin(), pts.end());
  std::vector<fs::path> out;
  for (auto& p : pts) out.push_back(p.second);
  return out;
}

void plot_ladder(const fs::path& dir, const json& report) {
  if (!report.contains("G") || report["G"].empty()) return;
  LinePlot p;
  p.title = "G ladder (" + report["G"][0]["weight"].get<std::string>() + ")";
  p.x_label = "beta";
  p.y_label = "G by parts";
  const auto& lad = report["G"][0]["by_parts"];
  const auto params = lad["parameters"].get<std::vector<double>>();
  const auto ms = lad["m"].get<std::vector<int>>();
  for (std::size_t k = 0; k < ms.size(); ++k) {
    PlotSeries s{"m = " + std::to_string(ms[k]), params, {}};
    for (std::size_t q = 0; q < params.size(); ++q) s.y.push_back(lad["values"][q][k].get<double>());
    p.series.push_back(s);
  }
  std::vector<double> lim;
  for (const auto& e : lad["m_limits"]) lim.push_back(e["limit"].is_null() ? NAN : e["limit"].get<double>());
  p.series.push_back({"m -> inf", params, lim, true});
  write_svg(p, (dir / "ladder.svg").string());
}

}  // namespace

// ---------------------------------------------------------------- sweep

SweepResult cmd_sweep(const ExperimentConfig& config, const std::string& out_dir, int jobs) {
  if (config.sweep_m.empty()) throw ConfigError("sweep.m is empty: nothing to sweep");
  SweepResult res;
  const std::string hash = config_hash(config);
  res.dir = (fs::path(out_dir) / ("sweep-" + hash.substr(0, 12))).string();
  fs::create_directories(res.dir);
  write_text(fs::path(res.dir) / "config.yaml", canonical_yaml(config));

  const std::size_t n = config.sweep_m.size();
  res.runs.resize(n);
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
#ifdef _OPENMP
    omp_set_num_threads(std::max(1, omp_get_num_procs() / jobs));
#endif
    for (std::size_t i = next++; i < n; i = next++) {
      ExperimentConfig point = config;
      point.sweep_m.clear();
      point.solver.m = config.sweep_m[i];
      const auto dir = (fs::path(res.dir) / ("m" + std::to_string(point.solver.m))).string();
      try {
        res.runs[i] = run_into(point, dir);
      } catch (const std::exception& e) {
        RunRecord& r = res.runs[i];
        r.config_hash = config_hash(point);
        r.dir = dir;
        r.status = "failed";
        r.message = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  json points = json::array();
  std::vector<Trajectory> trajs;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = res.runs[i];
    points.push_back({{"m", config.sweep_m[i]}, {"status", r.status}, {"message", r.message},
                      {"dir", r.dir}, {"config_hash", r.config_hash}});
    if (r.status != "ok") {
      res.partial = true;
      continue;
    }
    Trajectory tr = read_trajectory_csv(r.trajectory_csv);
    tr.config = config.solver;
    tr.config.m = config.sweep_m[i];
    trajs.push_back(std::move(tr));
  }
  json report;
  if (!trajs.empty()) {
    try {
      report = gap_ladder_report(trajs, config.analysis, hash);
    } catch (const std::exception& e) {
      report = {{"tool_version", kToolVersion}, {"config_hash", hash}, {"ladder_error", e.what()}};
    }
  } else {
    report = {{"tool_version", kToolVersion}, {"config_hash", hash}};
  }
  report["points"] = points;
  report["partial"] = res.partial;
  write_json(fs::path(res.dir) / "gap_report.json", report);
  res.report = report;
  return res;
}

// ---------------------------------------------------------------- analyze / lemma / report

json cmd_analyze(const std::string& dir_name, const std::optional<AnalysisSpec>& spec) {
  const fs::path dir(dir_name);
  if (!fs::is_directory(dir)) throw ConfigError("no such directory " + dir_name);
  if (fs::exists(dir / "trajectory.csv")) return analyze_run_dir(dir, spec);

  const auto pts = sweep_points(dir);
  if (pts.empty()) throw ConfigError("missing artifacts: " + dir_name + " holds no run or sweep points");
  ExperimentConfig cfg = load_config((dir / "config.yaml").string());
  const AnalysisSpec use = spec.value_or(cfg.analysis);
  std::vector<Trajectory> trajs;
  json per = json::array();
  for (const auto& p : pts) {
    per.push_back(analyze_run_dir(p, use));
    ExperimentConfig pc;
    trajs.push_back(load_run(p, &pc));
  }
  json report = gap_ladder_report(trajs, use, config_hash(cfg));
  report["points"] = per;
  write_json(dir / "analysis.json", report);
  plot_ladder(dir, report);

  LinePlot d;
  d.title = "Dissipation across m";
  d.x_label = "t";
  d.y_label = "||grad v||^2";
  for (const auto& tr : trajs) d.series.push_back({"m = " + std::to_string(tr.config.m), tr.times, tr.grad_norm_sq});
  write_svg(d, (dir / "dissipation.svg").string());
  return report;
}

json cmd_verify_lemma(const std::string& name, const LemmaSpec& spec) {
  SequenceFamily f;
  try {
    f = family_by_name(name);
  } catch (const std::invalid_argument&) {
    std::string names;
    for (const auto& n : family_names()) names += (names.empty() ? "" : ", ") + n;
    throw ConfigError("unknown family '" + name + "'; available: " + names);
  }
  DecayWeight w;
  w.kind = spec.weight == "exponential" ? DecayKind::kExponential : DecayKind::kReciprocal;

  json j;
  j["tool_version"] = kToolVersion;
  j["family"] = f.tag;
  j["weight"] = w.name();
  j["exact_integral"] = f.exact_integral;

  json rates = json::array();
  bool decreasing = true;
  for (const double alpha : spec.alpha) {
    double prev = INFINITY;
    for (const int m : spec.m) {
      const double e = lp_error(f, w, alpha, m);
      json row = {{"alpha", alpha}, {"m", m}, {"lp_error", e}};
      if (f.tag == "spike" && w.kind == DecayKind::kReciprocal) {
        row["closed_form"] = std::pow(1.0 + m, -alpha);
      }
      if (e > prev * (1.0 + 1e-9) + 1e-12) decreasing = false;
      prev = e;
      rates.push_back(row);
    }
  }
  j["rate_table"] = rates;
  j["rates_decreasing"] = decreasing;

  const auto pack = [](const LimitResult& r) {
    json x = ladder_json(r.ladder);
    x["target"] = r.target;
    x["within_bar"] = r.within_bar;
    return x;
  };
  const LimitResult la = la_limit(f, w, spec.alpha, spec.m);
  LimitResult lca;
  try {
    lca = lca_limit(f, spec.R, spec.m);
  } catch (const LemmaPrecondition& e) {
    throw ConfigError(e.what());
  }
  j["hypotheses"] = {{"max_l1", la.hypotheses.max_l1},
                     {"declared_l1_bound", f.L1_bound},
                     {"l1_bound_ok", la.hypotheses.l1_bound_ok},
                     {"pointwise_gap", la.hypotheses.pointwise_gap},
                     {"pointwise_ok", la.hypotheses.pointwise_ok}};
  j["la"] = pack(la);
  j["lca"] = pack(lca);
  j["lca"]["R_threshold"] = lc_threshold(f);
  if (!la.hypotheses.ok()) {
    j["verdict"] = "hypothesis-violation";
  } else {
    j["verdict"] = (la.within_bar && lca.within_bar && decreasing) ? "pass" : "fail";
  }
  return j;
}

json cmd_report(const std::string& dir_name) {
  const fs::path dir(dir_name);
  if (!fs::is_directory(dir)) throw ConfigError("no such directory " + dir_name);
  json j;
  j["tool_version"] = kToolVersion;
  j["dir"] = dir_name;
  if (fs::exists(dir / "record.json")) {
    j["kind"] = "run";
    j["record"] = read_json(dir / "record.json");
    j["config_hash"] = j["record"]["config_hash"];
    if (fs::exists(dir / "ledger.json")) j["ledger"] = read_json(dir / "ledger.json");
    if (fs::exists(dir / "analysis.json")) j["analysis"] = read_json(dir / "analysis.json");
  } else if (fs::exists(dir / "gap_report.json")) {
    j["kind"] = "sweep";
    j["gap_report"] = read_json(dir / "gap_report.json");
    j["config_hash"] = j["gap_report"]["config_hash"];
    if (fs::exists(dir / "analysis.json")) j["analysis"] = read_json(dir / "analysis.json");
    json pts = json::array();
    for (const auto& p : sweep_points(dir)) pts.push_back(read_json(p / "record.json"));
    j["points"] = pts;
  } else if (fs::exists(dir / "lemma_report.json")) {
    j["kind"] = "lemma";
    j["lemma"] = read_json(dir / "lemma_report.json");
  } else {
    throw ConfigError("missing artifacts: " + dir_name + " holds no record.json, gap_report.json or lemma_report.json");
  }
  write_json(dir / "report.json", j);
  return j;
}

}  // namespace nsgap
