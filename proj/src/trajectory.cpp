#include "nsgap/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nsgap {

std::string to_string(Integrator integrator) {
  return integrator == Integrator::kImexRk2 ? "imex-rk2" : "rk4";
}

Integrator integrator_from_string(const std::string& name) {
  if (name == "imex-rk2") return Integrator::kImexRk2;
  if (name == "rk4") return Integrator::kRk4;
  throw std::invalid_argument("unknown integrator '" + name + "' (expected imex-rk2 or rk4)");
}

void validate(const SolverConfig& c) {
  make_grid(c.grid.dim, c.grid.n);
  if (!(c.dt > 0.0)) throw std::invalid_argument("solver.dt must be > 0");
  if (!(c.T > 0.0)) throw std::invalid_argument("solver.T must be > 0");
  if (c.m < 1 || c.m > c.grid.n / 2) {
    throw std::invalid_argument("solver.m must lie in [1, n/2]");
  }
  if (c.sample_every < 1) throw std::invalid_argument("solver.sample_every must be >= 1");
  if (!(c.cfl_max > 0.0)) throw std::invalid_argument("solver.cfl_max must be > 0");
  if (c.snapshot_every < 0) throw std::invalid_argument("solver.snapshot_every must be >= 0");
  if (step_count(c) < 1) throw std::invalid_argument("solver.T must be at least one step");
}

long step_count(const SolverConfig& c) { return std::lround(c.T / c.dt); }

std::size_t Trajectory::index_of(double time) const {
  // Sample times are exact multiples of dt, so a relative match suffices.
  const double tol = 1e-9 * std::max(1.0, std::abs(time));
  std::size_t lo = 0;
  std::size_t hi = times.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (times[mid] < time - tol) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < times.size() && std::abs(times[lo] - time) <= tol) return lo;
  std::ostringstream msg;
  msg << "time " << time << " is not on the sample grid";
  throw std::out_of_range(msg.str());
}

double Trajectory::max_spacing() const noexcept {
  double h = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) h = std::max(h, times[i] - times[i - 1]);
  return h;
}

Trajectory make_series(std::vector<double> times, std::vector<double> energy,
                       std::vector<double> grad_norm_sq, std::vector<double> dgrad_dt) {
  const std::size_t n = times.size();
  if (energy.size() != n || grad_norm_sq.size() != n) {
    throw std::invalid_argument("make_series: series lengths differ");
  }
  if (dgrad_dt.empty()) dgrad_dt.assign(n, 0.0);
  if (dgrad_dt.size() != n) throw std::invalid_argument("make_series: series lengths differ");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(times[i] > times[i - 1])) {
      throw std::invalid_argument("make_series: times must be strictly increasing");
    }
  }
  Trajectory t;
  t.times = std::move(times);
  t.energy = std::move(energy);
  t.grad_norm_sq = std::move(grad_norm_sq);
  t.dgrad_dt = std::move(dgrad_dt);
  if (n > 1) {
    t.config.dt = t.max_spacing();
    t.config.T = t.times.back() - t.times.front();
  }
  return t;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  out << "time,energy,grad_norm_sq,dgrad_dt\n";
  char line[160];
  for (std::size_t i = 0; i < traj.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", traj.times[i], traj.energy[i],
                  traj.grad_norm_sq[i], traj.dgrad_dt[i]);
    out << line;
  }
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_trajectory_csv(traj, out);
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line != "time,energy,grad_norm_sq,dgrad_dt") {
    throw std::runtime_error(path + ": unexpected trajectory header '" + line + "'");
  }
  std::vector<double> t, e, d, dd;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double a = 0, b = 0, c = 0, x = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &a, &b, &c, &x) != 4) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed row");
    }
    t.push_back(a);
    e.push_back(b);
    d.push_back(c);
    dd.push_back(x);
  }
  return make_series(std::move(t), std::move(e), std::move(d), std::move(dd));
}

double trapezoid(const std::vector<double>& times, const std::vector<double>& values,
                 std::size_t first, std::size_t last) {
  double s = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    s += 0.5 * (times[i + 1] - times[i]) * (values[i] + values[i + 1]);
  }
  return s;
}

}  // namespace nsgap
