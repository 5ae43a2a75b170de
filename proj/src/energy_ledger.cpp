#include "nsgap/energy_ledger.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace nsgap {
namespace {

std::pair<std::size_t, std::size_t> window(const Trajectory& traj, double s, double t) {
  if (s > t) throw std::invalid_argument("energy ledger: requires s <= t");
  return {traj.index_of(s), traj.index_of(t)};
}

}  // namespace

double ledger_tolerance(const Trajectory& traj) {
  if (traj.size() == 0) return 0.0;
  const double dt = traj.config.dt > 0.0 ? std::max(traj.config.dt, traj.max_spacing())
                                         : traj.max_spacing();
  const double scale = dt / 1e-3;
  return 1e-6 * traj.energy.front() * scale * scale;
}

double energy_gap(const Trajectory& traj, double s, double t) {
  const auto [is, it] = window(traj, s, t);
  const double dissipated = trapezoid(traj.times, traj.grad_norm_sq, is, it);
  return (traj.energy[is] - traj.energy[it]) - 2.0 * dissipated;
}

double energy_residual(const Trajectory& traj, double s, double t) {
  return -energy_gap(traj, s, t);
}

double p_ratio(const Trajectory& traj, double s, double t) {
  const auto [is, it] = window(traj, s, t);
  const double drop = traj.energy[is] - traj.energy[it];
  if (!(drop > 0.0)) {
    throw DegenerateTrajectory("p_ratio: E(s) - E(t) must be positive (got " +
                               std::to_string(drop) + ")");
  }
  return 2.0 * trapezoid(traj.times, traj.grad_norm_sq, is, it) / drop;
}

std::vector<bool> strong_inequality_check(const Trajectory& traj, const std::vector<double>& s_list,
                                          double t, double tolerance) {
  const std::size_t it = traj.index_of(t);
  std::vector<bool> out;
  out.reserve(s_list.size());
  for (double s : s_list) {
    const std::size_t is = traj.index_of(s);
    if (is > it) throw std::invalid_argument("strong_inequality_check: requires s <= t");
    const double lhs = traj.energy[it] + trapezoid(traj.times, traj.grad_norm_sq, is, it);
    out.push_back(lhs <= traj.energy[is] + tolerance);
  }
  return out;
}

std::vector<bool> strong_inequality_check(const Trajectory& traj, const std::vector<double>& s_list,
                                          double t) {
  return strong_inequality_check(traj, s_list, t, ledger_tolerance(traj));
}

LedgerReport ledger_report(const Trajectory& traj, double s, double t) {
  LedgerReport r;
  r.s = s;
  r.t = t;
  r.residual = energy_residual(traj, s, t);
  try {
    r.p_ratio = p_ratio(traj, s, t);
  } catch (const DegenerateTrajectory&) {
    r.p_ratio = std::numeric_limits<double>::quiet_NaN();
  }
  r.inequality_ok = strong_inequality_check(traj, {s}, t).front();
  return r;
}

PairScan scan_all_pairs(const Trajectory& traj) {
  PairScan scan;
  const std::size_t n = traj.size();
  std::vector<double> cumulative(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    cumulative[i] = cumulative[i - 1] + 0.5 * (traj.times[i] - traj.times[i - 1]) *
                                            (traj.grad_norm_sq[i] + traj.grad_norm_sq[i - 1]);
  }
  const double tol = ledger_tolerance(traj);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = s + 1; t < n; ++t) {
      const double integral = cumulative[t] - cumulative[s];
      const double r = std::abs(traj.energy[t] - traj.energy[s] + 2.0 * integral);
      if (r > scan.worst_residual) {
        scan.worst_residual = r;
        scan.worst_s = traj.times[s];
        scan.worst_t = traj.times[t];
      }
      if (traj.energy[t] + integral > traj.energy[s] + tol) scan.all_inequalities_ok = false;
    }
  }
  return scan;
}

void write_ledger_csv(const std::vector<LedgerReport>& rows, std::ostream& out) {
  out << "s,t,residual,p_ratio,inequality_ok\n";
  char line[200];
  for (const auto& r : rows) {
    // + 0.0 folds a negative zero into 0.
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%s\n", r.s, r.t, r.residual + 0.0,
                  r.p_ratio, r.inequality_ok ? "true" : "false");
    out << line;
  }
}

}  // namespace nsgap
