#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsgap/trajectory.hpp"

namespace nsgap {

/// Raised when an energy ratio has a zero or negative denominator.
class DegenerateTrajectory : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LedgerReport {
  double s = 0.0;
  double t = 0.0;
  /// E(t) + 2 int_s^t D - E(s).
  double residual = 0.0;
  /// 2 int_s^t D / (E(s) - E(t)); NaN when the window is degenerate.
  double p_ratio = 0.0;
  bool inequality_ok = false;
};

/// Identity tolerance: 1e-6 E(0) at dt = 1e-3, scaled by (dt/1e-3)^2.
/// dt is the configured step for solver runs and the largest sample spacing
/// for synthetic series.
double ledger_tolerance(const Trajectory& traj);

/// (E(s) - E(t)) - 2 int_s^t D, the quantity G must equal at finite m.
double energy_gap(const Trajectory& traj, double s, double t);
/// E(t) + 2 int_s^t D - E(s). Exactly -energy_gap. s, t must be sample times, s <= t.
double energy_residual(const Trajectory& traj, double s, double t);
/// Throws DegenerateTrajectory when E(s) <= E(t).
double p_ratio(const Trajectory& traj, double s, double t);
/// Strong-form inequality E(t) + int_s^t D <= E(s) + tolerance for each s.
std::vector<bool> strong_inequality_check(const Trajectory& traj, const std::vector<double>& s_list,
                                          double t, double tolerance);
std::vector<bool> strong_inequality_check(const Trajectory& traj, const std::vector<double>& s_list,
                                          double t);

LedgerReport ledger_report(const Trajectory& traj, double s, double t);

struct PairScan {
  double worst_residual = 0.0;
  double worst_s = 0.0;
  double worst_t = 0.0;
  bool all_inequalities_ok = true;
};

/// Scans every sample pair s < t in O(N^2) using a cumulative trapezoid.
PairScan scan_all_pairs(const Trajectory& traj);

void write_ledger_csv(const std::vector<LedgerReport>& rows, std::ostream& out);

}  // namespace nsgap
