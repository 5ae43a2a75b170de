#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nsgap/grid.hpp"
#include "nsgap/spectral_field.hpp"

namespace nsgap {

enum class Integrator { kImexRk2, kRk4 };

std::string to_string(Integrator integrator);
Integrator integrator_from_string(const std::string& name);

/// One member of the mollified sequence: grid, mollifier index and stepping.
struct SolverConfig {
  Grid grid{2, 64};
  int m = 16;
  double dt = 1e-3;
  double T = 1.0;
  bool dealias = true;
  int sample_every = 1;
  Integrator integrator = Integrator::kImexRk2;
  MollifierProfile mollifier = MollifierProfile::kSharp;
  /// Off turns the system into the Stokes problem.
  bool nonlinear = true;
  /// Start from mollify(v0, m) instead of v0.
  bool mollify_initial = true;
  /// Advective CFL limit, dt * sum_j max|u_j| / dx.
  double cfl_max = 1.0;
  /// Keep a field snapshot every this many samples; 0 keeps none.
  int snapshot_every = 0;
};

/// Throws std::invalid_argument naming the first violated invariant.
void validate(const SolverConfig& config);
/// Number of steps taken for the horizon, round(T / dt).
long step_count(const SolverConfig& config);

/// Sampled diagnostics of a completed run. `dgrad_dt` holds the exact
/// spectral time derivative of `grad_norm_sq`, not a finite difference.
struct Trajectory {
  SolverConfig config;
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> grad_norm_sq;
  std::vector<double> dgrad_dt;
  std::vector<std::pair<double, SpectralField>> snapshots;

  std::size_t size() const noexcept { return times.size(); }
  /// Sample index of `time`; throws std::out_of_range if it is not a sample time.
  std::size_t index_of(double time) const;
  /// Largest spacing between consecutive samples.
  double max_spacing() const noexcept;
};

/// Wraps externally produced series (synthetic tests, reloaded CSVs).
/// Throws std::invalid_argument on length mismatch or non-increasing times.
Trajectory make_series(std::vector<double> times, std::vector<double> energy,
                       std::vector<double> grad_norm_sq, std::vector<double> dgrad_dt = {});

/// CSV with header `time,energy,grad_norm_sq,dgrad_dt`, 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_csv(const std::string& path);

/// Composite trapezoid of `values` over samples [first, last].
double trapezoid(const std::vector<double>& times, const std::vector<double>& values,
                 std::size_t first, std::size_t last);

}  // namespace nsgap
