#pragma once

#include <memory>
#include <stdexcept>

#include "nsgap/spectral_field.hpp"
#include "nsgap/trajectory.hpp"

namespace nsgap {

/// Raised when a step would exceed the advective CFL limit.
class CflViolation : public std::runtime_error {
 public:
  CflViolation(double cfl, double suggested_dt);
  double cfl() const noexcept { return cfl_; }
  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double cfl_;
  double suggested_dt_;
};

struct SolverState {
  SpectralField v;
  double time = 0.0;
};

/// Integrates v_t + P[J_m(v) . grad v] = Laplacian v on the periodic box.
/// Diffusion is integrated exactly through an integrating factor; the
/// mollified advection is explicit (Lawson RK2 or RK4).
///
/// A solver owns FFT workspace and is not thread-safe; run independent
/// solvers for concurrent runs.
class MnsSolver {
 public:
  explicit MnsSolver(const SolverConfig& config);
  ~MnsSolver();
  MnsSolver(const MnsSolver&) = delete;
  MnsSolver& operator=(const MnsSolver&) = delete;

  const SolverConfig& config() const noexcept { return config_; }

  /// -P[J_m(v) . grad v], dealiased per config; zero when nonlinearity is off.
  SpectralField advection(const SpectralField& v);
  /// Laplacian v - P[J_m(v) . grad v].
  SpectralField rhs(const SpectralField& v);
  /// d/dt ||grad v||^2 = 2 (grad v, grad v_t) with v_t = rhs(v).
  double exact_dDdt(const SpectralField& v);
  /// Advective CFL number of the last advection evaluation.
  double last_cfl() const noexcept { return last_cfl_; }

  SolverState step(const SolverState& state, double dt);
  /// Integrates from v0 (mollified first when configured) to T.
  Trajectory run(const SpectralField& v0);

 private:
  struct Workspace;
  SpectralField step_with(const SpectralField& v, const SpectralField& n0, double dt);
  void check_cfl(double dt) const;

  SolverConfig config_;
  std::unique_ptr<Workspace> ws_;
  double last_cfl_ = 0.0;
  double last_speed_sum_ = 0.0;
};

/// Free-function forms of the solver operations for one-off use.
SpectralField rhs(const SpectralField& v, int m, bool dealias = true);
double exact_dDdt(const SpectralField& v, int m, bool dealias = true);
Trajectory run(const SolverConfig& config, const SpectralField& v0);

}  // namespace nsgap
