#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsgap/extrapolation.hpp"
#include "nsgap/trajectory.hpp"

namespace nsgap {

enum class WeightKind { kReciprocal, kExponential, kTable };

/// Positive Lipschitz weight g(rho) on [0, inf) that decays to zero.
class WeightFunction {
 public:
  /// g = 1 / (K + rho).
  static WeightFunction reciprocal(double K);
  /// g = exp(-rho / K).
  static WeightFunction exponential(double K);
  /// Monotone cubic Hermite (Fritsch-Carlson) through (rho_i, g_i) with
  /// rho_0 = 0. Past the last node g_last / (1 + c (rho - rho_last)), with c
  /// set so g' is continuous; the end slope is the steeper of the last secant
  /// and -g_last / (1 + rho_last).
  static WeightFunction table(std::vector<double> rho, std::vector<double> g);

  double value(double rho) const;
  double derivative(double rho) const;
  /// g'(rho) / g(rho), finite even where g underflows.
  double log_derivative(double rho) const;
  WeightKind kind() const noexcept { return kind_; }
  double K() const noexcept { return K_; }
  std::string name() const;

 private:
  WeightFunction() = default;
  WeightKind kind_ = WeightKind::kReciprocal;
  double K_ = 1.0;
  std::vector<double> rho_;
  std::vector<double> g_;
  double tail_ = 0.0;
  struct Spline;
  std::shared_ptr<const Spline> spline_;
};

/// -beta int_s^t E g^{beta-1}(D) g'(D) dD/dtau, trapezoid on the stored dD/dtau.
double g_gap_direct(const Trajectory& traj, double s, double t, const WeightFunction& w, double beta);
/// E(s) g^beta(D(s)) - E(t) g^beta(D(t)) - 2 int_s^t g^beta(D) D. At beta = 0
/// this is bit-for-bit energy_gap(traj, s, t) = -energy_residual(traj, s, t).
double g_gap_by_parts(const Trajectory& traj, double s, double t, const WeightFunction& w, double beta);
/// gamma int_s^t E (K + D)^{-gamma-1} dD/dtau.
double h_gap(const Trajectory& traj, double s, double t, double K, double gamma);

enum class CutoffShape { kLinear, kSmooth };
/// What the cutoff is applied to: D itself, or K1 + sqrt(D).
enum class CutoffArgument { kSquaredNorm, kShiftedNorm };

/// p_R: 1 on [0, R], 0 on [2R, inf), strictly between on (R, 2R), raised to alpha.
struct CutoffFunction {
  double R = 1.0;
  double alpha = 1.0;
  CutoffShape shape = CutoffShape::kLinear;
  CutoffArgument argument = CutoffArgument::kSquaredNorm;
  double shift = 0.0;

  /// p_R(rho) without the exponent.
  double base(double rho) const noexcept;
  /// p_R^alpha(rho).
  double operator()(double rho) const noexcept;
  double argument_of(double grad_norm_sq) const noexcept;
  /// Inverse of p_R^alpha on (R, 2R) by bisection to 1e-10 R.
  double invert(double level) const;
};

/// Raised when R <= R0 = A/(2t); carries the computed threshold.
class CutoffPrecondition : public std::invalid_argument {
 public:
  CutoffPrecondition(const std::string& what, double r0);
  double r0() const noexcept { return r0_; }

 private:
  double r0_;
};

/// R0 = A/(2t) with A = int_0^t D.
double cutoff_threshold(const Trajectory& traj, double t);

struct MeanValueResult {
  double ratio = 0.0;
  double R0 = 0.0;
  /// Cutoff never active on (0, t), or ratio >= 1: h lies in [0, R].
  bool below_R = false;
  /// Recovered h(alpha, R) in (R, 2R) when ratio < 1.
  std::optional<double> h;
  /// First sample-interpolated instant where the weight equals the ratio.
  std::optional<double> instant;
};

/// ratio = 2 int_0^t p_R^alpha(D) D / (E(0) - E(t)) and the recovered h.
/// Throws CutoffPrecondition when R <= R0 or the band {D < 2R} is empty and
/// DegenerateTrajectory when E(0) <= E(t).
MeanValueResult p_meanvalue(const Trajectory& traj, double t, const CutoffFunction& cutoff);

/// Iterated limit: inner m -> infinity (parameter 1/m), outer parameter -> 0.
struct GapLadder {
  std::string functional;
  std::string parameter_name;
  std::vector<double> parameters;
  std::vector<int> m_values;
  /// values[p][k] at parameters[p], m_values[k].
  std::vector<std::vector<double>> values;
  std::vector<Extrapolation> m_limits;
  Extrapolation limit;
  /// limit.error + largest inner error + quadrature floor.
  double error_bar = 0.0;
};

/// A single m skips the inner extrapolation; otherwise at least three m are needed.
/// Outer parameters are transformed by `outer_param` before extrapolation
/// (identity for beta/gamma, 1/R for cutoff levels).
GapLadder iterated_limit(const std::string& functional, const std::string& parameter_name,
                         const std::vector<double>& parameters, const std::vector<int>& m_values,
                         const std::function<double(std::size_t, std::size_t)>& value,
                         ExtrapolationModel inner, ExtrapolationModel outer, double floor,
                         const std::function<double(double)>& outer_param = {});

}  // namespace nsgap
