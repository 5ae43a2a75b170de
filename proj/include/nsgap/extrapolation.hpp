#pragma once

#include <span>
#include <string>
#include <vector>

namespace nsgap {

/// One rung of a parameter ladder approaching the limit at parameter 0.
struct LadderPoint {
  double parameter = 0.0;
  double value = 0.0;
};

enum class ExtrapolationModel {
  /// Least-squares line in the parameter, evaluated at 0.
  kLinear,
  /// Polynomial (Neville) extrapolation to 0 through every point.
  kRichardson,
  /// Aitken delta-squared on a geometric ladder; exact for L + C r^k.
  kGeometric,
};

std::string to_string(ExtrapolationModel model);
ExtrapolationModel extrapolation_model_from_string(const std::string& name);

struct Extrapolation {
  double limit = 0.0;
  /// Residual-based error bar: spread between the full estimate and the
  /// estimate with the coarsest rung dropped, plus the fit residual (linear).
  double error = 0.0;
  /// Values are not monotone along the ladder.
  bool non_monotone = false;
};

/// Requires at least three points with distinct positive parameters
/// (std::invalid_argument otherwise). Points may come in any order.
Extrapolation extrapolate(std::span<const LadderPoint> ladder, ExtrapolationModel model);

}  // namespace nsgap
