#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsgap/gap_functionals.hpp"

namespace nsgap {

/// h^m(t) on (0, T) with its pointwise limit h(t).
struct SequenceFamily {
  std::string tag;
  double T = 1.0;
  /// Declared sup_m ||h^m||_1.
  double L1_bound = 0.0;
  std::function<double(double m, double t)> hm;
  std::function<double(double t)> h;
  /// Interior points where h^m is non-smooth.
  std::function<std::vector<double>(double m)> breakpoints;
  /// Times in (0, T) where |h^m| equals a level (m = 0 means h), or empty if unknown.
  std::function<std::vector<double>(double m, double level)> level_times;
  /// Closed-form int_0^T h, for cross-checking the quadrature.
  double exact_integral = 0.0;
};

/// spike: m on (0, 1/m), h = 0, bound 1.
SequenceFamily spike_family();
/// h^m = c on (0, 1).
SequenceFamily constant_family(double c);
/// h^m = 1 + t + 1/m on (0, 1).
SequenceFamily uniform_family();
/// h^m = h = t^{-1/2} on (0, 1).
SequenceFamily singular_family();
/// h^m = cos(pi t) + m e^{-mt} sin(mt) on (0, 1).
SequenceFamily oscillation_family();
/// h^m = m^2 on (0, 1/m) with declared bound 1: violates the L1 hypothesis.
SequenceFamily overshoot_family();

SequenceFamily family_by_name(const std::string& name);
std::vector<std::string> family_names();

enum class DecayKind { kReciprocal, kExponential, kPlateau };

/// p(s) > 0 continuous; reciprocal 1/(1+s) and exponential e^{-s} decay, the
/// plateau is the linear p_R.
struct DecayWeight {
  DecayKind kind = DecayKind::kReciprocal;
  double R = 1.0;

  double operator()(double s) const;
  /// Values of s where p is non-smooth.
  std::vector<double> kinks() const;
  std::string name() const;
};

/// int_0^T f over (0, T) split at `cuts`, tanh-sinh on each piece.
double integrate_pieces(const std::function<double(double)>& f, double a, double b, std::vector<double> cuts);

/// int_0^T |h^m p^alpha(|h^m|) - h p^alpha(|h|)|.
double lp_error(const SequenceFamily& family, const DecayWeight& weight, double alpha, double m);
/// int_0^T h^m p^alpha(|h^m|).
double lp_integral(const SequenceFamily& family, const DecayWeight& weight, double alpha, double m);
/// Independently quadratured int_0^T h.
double target_integral(const SequenceFamily& family);

/// Raised when R <= A/(2T).
class LemmaPrecondition : public std::invalid_argument {
 public:
  LemmaPrecondition(const std::string& what, double threshold);
  double threshold() const noexcept { return threshold_; }

 private:
  double threshold_;
};

double lc_threshold(const SequenceFamily& family);
/// int_0^T |h^m p_R(|h^m|) - h p_R(|h|)|; throws LemmaPrecondition for R <= A/(2T).
double lc_error(const SequenceFamily& family, double R, double m);
double lc_integral(const SequenceFamily& family, double R, double m);

struct HypothesisReport {
  /// max over the m ladder of ||h^m||_1 against the declared bound.
  double max_l1 = 0.0;
  bool l1_bound_ok = false;
  /// |h^m - h| at probe points, at the largest m.
  double pointwise_gap = 0.0;
  bool pointwise_ok = false;
  bool ok() const noexcept { return l1_bound_ok && pointwise_ok; }
};

HypothesisReport check_hypotheses(const SequenceFamily& family, const std::vector<double>& m_ladder);

struct LimitResult {
  std::string family;
  std::string weight;
  GapLadder ladder;
  double target = 0.0;
  HypothesisReport hypotheses;
  /// |limit - target| within the error bar; only meaningful when hypotheses hold.
  bool within_bar = false;
};

/// Inner m -> inf (geometric), outer alpha -> 0 (Richardson).
LimitResult la_limit(const SequenceFamily& family, const DecayWeight& weight,
                     const std::vector<double>& alpha_ladder, const std::vector<int>& m_ladder);
/// Inner m -> inf (geometric), outer R -> inf in 1/R (Richardson). Every R must exceed A/(2T).
LimitResult lca_limit(const SequenceFamily& family, const std::vector<double>& R_ladder,
                      const std::vector<int>& m_ladder);

}  // namespace nsgap
