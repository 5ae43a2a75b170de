#include "nsgap/limit_lemma.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

namespace nsgap {
namespace {

std::vector<double> none(double) { return {}; }
std::vector<double> no_levels(double, double) { return {}; }

std::vector<double> in_open(std::vector<double> ts, double T) {
  std::erase_if(ts, [T](double x) { return !(x > 0.0 && x < T); });
  return ts;
}

double powa(double p, double alpha) { return p <= 0.0 ? 0.0 : std::pow(p, alpha); }

/// Cut points for integrands built from h^m (and h) passed through `weight`.
std::vector<double> cuts_for(const SequenceFamily& f, const DecayWeight& weight, double m) {
  std::vector<double> cuts = f.breakpoints ? f.breakpoints(m) : std::vector<double>{};
  if (f.breakpoints) {
    const auto more = f.breakpoints(0.0);
    cuts.insert(cuts.end(), more.begin(), more.end());
  }
  if (f.level_times) {
    for (const double level : weight.kinks()) {
      for (const double mm : {m, 0.0}) {
        const auto ts = f.level_times(mm, level);
        cuts.insert(cuts.end(), ts.begin(), ts.end());
      }
    }
  }
  return cuts;
}

}  // namespace

SequenceFamily spike_family() {
  SequenceFamily f;
  f.tag = "spike";
  f.L1_bound = 1.0;
  f.hm = [](double m, double t) { return t < 1.0 / m ? m : 0.0; };
  f.h = [](double) { return 0.0; };
  f.breakpoints = [](double m) { return m > 0.0 ? std::vector<double>{1.0 / m} : std::vector<double>{}; };
  f.level_times = no_levels;
  f.exact_integral = 0.0;
  return f;
}

SequenceFamily constant_family(double c) {
  SequenceFamily f;
  f.tag = "constant";
  f.L1_bound = std::abs(c);
  f.hm = [c](double, double) { return c; };
  f.h = [c](double) { return c; };
  f.breakpoints = none;
  f.level_times = no_levels;
  f.exact_integral = c;
  return f;
}

SequenceFamily uniform_family() {
  SequenceFamily f;
  f.tag = "uniform-convergent";
  f.L1_bound = 2.5;
  f.hm = [](double m, double t) { return 1.0 + t + 1.0 / m; };
  f.h = [](double t) { return 1.0 + t; };
  f.breakpoints = none;
  f.level_times = [](double m, double level) {
    return in_open({level - 1.0 - (m > 0.0 ? 1.0 / m : 0.0)}, 1.0);
  };
  f.exact_integral = 1.5;
  return f;
}

SequenceFamily singular_family() {
  SequenceFamily f;
  f.tag = "fixed-singular";
  f.L1_bound = 2.0;
  f.hm = [](double, double t) { return 1.0 / std::sqrt(t); };
  f.h = [](double t) { return 1.0 / std::sqrt(t); };
  f.breakpoints = none;
  f.level_times = [](double, double level) { return in_open({1.0 / (level * level)}, 1.0); };
  f.exact_integral = 2.0;
  return f;
}

SequenceFamily oscillation_family() {
  SequenceFamily f;
  f.tag = "oscillation";
  f.L1_bound = 2.0 / std::numbers::pi + 1.0;
  f.hm = [](double m, double t) {
    return std::cos(std::numbers::pi * t) + m * std::exp(-m * t) * std::sin(m * t);
  };
  f.h = [](double t) { return std::cos(std::numbers::pi * t); };
  // Half-periods of the transient, until e^{-mt} is negligible, and the zero of cos.
  f.breakpoints = [](double m) {
    std::vector<double> ts{0.5};
    if (m > 0.0) {
      for (int k = 1; k <= 12; ++k) ts.push_back(k * std::numbers::pi / m);
    }
    return in_open(ts, 1.0);
  };
  f.level_times = no_levels;
  f.exact_integral = 0.0;
  return f;
}

SequenceFamily overshoot_family() {
  SequenceFamily f = spike_family();
  f.tag = "overshoot";
  f.hm = [](double m, double t) { return t < 1.0 / m ? m * m : 0.0; };
  return f;
}

std::vector<std::string> family_names() {
  return {"spike", "constant", "uniform-convergent", "fixed-singular", "oscillation", "overshoot"};
}

SequenceFamily family_by_name(const std::string& name) {
  if (name == "spike") return spike_family();
  if (name == "constant") return constant_family(0.5);
  if (name == "uniform-convergent") return uniform_family();
  if (name == "fixed-singular") return singular_family();
  if (name == "oscillation") return oscillation_family();
  if (name == "overshoot") return overshoot_family();
  throw std::invalid_argument("unknown sequence family '" + name + "'");
}

double DecayWeight::operator()(double s) const {
  switch (kind) {
    case DecayKind::kReciprocal: return 1.0 / (1.0 + s);
    case DecayKind::kExponential: return std::exp(-s);
    case DecayKind::kPlateau: return CutoffFunction{R}.base(s);
  }
  return 0.0;
}

std::vector<double> DecayWeight::kinks() const {
  if (kind == DecayKind::kPlateau) return {R, 2.0 * R};
  return {};
}

std::string DecayWeight::name() const {
  switch (kind) {
    case DecayKind::kReciprocal: return "1/(1+s)";
    case DecayKind::kExponential: return "exp(-s)";
    case DecayKind::kPlateau: {
      std::ostringstream s;
      s << "p_R(R=" << R << ")";
      return s.str();
    }
  }
  return "unknown";
}

double integrate_pieces(const std::function<double(double)>& f, double a, double b, std::vector<double> cuts) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  std::erase_if(cuts, [a, b](double x) { return !(x > a && x < b); });
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    total += integrator.integrate(f, cuts[k], cuts[k + 1], 1e-12);
  }
  return total;
}

double lp_error(const SequenceFamily& family, const DecayWeight& weight, double alpha, double m) {
  if (!(alpha > 0.0)) throw std::invalid_argument("lp_error: alpha must be > 0");
  const auto f = [&](double t) {
    const double a = family.hm(m, t);
    const double b = family.h(t);
    return std::abs(a * powa(weight(std::abs(a)), alpha) - b * powa(weight(std::abs(b)), alpha));
  };
  return integrate_pieces(f, 0.0, family.T, cuts_for(family, weight, m));
}

double lp_integral(const SequenceFamily& family, const DecayWeight& weight, double alpha, double m) {
  const auto f = [&](double t) {
    const double a = family.hm(m, t);
    return a * powa(weight(std::abs(a)), alpha);
  };
  return integrate_pieces(f, 0.0, family.T, cuts_for(family, weight, m));
}

double target_integral(const SequenceFamily& family) {
  const auto cuts = family.breakpoints ? family.breakpoints(0.0) : std::vector<double>{};
  return integrate_pieces(family.h, 0.0, family.T, cuts);
}

LemmaPrecondition::LemmaPrecondition(const std::string& what, double threshold)
    : std::invalid_argument(what), threshold_(threshold) {}

double lc_threshold(const SequenceFamily& family) { return family.L1_bound / (2.0 * family.T); }

namespace {

DecayWeight plateau_checked(const SequenceFamily& family, double R) {
  const double r0 = lc_threshold(family);
  if (!(R > r0)) {
    std::ostringstream msg;
    msg << "plateau level R = " << R << " must exceed A/(2T) = " << r0;
    throw LemmaPrecondition(msg.str(), r0);
  }
  return DecayWeight{DecayKind::kPlateau, R};
}

}  // namespace

double lc_error(const SequenceFamily& family, double R, double m) {
  return lp_error(family, plateau_checked(family, R), 1.0, m);
}

double lc_integral(const SequenceFamily& family, double R, double m) {
  return lp_integral(family, plateau_checked(family, R), 1.0, m);
}

HypothesisReport check_hypotheses(const SequenceFamily& family, const std::vector<double>& m_ladder) {
  HypothesisReport r;
  if (m_ladder.empty()) throw std::invalid_argument("check_hypotheses: empty m ladder");
  for (const double m : m_ladder) {
    const auto cuts = family.breakpoints ? family.breakpoints(m) : std::vector<double>{};
    r.max_l1 = std::max(r.max_l1, integrate_pieces([&](double t) { return std::abs(family.hm(m, t)); },
                                                   0.0, family.T, cuts));
  }
  r.l1_bound_ok = r.max_l1 <= family.L1_bound * (1.0 + 1e-9) + 1e-12;
  const double m_top = *std::max_element(m_ladder.begin(), m_ladder.end());
  for (int j = 0; j < 16; ++j) {
    const double t = family.T * (j + 0.5) / 16.0;
    r.pointwise_gap = std::max(r.pointwise_gap, std::abs(family.hm(m_top, t) - family.h(t)));
  }
  r.pointwise_ok = r.pointwise_gap < 1e-3;
  return r;
}

namespace {

std::vector<double> as_doubles(const std::vector<int>& ms) { return {ms.begin(), ms.end()}; }

void finish(LimitResult& r) {
  r.within_bar = std::abs(r.ladder.limit.limit - r.target) <= r.ladder.error_bar;
}

}  // namespace

LimitResult la_limit(const SequenceFamily& family, const DecayWeight& weight,
                     const std::vector<double>& alpha_ladder, const std::vector<int>& m_ladder) {
  for (const double a : alpha_ladder) {
    if (!(a > 0.0)) throw std::invalid_argument("la_limit: alpha ladder must be positive");
  }
  LimitResult r;
  r.family = family.tag;
  r.weight = weight.name();
  r.target = target_integral(family);
  r.hypotheses = check_hypotheses(family, as_doubles(m_ladder));
  r.ladder = iterated_limit(
      "la", "alpha", alpha_ladder, m_ladder,
      [&](std::size_t p, std::size_t k) { return lp_integral(family, weight, alpha_ladder[p], m_ladder[k]); },
      ExtrapolationModel::kGeometric, ExtrapolationModel::kRichardson, 1e-9);
  finish(r);
  return r;
}

LimitResult lca_limit(const SequenceFamily& family, const std::vector<double>& R_ladder,
                      const std::vector<int>& m_ladder) {
  for (const double R : R_ladder) plateau_checked(family, R);
  LimitResult r;
  r.family = family.tag;
  r.weight = "p_R";
  r.target = target_integral(family);
  r.hypotheses = check_hypotheses(family, as_doubles(m_ladder));
  r.ladder = iterated_limit(
      "lca", "R", R_ladder, m_ladder,
      [&](std::size_t p, std::size_t k) { return lc_integral(family, R_ladder[p], m_ladder[k]); },
      ExtrapolationModel::kGeometric, ExtrapolationModel::kRichardson, 1e-9,
      [](double R) { return 1.0 / R; });
  finish(r);
  return r;
}

}  // namespace nsgap
