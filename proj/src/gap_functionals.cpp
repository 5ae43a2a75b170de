#include "nsgap/gap_functionals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/interpolators/cubic_hermite.hpp>

#include "nsgap/energy_ledger.hpp"

namespace nsgap {
namespace {

std::pair<std::size_t, std::size_t> window(const Trajectory& traj, double s, double t) {
  if (s > t) throw std::invalid_argument("gap functional: requires s <= t");
  return {traj.index_of(s), traj.index_of(t)};
}

std::vector<double> map_samples(const Trajectory& traj, std::size_t first, std::size_t last,
                                const std::function<double(std::size_t)>& f) {
  // Only [first, last] is read by the trapezoid; the rest stays zero.
  std::vector<double> out(traj.size(), 0.0);
  for (std::size_t i = first; i <= last; ++i) out[i] = f(i);
  return out;
}

}  // namespace

struct WeightFunction::Spline {
  boost::math::interpolators::cubic_hermite<std::vector<double>> h;
};

WeightFunction WeightFunction::reciprocal(double K) {
  if (!(K > 0.0)) throw std::invalid_argument("reciprocal weight needs K > 0");
  WeightFunction w;
  w.kind_ = WeightKind::kReciprocal;
  w.K_ = K;
  return w;
}

WeightFunction WeightFunction::exponential(double K) {
  if (!(K > 0.0)) throw std::invalid_argument("exponential weight needs K > 0");
  WeightFunction w;
  w.kind_ = WeightKind::kExponential;
  w.K_ = K;
  return w;
}

WeightFunction WeightFunction::table(std::vector<double> rho, std::vector<double> g) {
  if (rho.size() < 2 || rho.size() != g.size()) {
    throw std::invalid_argument("table weight needs matching rho/g arrays of length >= 2");
  }
  if (rho.front() != 0.0) throw std::invalid_argument("table weight must start at rho = 0");
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(g[i] > 0.0)) throw std::invalid_argument("table weight values must be positive");
    if (i > 0 && !(rho[i] > rho[i - 1])) {
      throw std::invalid_argument("table weight nodes must be strictly increasing");
    }
  }
  const std::size_t n = rho.size();
  std::vector<double> secant(n - 1), slope(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) secant[i] = (g[i + 1] - g[i]) / (rho[i + 1] - rho[i]);
  slope[0] = secant[0];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (secant[i - 1] * secant[i] > 0.0) {
      const double w1 = 2.0 * (rho[i + 1] - rho[i]) + (rho[i] - rho[i - 1]);
      const double w2 = (rho[i + 1] - rho[i]) + 2.0 * (rho[i] - rho[i - 1]);
      slope[i] = (w1 + w2) / (w1 / secant[i - 1] + w2 / secant[i]);
    }
  }
  slope[n - 1] = std::min(secant[n - 2], -g[n - 1] / (1.0 + rho[n - 1]));

  WeightFunction w;
  w.kind_ = WeightKind::kTable;
  w.rho_ = rho;
  w.g_ = g;
  w.tail_ = -slope[n - 1] / g[n - 1];
  w.spline_ = std::make_shared<const Spline>(
      Spline{boost::math::interpolators::cubic_hermite<std::vector<double>>(std::move(rho), std::move(g),
                                                                            std::move(slope))});
  return w;
}

double WeightFunction::value(double rho) const {
  switch (kind_) {
    case WeightKind::kReciprocal:
      return 1.0 / (K_ + rho);
    case WeightKind::kExponential:
      return std::exp(-rho / K_);
    case WeightKind::kTable:
      if (rho >= rho_.back()) return g_.back() / (1.0 + tail_ * (rho - rho_.back()));
      return spline_->h(rho);
  }
  return 0.0;
}

double WeightFunction::derivative(double rho) const {
  switch (kind_) {
    case WeightKind::kReciprocal:
      return -1.0 / ((K_ + rho) * (K_ + rho));
    case WeightKind::kExponential:
      return -std::exp(-rho / K_) / K_;
    case WeightKind::kTable:
      if (rho >= rho_.back()) {
        const double q = 1.0 + tail_ * (rho - rho_.back());
        return -g_.back() * tail_ / (q * q);
      }
      return spline_->h.prime(rho);
  }
  return 0.0;
}

std::string WeightFunction::name() const {
  std::ostringstream s;
  switch (kind_) {
    case WeightKind::kReciprocal:
      s << "reciprocal(K=" << K_ << ")";
      break;
    case WeightKind::kExponential:
      s << "exponential(K=" << K_ << ")";
      break;
    case WeightKind::kTable:
      s << "table(" << rho_.size() << " nodes)";
      break;
  }
  return s.str();
}

double WeightFunction::log_derivative(double rho) const {
  switch (kind_) {
    case WeightKind::kReciprocal:
      return -1.0 / (K_ + rho);
    case WeightKind::kExponential:
      return -1.0 / K_;
    default:
      return derivative(rho) / value(rho);
  }
}

double g_gap_direct(const Trajectory& traj, double s, double t, const WeightFunction& w, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("g_gap_direct: beta must be > 0");
  const auto [is, it] = window(traj, s, t);
  const auto integrand = map_samples(traj, is, it, [&](std::size_t i) {
    const double d = traj.grad_norm_sq[i];
    // g^{beta-1} g' written as g^beta (g'/g) so an underflowing g gives 0, not 0 * inf.
    return traj.energy[i] * std::pow(w.value(d), beta) * w.log_derivative(d) * traj.dgrad_dt[i];
  });
  return -beta * trapezoid(traj.times, integrand, is, it);
}

double g_gap_by_parts(const Trajectory& traj, double s, double t, const WeightFunction& w, double beta) {
  if (beta < 0.0) throw std::invalid_argument("g_gap_by_parts: beta must be >= 0");
  const auto [is, it] = window(traj, s, t);
  const auto gb = [&](std::size_t i) { return std::pow(w.value(traj.grad_norm_sq[i]), beta); };
  const auto integrand =
      map_samples(traj, is, it, [&](std::size_t i) { return gb(i) * traj.grad_norm_sq[i]; });
  return (traj.energy[is] * gb(is) - traj.energy[it] * gb(it)) -
         2.0 * trapezoid(traj.times, integrand, is, it);
}

double h_gap(const Trajectory& traj, double s, double t, double K, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("h_gap: gamma must be > 0");
  if (!(K > 0.0)) throw std::invalid_argument("h_gap: K must be > 0");
  const auto [is, it] = window(traj, s, t);
  const auto integrand = map_samples(traj, is, it, [&](std::size_t i) {
    return traj.energy[i] * std::pow(K + traj.grad_norm_sq[i], -gamma - 1.0) * traj.dgrad_dt[i];
  });
  return gamma * trapezoid(traj.times, integrand, is, it);
}

double CutoffFunction::base(double rho) const noexcept {
  if (rho <= R) return 1.0;
  if (rho >= 2.0 * R) return 0.0;
  const double x = (rho - R) / R;
  if (shape == CutoffShape::kLinear) return 1.0 - x;
  return 1.0 - x * x * (3.0 - 2.0 * x);
}

double CutoffFunction::operator()(double rho) const noexcept {
  const double b = base(rho);
  if (b == 1.0 || b == 0.0) return b;
  return std::pow(b, alpha);
}

double CutoffFunction::argument_of(double grad_norm_sq) const noexcept {
  if (argument == CutoffArgument::kSquaredNorm) return grad_norm_sq;
  return shift + std::sqrt(std::max(0.0, grad_norm_sq));
}

double CutoffFunction::invert(double level) const {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("cutoff inversion needs a level in (0, 1)");
  }
  double lo = R;
  double hi = 2.0 * R;
  while (hi - lo > 1e-10 * R) {
    const double mid = 0.5 * (lo + hi);
    if ((*this)(mid) > level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CutoffPrecondition::CutoffPrecondition(const std::string& what, double r0)
    : std::invalid_argument(what), r0_(r0) {}

double cutoff_threshold(const Trajectory& traj, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("cutoff threshold needs t > 0");
  const std::size_t it = traj.index_of(t);
  const std::size_t i0 = traj.index_of(0.0);
  return trapezoid(traj.times, traj.grad_norm_sq, i0, it) / (2.0 * t);
}

MeanValueResult p_meanvalue(const Trajectory& traj, double t, const CutoffFunction& cutoff) {
  MeanValueResult out;
  out.R0 = cutoff_threshold(traj, t);
  if (!(cutoff.R > out.R0)) {
    std::ostringstream msg;
    msg << "cutoff level R = " << cutoff.R << " must exceed R0 = A/(2t) = " << out.R0;
    throw CutoffPrecondition(msg.str(), out.R0);
  }
  const std::size_t i0 = traj.index_of(0.0);
  const std::size_t it = traj.index_of(t);
  bool band = false;
  double max_arg = 0.0;
  for (std::size_t i = i0; i <= it; ++i) {
    const double a = cutoff.argument_of(traj.grad_norm_sq[i]);
    band = band || a < 2.0 * cutoff.R;
    max_arg = std::max(max_arg, a);
  }
  if (!band) throw CutoffPrecondition("the set {D < 2R} is empty on (0, t)", out.R0);
  const double drop = traj.energy[i0] - traj.energy[it];
  if (!(drop > 0.0)) throw DegenerateTrajectory("p_meanvalue: E(0) - E(t) must be positive");

  std::vector<double> weight(traj.size(), 0.0);
  std::vector<double> weighted(traj.size(), 0.0);
  for (std::size_t i = i0; i <= it; ++i) {
    weight[i] = cutoff(cutoff.argument_of(traj.grad_norm_sq[i]));
    weighted[i] = weight[i] * traj.grad_norm_sq[i];
  }
  out.ratio = 2.0 * trapezoid(traj.times, weighted, i0, it) / drop;
  if (max_arg <= cutoff.R || out.ratio >= 1.0) {
    out.below_R = true;
    return out;
  }
  out.h = cutoff.invert(out.ratio);
  for (std::size_t i = i0; i < it; ++i) {
    const double a = weight[i] - out.ratio;
    const double b = weight[i + 1] - out.ratio;
    if (a == 0.0) {
      out.instant = traj.times[i];
      break;
    }
    if ((a < 0.0) != (b < 0.0)) {
      out.instant = traj.times[i] + (traj.times[i + 1] - traj.times[i]) * a / (a - b);
      break;
    }
  }
  return out;
}

GapLadder iterated_limit(const std::string& functional, const std::string& parameter_name,
                         const std::vector<double>& parameters, const std::vector<int>& m_values,
                         const std::function<double(std::size_t, std::size_t)>& value,
                         ExtrapolationModel inner, ExtrapolationModel outer, double floor,
                         const std::function<double(double)>& outer_param) {
  if (parameters.size() < 3) throw std::invalid_argument("iterated_limit: need >= 3 parameters");
  if (m_values.empty() || m_values.size() == 2) {
    throw std::invalid_argument("iterated_limit: need one m or at least three");
  }
  GapLadder out;
  out.functional = functional;
  out.parameter_name = parameter_name;
  out.parameters = parameters;
  out.m_values = m_values;
  out.values.assign(parameters.size(), std::vector<double>(m_values.size(), 0.0));

  const auto np = static_cast<std::ptrdiff_t>(parameters.size() * m_values.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t q = 0; q < np; ++q) {
    const auto p = static_cast<std::size_t>(q) / m_values.size();
    const auto k = static_cast<std::size_t>(q) % m_values.size();
    out.values[p][k] = value(p, k);
  }

  double inner_error = 0.0;
  std::vector<LadderPoint> outer_ladder;
  for (std::size_t p = 0; p < parameters.size(); ++p) {
    Extrapolation e;
    if (m_values.size() == 1) {
      e.limit = out.values[p][0];
    } else {
      std::vector<LadderPoint> ml;
      for (std::size_t k = 0; k < m_values.size(); ++k) {
        ml.push_back({1.0 / static_cast<double>(m_values[k]), out.values[p][k]});
      }
      e = extrapolate(ml, inner);
    }
    inner_error = std::max(inner_error, e.error);
    out.m_limits.push_back(e);
    const double x = outer_param ? outer_param(parameters[p]) : parameters[p];
    outer_ladder.push_back({x, e.limit});
  }
  out.limit = extrapolate(outer_ladder, outer);
  out.error_bar = out.limit.error + inner_error + floor;
  return out;
}

}  // namespace nsgap
