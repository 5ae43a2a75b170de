#include "nsgap/extrapolation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nsgap {
namespace {

// Points sorted by decreasing parameter, i.e. approaching the limit.
std::vector<LadderPoint> sorted_ladder(std::span<const LadderPoint> ladder) {
  std::vector<LadderPoint> pts(ladder.begin(), ladder.end());
  std::sort(pts.begin(), pts.end(),
            [](const LadderPoint& a, const LadderPoint& b) { return a.parameter > b.parameter; });
  return pts;
}

double linear_fit_at_zero(std::span<const LadderPoint> pts, double* rms) {
  const double n = static_cast<double>(pts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : pts) {
    sx += p.parameter;
    sy += p.value;
    sxx += p.parameter * p.parameter;
    sxy += p.parameter * p.value;
  }
  const double det = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / det;
  const double intercept = (sy - slope * sx) / n;
  if (rms != nullptr) {
    double ss = 0.0;
    for (const auto& p : pts) {
      const double r = p.value - (intercept + slope * p.parameter);
      ss += r * r;
    }
    *rms = std::sqrt(ss / n);
  }
  return intercept;
}

double neville_at_zero(std::span<const LadderPoint> pts) {
  std::vector<double> p(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) p[i] = pts[i].value;
  for (std::size_t level = 1; level < pts.size(); ++level) {
    for (std::size_t i = 0; i + level < pts.size(); ++i) {
      const double xi = pts[i].parameter;
      const double xj = pts[i + level].parameter;
      p[i] = (xi * p[i + 1] - xj * p[i]) / (xi - xj);
    }
  }
  return p[0];
}

// Aitken on three consecutive values; falls back to the last value when the
// second difference vanishes (constant or arithmetic tail).
double aitken(double f0, double f1, double f2) {
  const double d1 = f1 - f0;
  const double d2 = f2 - f1;
  const double dd = d2 - d1;
  const double scale = std::max({std::abs(f0), std::abs(f1), std::abs(f2), 1e-300});
  if (std::abs(dd) <= 1e-14 * scale) return f2;
  return f2 - d2 * d2 / dd;
}

}  // namespace

std::string to_string(ExtrapolationModel model) {
  switch (model) {
    case ExtrapolationModel::kLinear:
      return "linear";
    case ExtrapolationModel::kRichardson:
      return "richardson";
    case ExtrapolationModel::kGeometric:
      return "geometric";
  }
  return "unknown";
}

ExtrapolationModel extrapolation_model_from_string(const std::string& name) {
  if (name == "linear") return ExtrapolationModel::kLinear;
  if (name == "richardson") return ExtrapolationModel::kRichardson;
  if (name == "geometric") return ExtrapolationModel::kGeometric;
  throw std::invalid_argument("unknown extrapolation model '" + name + "'");
}

Extrapolation extrapolate(std::span<const LadderPoint> ladder, ExtrapolationModel model) {
  if (ladder.size() < 3) throw std::invalid_argument("extrapolate: need at least 3 ladder points");
  const auto pts = sorted_ladder(ladder);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].parameter > 0.0)) {
      throw std::invalid_argument("extrapolate: ladder parameters must be positive");
    }
    if (i > 0 && pts[i].parameter == pts[i - 1].parameter) {
      throw std::invalid_argument("extrapolate: ladder parameters must be distinct");
    }
  }

  Extrapolation out;
  int direction = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double d = pts[i].value - pts[i - 1].value;
    const int s = (d > 0) - (d < 0);
    if (s == 0) continue;
    if (direction != 0 && s != direction) out.non_monotone = true;
    direction = s;
  }

  const std::span<const LadderPoint> all(pts);
  const auto finer = all.subspan(1);
  switch (model) {
    case ExtrapolationModel::kLinear: {
      double rms = 0.0;
      out.limit = linear_fit_at_zero(all, &rms);
      // Two finest rungs give the local secant estimate.
      const auto& a = pts[pts.size() - 2];
      const auto& b = pts[pts.size() - 1];
      const double secant = b.value - b.parameter * (a.value - b.value) / (a.parameter - b.parameter);
      out.error = std::abs(out.limit - secant) + rms;
      break;
    }
    case ExtrapolationModel::kRichardson: {
      out.limit = neville_at_zero(all);
      out.error = std::abs(out.limit - neville_at_zero(finer));
      break;
    }
    case ExtrapolationModel::kGeometric: {
      const std::size_t n = pts.size();
      out.limit = aitken(pts[n - 3].value, pts[n - 2].value, pts[n - 1].value);
      if (n >= 4) {
        out.error = std::abs(out.limit - aitken(pts[n - 4].value, pts[n - 3].value, pts[n - 2].value));
      } else {
        out.error = std::abs(out.limit - pts[n - 1].value);
      }
      break;
    }
  }
  return out;
}

}  // namespace nsgap
