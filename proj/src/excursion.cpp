#include "nsgap/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace nsgap {
namespace {

int sign_of(double v, double level) { return v > level ? 1 : (v < level ? -1 : 0); }

/// Time where the segment [i, i+1] reaches `level`; exact at the endpoints.
double cross_time(const std::vector<double>& times, const std::vector<double>& values, std::size_t i,
                  double level) {
  const double d0 = values[i];
  const double d1 = values[i + 1];
  if (d0 == level) return times[i];
  if (d1 == level) return times[i + 1];
  const double lam = (level - d0) / (d1 - d0);
  return times[i] + lam * (times[i + 1] - times[i]);
}

int level_code(double level, double R) { return level == R ? 1 : 2; }

/// D at tau on segment i.
double linear_at(const std::vector<double>& times, const std::vector<double>& values, std::size_t i,
                 double tau) {
  if (tau == times[i]) return values[i];
  if (tau == times[i + 1]) return values[i + 1];
  const double lam = (tau - times[i]) / (times[i + 1] - times[i]);
  return values[i] + lam * (values[i + 1] - values[i]);
}

std::size_t segment_of(const std::vector<double>& times, double tau) {
  if (tau < times.front() || tau > times.back()) {
    throw std::out_of_range("time outside the sampled range");
  }
  const auto it = std::upper_bound(times.begin(), times.end(), tau);
  std::size_t j = static_cast<std::size_t>(it - times.begin());
  if (j >= times.size()) j = times.size() - 1;
  return j == 0 ? 0 : j - 1;
}

}  // namespace

std::vector<double> find_crossings(const std::vector<double>& times, const std::vector<double>& values,
                                   double level) {
  std::vector<double> out;
  int last_sign = 0;
  std::size_t last_index = 0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const int sj = sign_of(values[j], level);
    if (sj == 0) continue;
    if (last_sign != 0 && sj != last_sign) {
      if (j == last_index + 1) {
        out.push_back(cross_time(times, values, last_index, level));
      } else {
        out.push_back(times[last_index + 1]);
      }
    }
    last_sign = sj;
    last_index = j;
  }
  return out;
}

int ExcursionSet::count(int kind) const {
  switch (kind) {
    case 11: return p11;
    case 12: return p12;
    case 21: return p21;
    case 22: return p22;
    default: return 0;
  }
}

ExcursionSet decompose(const Trajectory& traj, double R, double s, double t) {
  if (!(R > 0.0)) throw std::invalid_argument("decompose: R must be positive");
  if (!(s < t)) throw std::invalid_argument("decompose: requires s < t");
  const std::size_t is = traj.index_of(s);
  const std::size_t it = traj.index_of(t);
  const auto& D = traj.grad_norm_sq;
  const auto& T = traj.times;
  if (!(D[is] < R) || !(D[it] < R)) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "decompose: D(s) = %.6g and D(t) = %.6g must lie below R = %.6g",
                  D[is], D[it], R);
    throw ExcursionPrecondition(msg);
  }
  const double lo = R;
  const double hi = 2.0 * R;
  const auto inside = [&](double d) { return lo < d && d < hi; };

  ExcursionSet out;
  out.R = R;
  out.s = s;
  out.t = t;
  bool open = false;
  Excursion cur;
  for (std::size_t i = is; i < it; ++i) {
    const double d0 = D[i];
    const double d1 = D[i + 1];
    if (d0 == d1) continue;  // flat: either fully inside (continuing) or empty
    const double enter = d1 > d0 ? lo : hi;
    const double leave = d1 > d0 ? hi : lo;
    const double a = std::min(d0, d1);
    const double b = std::max(d0, d1);
    if (!(a < hi && b > lo)) continue;  // segment misses the open band
    if (!inside(d0)) {
      cur = Excursion{};
      cur.entry_level = enter;
      cur.t_start = cross_time(T, D, i, enter);
      open = true;
    }
    if (!inside(d1)) {
      cur.exit_level = leave;
      cur.t_end = cross_time(T, D, i, leave);
      cur.kind = 10 * level_code(cur.entry_level, R) + level_code(cur.exit_level, R);
      out.excursions.push_back(cur);
      open = false;
    }
  }
  (void)open;
  for (const auto& e : out.excursions) {
    out.total_measure += e.length();
    switch (e.kind) {
      case 11: ++out.p11; break;
      case 12: ++out.p12; break;
      case 21: ++out.p21; break;
      default: ++out.p22; break;
    }
  }
  return out;
}

std::vector<ExcursionSet> decompose_ladder(const Trajectory& traj, const std::vector<double>& levels,
                                           double s, double t) {
  std::vector<ExcursionSet> out(levels.size());
  const auto n = static_cast<std::ptrdiff_t>(levels.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    out[static_cast<std::size_t>(k)] = decompose(traj, levels[static_cast<std::size_t>(k)], s, t);
  }
  return out;
}

double energy_at(const Trajectory& traj, double tau, EnergyInterpolation mode) {
  const std::size_t i = segment_of(traj.times, tau);
  if (tau == traj.times[i]) return traj.energy[i];
  if (i + 1 < traj.size() && tau == traj.times[i + 1]) return traj.energy[i + 1];
  if (mode == EnergyInterpolation::kLinear) return linear_at(traj.times, traj.energy, i, tau);
  const double d = linear_at(traj.times, traj.grad_norm_sq, i, tau);
  return traj.energy[i] - (tau - traj.times[i]) * (traj.grad_norm_sq[i] + d);
}

ESumReport e_sum(const Trajectory& traj, const ExcursionSet& set, EnergyInterpolation mode) {
  ESumReport r;
  bool first12 = true;
  for (const auto& e : set.excursions) {
    const double ea = energy_at(traj, e.t_start, mode);
    const double eb = energy_at(traj, e.t_end, mode);
    switch (e.kind) {
      case 11: r.sum11 += eb - ea; break;
      case 12:
        r.sum12 += 2.0 * eb - ea;
        if (first12) r.first_t12_energy = eb;
        first12 = false;
        break;
      case 21:
        r.sum21 += eb - 2.0 * ea;
        r.last_s21_energy = ea;
        break;
      default: r.sum22 += 2.0 * (eb - ea); break;
    }
  }
  r.E_sum = r.sum22 + r.sum21 + r.sum11 + r.sum12;
  r.has_pair = set.p12 > 0 && set.p21 > 0;
  if (r.has_pair) r.B = r.sum12 + r.sum21 - r.first_t12_energy + r.last_s21_energy;
  return r;
}

MeeCheck mee_identity_check(const Trajectory& traj, double s, double t, double R,
                            EnergyInterpolation mode) {
  const ExcursionSet set = decompose(traj, R, s, t);
  MeeCheck out;
  out.lhs = e_sum(traj, set, mode).E_sum;

  const std::size_t is = traj.index_of(s);
  const std::size_t it = traj.index_of(t);
  const auto& D = traj.grad_norm_sq;
  const auto& T = traj.times;
  const auto cutoff = [R](double d) { return d <= R ? 1.0 : (d >= 2.0 * R ? 0.0 : (2.0 * R - d) / R); };
  double band = 0.0;
  double weighted = 0.0;
  std::vector<double> cuts;
  for (std::size_t i = is; i < it; ++i) {
    cuts.assign({T[i], T[i + 1]});
    for (const double level : {R, 2.0 * R}) {
      if ((D[i] - level) * (D[i + 1] - level) < 0.0) cuts.push_back(cross_time(T, D, i, level));
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double a = cuts[k];
      const double b = cuts[k + 1];
      if (!(b > a)) continue;
      const double da = linear_at(T, D, i, a);
      const double db = linear_at(T, D, i, b);
      const double dm = 0.5 * (da + db);
      const double w = (b - a) / 6.0;
      // Simpson is exact: each piece is a polynomial of degree <= 2 in tau.
      if (R < dm && dm < 2.0 * R) band += w * (da * da + 4.0 * dm * dm + db * db);
      const double pa = dm < R ? 1.0 : (dm > 2.0 * R ? 0.0 : cutoff(da));
      const double pb = dm < R ? 1.0 : (dm > 2.0 * R ? 0.0 : cutoff(db));
      const double pm = cutoff(dm);
      weighted += w * (pa * da + 4.0 * pm * dm + pb * db);
    }
  }
  out.band_d4 = band;
  out.cutoff_dissipation = weighted;
  out.rhs = -(2.0 / R) * band + (traj.energy[is] - traj.energy[it]) - 2.0 * weighted;
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

bool measure_bound_check(const ExcursionSet& set, double v0_norm_sq) {
  return set.total_measure < v0_norm_sq / (2.0 * set.R);
}

PairingReport check_pairing(const Trajectory& traj, const ExcursionSet& set) {
  PairingReport r;
  r.counts_match = set.p12 == set.p21;
  r.well_formed = true;
  for (const auto& e : set.excursions) {
    const int expect = 10 * level_code(e.entry_level, set.R) + level_code(e.exit_level, set.R);
    if (!(e.t_start < e.t_end) || e.kind != expect) r.well_formed = false;
  }
  for (std::size_t k = 1; k < set.excursions.size(); ++k) {
    if (!(set.excursions[k - 1].t_end <= set.excursions[k].t_start)) r.well_formed = false;
  }

  r.interleaved = true;
  r.stays_above = true;
  int expect = 12;
  double open_from = 0.0;
  double last21_end = -INFINITY;
  for (const auto& e : set.excursions) {
    if (e.kind != 12 && e.kind != 21) continue;
    if (e.kind != expect) {
      r.interleaved = false;
      break;
    }
    if (e.kind == 12) {
      if (!(last21_end < e.t_start)) r.interleaved = false;
      open_from = e.t_end;
      expect = 21;
    } else {
      for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.times[i] > open_from && traj.times[i] < e.t_start && !(traj.grad_norm_sq[i] > set.R)) {
          r.stays_above = false;
        }
      }
      last21_end = e.t_end;
      expect = 12;
    }
  }
  if (expect != 12) r.interleaved = false;
  return r;
}

void write_excursions_csv(const ExcursionSet& set, std::ostream& out) {
  out << "kind,t_start,t_end\n";
  char buf[96];
  for (const auto& e : set.excursions) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", e.kind, e.t_start, e.t_end);
    out << buf;
  }
}

}  // namespace nsgap
