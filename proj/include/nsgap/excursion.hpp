#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsgap/trajectory.hpp"

namespace nsgap {

/// Times where the piecewise-linear series crosses `level`, by linear
/// interpolation. A sample equal to the level without a sign change around it
/// is a touch, not a crossing; a run of equal samples between opposite signs
/// crosses at its first sample.
std::vector<double> find_crossings(const std::vector<double>& times, const std::vector<double>& values,
                                   double level);

/// Raised when D(s) or D(t) is not strictly below R.
class ExcursionPrecondition : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One maximal interval of {R < D < 2R}; kind is 10 * entry + exit with
/// levels coded 1 (R) and 2 (2R).
struct Excursion {
  int kind = 11;
  double t_start = 0.0;
  double t_end = 0.0;
  double entry_level = 0.0;
  double exit_level = 0.0;

  double length() const noexcept { return t_end - t_start; }
};

struct ExcursionSet {
  double R = 0.0;
  double s = 0.0;
  double t = 0.0;
  std::vector<Excursion> excursions;
  int p11 = 0;
  int p12 = 0;
  int p21 = 0;
  int p22 = 0;
  double total_measure = 0.0;

  int count(int kind) const;
};

/// Classifies the band intervals of D on [s, t]. D is piecewise linear between
/// samples; samples exactly at R or 2R lie outside the open band.
ExcursionSet decompose(const Trajectory& traj, double R, double s, double t);
/// Independent decompositions for several levels, run concurrently.
std::vector<ExcursionSet> decompose_ladder(const Trajectory& traj, const std::vector<double>& levels,
                                           double s, double t);

/// How E is evaluated between samples.
enum class EnergyInterpolation {
  kLinear,
  /// E(tau) = E_i - 2 int_{t_i}^tau D with D linear; exact when dE/dtau = -2D.
  kDissipation,
};

double energy_at(const Trajectory& traj, double tau, EnergyInterpolation mode);

struct ESumReport {
  double E_sum = 0.0;
  double sum11 = 0.0;
  double sum12 = 0.0;
  double sum21 = 0.0;
  double sum22 = 0.0;
  /// E_sum split as B + E(t_1^12) - E(s_p^21) over the 12/21 sums.
  double B = 0.0;
  double first_t12_energy = 0.0;
  double last_s21_energy = 0.0;
  bool has_pair = false;
};

ESumReport e_sum(const Trajectory& traj, const ExcursionSet& set,
                 EnergyInterpolation mode = EnergyInterpolation::kLinear);

struct MeeCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  /// Pieces of the right-hand side.
  double band_d4 = 0.0;
  double cutoff_dissipation = 0.0;
};

/// E_sum against -(2/R) int_{I_R} D^2 + E(s) - E(t) - 2 int_s^t p_R(D) D with the
/// linear cutoff; both integrals exact on piecewise-linear D.
MeeCheck mee_identity_check(const Trajectory& traj, double s, double t, double R,
                            EnergyInterpolation mode = EnergyInterpolation::kLinear);

/// total_measure < v0_norm_sq / (2R).
bool measure_bound_check(const ExcursionSet& set, double v0_norm_sq);

struct PairingReport {
  bool counts_match = false;
  /// 12 and 21 alternate, starting with 12: s^21_phi(h) < t^21_phi(h) < s^12_{h+1}.
  bool interleaved = false;
  /// Every sample between a 12 and its matching 21 is above R.
  bool stays_above = false;
  /// Every excursion satisfies t_start < t_end and kind matches its levels.
  bool well_formed = false;
  bool ok() const noexcept { return counts_match && interleaved && stays_above && well_formed; }
};

PairingReport check_pairing(const Trajectory& traj, const ExcursionSet& set);

/// CSV with header `kind,t_start,t_end`.
void write_excursions_csv(const ExcursionSet& set, std::ostream& out);

}  // namespace nsgap
