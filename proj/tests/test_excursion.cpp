#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "nsgap/excursion.hpp"
#include "nsgap/solver.hpp"

using namespace nsgap;

namespace {

/// E consistent with dE/dtau = -2D for piecewise-linear D.
Trajectory consistent(const std::vector<double>& t, const std::vector<double>& D, double E0 = 100.0) {
  std::vector<double> E{E0};
  for (std::size_t i = 1; i < t.size(); ++i) E.push_back(E.back() - (t[i] - t[i - 1]) * (D[i] + D[i - 1]));
  return make_series(t, E, D);
}

std::vector<double> uniform_times(std::size_t n, double dt = 1.0) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = dt * static_cast<double>(i);
  return t;
}

/// Zone oracle: 0 below R, 1 in the band, 2 above 2R. Band runs of the zone
/// sequence, with 0 -> 2 jumps passing through the band, are the excursions.
struct Oracle {
  std::vector<int> kinds;
  double measure = 0.0;
};

Oracle zone_oracle(const std::vector<double>& t, const std::vector<double>& D, double R) {
  const auto zone = [R](double d) { return d <= R ? 0 : (d >= 2.0 * R ? 2 : 1); };
  std::vector<int> z{zone(D[0])};
  for (std::size_t i = 1; i < D.size(); ++i) {
    const int a = z.back();
    const int b = zone(D[i]);
    if (std::abs(a - b) == 2) z.push_back(1);
    z.push_back(b);
  }
  Oracle o;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] != 1) continue;
    std::size_t j = i;
    while (z[j] == 1) ++j;
    const int entry = z[i - 1] == 0 ? 1 : 2;
    const int exit = z[j] == 0 ? 1 : 2;
    o.kinds.push_back(10 * entry + exit);
    i = j;
  }
  for (std::size_t i = 0; i + 1 < D.size(); ++i) {
    // Length of the segment where R < D < 2R, clipped in the linear parameter.
    const double d0 = D[i], d1 = D[i + 1], h = t[i + 1] - t[i];
    if (d0 == d1) {
      if (R < d0 && d0 < 2 * R) o.measure += h;
      continue;
    }
    double l0 = (R - d0) / (d1 - d0), l1 = (2 * R - d0) / (d1 - d0);
    if (l0 > l1) std::swap(l0, l1);
    o.measure += h * std::max(0.0, std::min(1.0, l1) - std::max(0.0, l0));
  }
  return o;
}

}  // namespace

TEST_CASE("crossings: sine around its mean") {
  const double R = 2.0;
  std::vector<double> t, v;
  for (int i = 0; i <= 1000; ++i) {
    t.push_back(2.0 * std::numbers::pi * i / 1000.0);
    v.push_back(R * (1.0 + std::sin(t.back())));
  }
  const auto c = find_crossings(t, v, R);
  REQUIRE(c.size() == 1);
  CHECK(c[0] == doctest::Approx(std::numbers::pi).epsilon(1e-6));
}

TEST_CASE("crossings: touches and plateaus") {
  const std::vector<double> t{0, 1, 2, 3, 4, 5, 6};
  CHECK(find_crossings(t, {0, 1, 0, 0, 0, 0, 0}, 1.0).empty());
  CHECK(find_crossings(t, {0, 1, 1, 1, 2, 2, 2}, 1.0) == std::vector<double>{1.0});
  CHECK(find_crossings(t, {0, 2, 0, 2, 0, 2, 0}, 1.0) ==
        std::vector<double>{0.5, 1.5, 2.5, 3.5, 4.5, 5.5});
}

TEST_CASE("bump inside the band is one 11 excursion") {
  const auto tr = consistent(uniform_times(5), {0.5, 0.5, 1.5, 0.5, 0.5});
  const auto set = decompose(tr, 1.0, 0.0, 4.0);
  REQUIRE(set.excursions.size() == 1);
  CHECK(set.excursions[0].kind == 11);
  CHECK(set.excursions[0].t_start == doctest::Approx(1.5));
  CHECK(set.excursions[0].t_end == doctest::Approx(2.5));
  CHECK(set.p11 == 1);
  CHECK(set.total_measure == doctest::Approx(1.0));
  CHECK_FALSE(e_sum(tr, set).has_pair);
}

TEST_CASE("staircase through both levels gives 12 then 21") {
  const auto tr = consistent(uniform_times(7), {0.5, 1.5, 2.5, 3.0, 2.5, 1.5, 0.5});
  const auto set = decompose(tr, 1.0, 0.0, 6.0);
  REQUIRE(set.excursions.size() == 2);
  CHECK(set.excursions[0].kind == 12);
  CHECK(set.excursions[1].kind == 21);
  CHECK(set.excursions[0].t_start == doctest::Approx(0.5));
  CHECK(set.excursions[0].t_end == doctest::Approx(1.5));
  CHECK(set.p12 == 1);
  CHECK(set.p21 == 1);
  CHECK(check_pairing(tr, set).ok());

  const auto es = e_sum(tr, set, EnergyInterpolation::kDissipation);
  CHECK(es.has_pair);
  CHECK(es.B < 0.0);
  CHECK(es.E_sum == doctest::Approx(es.B + es.first_t12_energy - es.last_s21_energy));
}

TEST_CASE("samples exactly on a level are outside the open band") {
  const auto tr = consistent(uniform_times(5), {0.5, 1.0, 1.5, 1.0, 0.5});
  const auto set = decompose(tr, 1.0, 0.0, 4.0);
  REQUIRE(set.excursions.size() == 1);
  CHECK(set.excursions[0].t_start == 1.0);
  CHECK(set.excursions[0].t_end == 3.0);
  // A touch of 2R from inside splits the interval.
  const auto tr2 = consistent(uniform_times(5), {0.5, 1.5, 2.0, 1.5, 0.5});
  CHECK(decompose(tr2, 1.0, 0.0, 4.0).excursions.size() == 2);
}

TEST_CASE("endpoint precondition") {
  const auto tr = consistent(uniform_times(4), {1.5, 0.5, 0.5, 0.5});
  CHECK_THROWS_AS(decompose(tr, 1.0, 0.0, 3.0), ExcursionPrecondition);
  CHECK_NOTHROW(decompose(tr, 1.0, 1.0, 3.0));
  const auto tr2 = consistent(uniform_times(4), {0.5, 0.5, 0.5, 1.0});
  CHECK_THROWS_AS(decompose(tr2, 1.0, 0.0, 3.0), ExcursionPrecondition);
}

TEST_CASE("property: decomposition matches the zone oracle on random series") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> level(0.0, 3.5);
  std::uniform_real_distribution<double> gap(0.1, 1.0);
  std::uniform_int_distribution<int> length(3, 40);
  int with_pairs = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double R = 1.0;
    const int n = length(rng);
    std::vector<double> t{0.0}, D{0.3 * level(rng) / 3.5};
    for (int i = 1; i < n - 1; ++i) {
      t.push_back(t.back() + gap(rng));
      D.push_back(level(rng));
    }
    t.push_back(t.back() + gap(rng));
    D.push_back(0.9 * level(rng) / 3.5);
    const auto tr = consistent(t, D);
    const auto set = decompose(tr, R, t.front(), t.back());
    const auto oracle = zone_oracle(t, D, R);

    std::vector<int> kinds;
    for (const auto& e : set.excursions) kinds.push_back(e.kind);
    REQUIRE(kinds == oracle.kinds);
    CHECK(set.total_measure == doctest::Approx(oracle.measure).epsilon(1e-12));
    CHECK(set.p11 + set.p12 + set.p21 + set.p22 == static_cast<int>(kinds.size()));
    const auto pr = check_pairing(tr, set);
    CHECK(pr.ok());
    if (set.p12 > 0) ++with_pairs;

    const auto mee = mee_identity_check(tr, t.front(), t.back(), R, EnergyInterpolation::kDissipation);
    CHECK(mee.residual <= 1e-8 * std::max(1.0, std::abs(mee.rhs)));
  }
  CHECK(with_pairs > 100);
}

TEST_CASE("energy sum identity on solver trajectories converges with dt") {
  // Strong 3D Taylor-Green: D overshoots its initial value before decaying.
  SolverConfig c;
  c.grid = make_grid(3, 16);
  c.m = 5;
  c.T = 0.2;
  const auto v0 = scaled(taylor_green(c.grid), 100.0);
  double residual[2];
  for (int k = 0; k < 2; ++k) {
    c.dt = 5e-4 / (1 << k);
    const auto tr = run(c, v0);
    const double R = 1.2 * tr.grad_norm_sq.front();
    const auto set = decompose(tr, R, 0.0, tr.times.back());
    CHECK(set.p11 == 1);
    CHECK(measure_bound_check(set, tr.energy.front()));
    const auto m = mee_identity_check(tr, 0.0, tr.times.back(), R, EnergyInterpolation::kDissipation);
    CHECK(m.band_d4 > 0.0);
    residual[k] = m.residual;
  }
  CHECK(residual[1] < residual[0] / 3.0);
}

TEST_CASE("measure bound and a negative control") {
  const auto tr = consistent(uniform_times(7), {0.5, 1.5, 2.5, 3.0, 2.5, 1.5, 0.5});
  const auto set = decompose(tr, 1.0, 0.0, 6.0);
  CHECK(measure_bound_check(set, tr.energy.front()));
  CHECK_FALSE(measure_bound_check(set, 1.0));
}

TEST_CASE("excursion csv") {
  const auto tr = consistent(uniform_times(5), {0.5, 0.5, 1.5, 0.5, 0.5});
  std::ostringstream out;
  write_excursions_csv(decompose(tr, 1.0, 0.0, 4.0), out);
  CHECK(out.str() == "kind,t_start,t_end\n11,1.5,2.5\n");
}

TEST_CASE("ladder of levels runs each decomposition") {
  const auto tr = consistent(uniform_times(7), {0.1, 1.5, 2.5, 3.0, 2.5, 1.5, 0.1});
  const auto sets = decompose_ladder(tr, {0.5, 1.0, 2.0, 4.0}, 0.0, 6.0);
  REQUIRE(sets.size() == 4);
  for (const auto& s : sets) CHECK(s.total_measure == doctest::Approx(decompose(tr, s.R, 0.0, 6.0).total_measure));
  CHECK(sets[3].excursions.empty());
}
