#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nsgap/fft.hpp"
#include "nsgap/grid.hpp"
#include "nsgap/spectral_field.hpp"

using namespace nsgap;
using std::numbers::pi;

TEST_CASE("grid: rejects unsupported shapes") {
  CHECK_THROWS_AS(make_grid(1, 16), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(2, 12), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(3, 2), std::invalid_argument);
  CHECK_NOTHROW(make_grid(3, 8));
}

TEST_CASE("grid: wavevectors follow FFT order and mirror is an involution") {
  const Grid g = make_grid(2, 8);
  CHECK(g.size() == 64);
  CHECK(g.wavevector(0) == std::array<int, 3>{0, 0, 0});
  CHECK(g.wavevector(1) == std::array<int, 3>{0, 1, 0});
  CHECK(g.wavevector(8 * 5 + 7) == std::array<int, 3>{-3, -1, 0});
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g.mirror(g.mirror(i)) == i);
    if (!g.is_nyquist(i)) {
      const auto k = g.wavevector(i);
      const auto mk = g.wavevector(g.mirror(i));
      CHECK(mk[0] == -k[0]);
      CHECK(mk[1] == -k[1]);
    }
  }
  CHECK(g.volume() == doctest::Approx(4 * pi * pi));
}

TEST_CASE("fft: forward after backward is the identity") {
  const Grid g = make_grid(3, 8);
  FftEngine fft(g, 2);
  auto b = fft.buffer(1);
  for (std::size_t i = 0; i < g.size(); ++i) b[i] = {std::sin(0.1 * i), std::cos(0.3 * i)};
  const std::vector<std::complex<double>> orig(b.begin(), b.end());
  fft.to_physical(1);
  fft.to_spectral(1);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(b[i] - orig[i]));
  CHECK(err < 1e-13);
}

TEST_CASE("taylor-green 2D: closed-form energy, dissipation and samples") {
  const Grid g = make_grid(2, 32);
  const SpectralField v = taylor_green(g);
  CHECK(l2_norm_sq(v) == doctest::Approx(2 * pi * pi).epsilon(1e-14));
  CHECK(grad_norm_sq(v) == doctest::Approx(4 * pi * pi).epsilon(1e-14));
  CHECK(max_abs_divergence(v) < 1e-15);
  CHECK(hermitian_defect(v) == 0.0);
  const auto phys = to_physical(v);
  const double h = g.spacing();
  double err = 0.0;
  for (int ix = 0; ix < g.n; ++ix) {
    for (int iy = 0; iy < g.n; ++iy) {
      const double x = ix * h;
      const double y = iy * h;
      const std::size_t i = static_cast<std::size_t>(ix * g.n + iy);
      err = std::max(err, std::abs(phys[0][i] - std::sin(x) * std::cos(y)));
      err = std::max(err, std::abs(phys[1][i] + std::cos(x) * std::sin(y)));
    }
  }
  CHECK(err < 1e-14);
}

TEST_CASE("taylor-green 3D: energy 2 pi^3 and D = 3 E") {
  const SpectralField v = taylor_green(make_grid(3, 16));
  CHECK(l2_norm_sq(v) == doctest::Approx(2 * pi * pi * pi).epsilon(1e-14));
  CHECK(grad_norm_sq(v) == doctest::Approx(6 * pi * pi * pi).epsilon(1e-14));
  CHECK(max_abs_divergence(v) < 1e-15);
}

TEST_CASE("single mode: energy a^2 |box| / 2 and D = |k|^2 E") {
  const Grid g = make_grid(2, 16);
  const SpectralField v = single_mode(g, {2, 1, 0}, 3.0);
  const double E = 9.0 * g.volume() / 2.0;
  CHECK(l2_norm_sq(v) == doctest::Approx(E).epsilon(1e-14));
  CHECK(grad_norm_sq(v) == doctest::Approx(5.0 * E).epsilon(1e-14));
  CHECK(max_abs_divergence(v) < 1e-14);
  CHECK_THROWS_AS(single_mode(g, {0, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(single_mode(g, {8, 0, 0}), std::invalid_argument);
}

TEST_CASE("leray projection removes gradients and is idempotent") {
  const Grid g = make_grid(2, 16);
  // grad of phi = sin(2x + y): (2 cos, cos).
  std::vector<std::vector<double>> vals(2, std::vector<double>(g.size()));
  const double h = g.spacing();
  for (int ix = 0; ix < g.n; ++ix) {
    for (int iy = 0; iy < g.n; ++iy) {
      const double c = std::cos(2 * ix * h + iy * h);
      vals[0][static_cast<std::size_t>(ix * g.n + iy)] = 2 * c;
      vals[1][static_cast<std::size_t>(ix * g.n + iy)] = c;
    }
  }
  const SpectralField grad_phi = from_physical(g, vals);
  CHECK(l2_norm_sq(leray_project(grad_phi)) < 1e-28);

  const SpectralField r = random_divfree(g, -2.0, 3);
  const SpectralField mixed = from_physical(g, [&] {
    auto a = to_physical(r);
    for (int c = 0; c < 2; ++c) {
      for (std::size_t i = 0; i < g.size(); ++i) a[c][i] += vals[c][i];
    }
    return a;
  }());
  const SpectralField p = leray_project(mixed);
  CHECK(max_abs_divergence(p) < 1e-13);
  CHECK(l2_norm_sq(p) == doctest::Approx(l2_norm_sq(r)).epsilon(1e-12));
  const SpectralField pp = leray_project(p);
  double diff = 0.0;
  for (int c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < g.size(); ++i) diff = std::max(diff, std::abs(pp.component(c)[i] - p.component(c)[i]));
  }
  CHECK(diff < 1e-15);
}

TEST_CASE("mollifier profiles") {
  CHECK(mollifier_factor({3, -3, 0}, 3, MollifierProfile::kSharp) == 1.0);
  CHECK(mollifier_factor({4, 0, 0}, 3, MollifierProfile::kSharp) == 0.0);
  CHECK(mollifier_factor({3, 4, 0}, 5, MollifierProfile::kSmooth) == doctest::Approx(std::exp(-1.0)));
  const Grid g = make_grid(2, 32);
  const SpectralField v = random_divfree(g, -1.0, 9);
  const SpectralField vm = mollify(v, 4);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto k = g.wavevector(i);
    const bool kept = std::abs(k[0]) <= 4 && std::abs(k[1]) <= 4;
    if (!kept) {
      CHECK(vm.component(0)[i] == std::complex<double>{});
    } else {
      CHECK(vm.component(0)[i] == v.component(0)[i]);
    }
  }
  CHECK(l2_norm_sq(vm) < l2_norm_sq(v));
}

TEST_CASE("dealias keeps 3|k_i| < n") {
  CHECK(dealias_keep({10, -10, 0}, 32));
  CHECK_FALSE(dealias_keep({11, 0, 0}, 32));
  CHECK_FALSE(dealias_keep({0, -11, 0}, 32));
}

TEST_CASE("random data: seeded, real, solenoidal, normalized") {
  const Grid g = make_grid(3, 16);
  const SpectralField a = random_divfree(g, -3.0, 42);
  const SpectralField b = random_divfree(g, -3.0, 42);
  const SpectralField c = random_divfree(g, -3.0, 43);
  CHECK(a.components() == b.components());
  CHECK(a.components() != c.components());
  CHECK(hermitian_defect(a) < 1e-15);
  CHECK(max_abs_divergence(a) < 1e-13);
  CHECK(l2_norm_sq(a) == doctest::Approx(g.volume() / 2).epsilon(1e-13));
}

TEST_CASE("physical round trip") {
  const Grid g = make_grid(2, 16);
  const SpectralField v = random_divfree(g, -2.0, 5);
  const SpectralField w = from_physical(g, to_physical(v));
  double err = 0.0;
  for (int c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(w.component(c)[i] - v.component(c)[i]));
  }
  CHECK(err < 1e-15);
}
