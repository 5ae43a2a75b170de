#include "nsgap/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "nsgap/fft.hpp"

namespace nsgap {
namespace {

using Cplx = std::complex<double>;

kernels::Components mutable_view(const Grid& g, std::vector<SpectralField::Coeffs>& comps) {
  kernels::Components out{};
  for (int c = 0; c < g.dim; ++c) out[c] = comps[c];
  return out;
}

std::size_t flat_index(const Grid& g, const std::array<int, 3>& k) {
  std::size_t idx = 0;
  for (int d = 0; d < g.dim; ++d) {
    const int i = ((k[d] % g.n) + g.n) % g.n;
    idx = idx * static_cast<std::size_t>(g.n) + static_cast<std::size_t>(i);
  }
  return idx;
}

int sign(int x) { return (x > 0) - (x < 0); }

}  // namespace

SpectralField::SpectralField(const Grid& grid)
    : grid_(grid), comps_(static_cast<std::size_t>(grid.dim), Coeffs(grid.size())) {}

SpectralField::SpectralField(const Grid& grid, std::vector<Coeffs> components)
    : grid_(grid), comps_(std::move(components)) {
  if (comps_.size() != static_cast<std::size_t>(grid.dim)) {
    throw std::invalid_argument("SpectralField: component count must equal grid dimension");
  }
  for (const auto& c : comps_) {
    if (c.size() != grid.size()) {
      throw std::invalid_argument("SpectralField: component length must equal grid size");
    }
  }
}

kernels::ConstComponents SpectralField::view() const noexcept {
  kernels::ConstComponents out{};
  for (int c = 0; c < grid_.dim; ++c) out[c] = comps_[c];
  return out;
}

bool SpectralField::is_zero() const noexcept {
  for (const auto& c : comps_) {
    for (const auto& z : c) {
      if (z != Cplx{}) return false;
    }
  }
  return true;
}

SpectralField leray_project(const SpectralField& f) {
  auto comps = f.components();
  kernels::parallel::leray_project(f.grid(), mutable_view(f.grid(), comps));
  return SpectralField(f.grid(), std::move(comps));
}

double l2_norm_sq(const SpectralField& v) {
  return v.grid().volume() * kernels::parallel::sum_sq(v.grid(), v.view());
}

double grad_norm_sq(const SpectralField& v) {
  return v.grid().volume() * kernels::parallel::sum_ksq_sq(v.grid(), v.view());
}

double grad_inner(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("grad_inner: grid mismatch");
  return a.grid().volume() * kernels::parallel::sum_ksq_inner(a.grid(), a.view(), b.view());
}

double max_abs_divergence(const SpectralField& v) {
  return kernels::parallel::max_abs_divergence(v.grid(), v.view());
}

double hermitian_defect(const SpectralField& v) {
  const Grid& g = v.grid();
  double worst = 0.0;
  for (int c = 0; c < g.dim; ++c) {
    const auto comp = v.component(c);
    for (std::size_t i = 0; i < g.size(); ++i) {
      worst = std::max(worst, std::abs(comp[i] - std::conj(comp[g.mirror(i)])));
    }
  }
  return worst;
}

double mollifier_factor(const std::array<int, 3>& k, int m, MollifierProfile profile) noexcept {
  if (profile == MollifierProfile::kSharp) {
    const int kinf = std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])});
    return kinf <= m ? 1.0 : 0.0;
  }
  const double r = std::sqrt(kernels::ksq(k)) / static_cast<double>(m);
  return std::exp(-r * r);
}

bool dealias_keep(const std::array<int, 3>& k, int n) noexcept {
  return 3 * std::abs(k[0]) < n && 3 * std::abs(k[1]) < n && 3 * std::abs(k[2]) < n;
}

SpectralField mollify(const SpectralField& v, int m, MollifierProfile profile) {
  if (m < 1) throw std::invalid_argument("mollify: cutoff index m must be >= 1");
  auto comps = v.components();
  kernels::parallel::scale_modes(v.grid(), mutable_view(v.grid(), comps),
                                 [m, profile](const std::array<int, 3>& k) {
                                   return mollifier_factor(k, m, profile);
                                 });
  return SpectralField(v.grid(), std::move(comps));
}

SpectralField taylor_green(const Grid& grid) {
  std::vector<SpectralField::Coeffs> comps(static_cast<std::size_t>(grid.dim),
                                           SpectralField::Coeffs(grid.size()));
  const Cplx i_unit{0.0, 1.0};
  const double denom = grid.dim == 2 ? 4.0 : 8.0;
  const int kz_values = grid.dim == 2 ? 1 : 2;
  for (int sx : {-1, 1}) {
    for (int sy : {-1, 1}) {
      for (int iz = 0; iz < kz_values; ++iz) {
        const std::array<int, 3> k{sx, sy, grid.dim == 2 ? 0 : (iz == 0 ? -1 : 1)};
        const std::size_t idx = flat_index(grid, k);
        // sin a = (e^{ia} - e^{-ia}) / 2i, cos a = (e^{ia} + e^{-ia}) / 2.
        comps[0][idx] = static_cast<double>(sign(k[0])) / (denom * i_unit);
        comps[1][idx] = -static_cast<double>(sign(k[1])) / (denom * i_unit);
      }
    }
  }
  return SpectralField(grid, std::move(comps));
}

SpectralField single_mode(const Grid& grid, std::array<int, 3> k, double amplitude) {
  if (grid.dim == 2) k[2] = 0;
  const double k2 = kernels::ksq(k);
  if (k2 == 0.0) throw std::invalid_argument("single_mode: wavevector must be nonzero");
  for (int d = 0; d < grid.dim; ++d) {
    if (2 * std::abs(k[d]) >= grid.n) {
      throw std::invalid_argument("single_mode: wavevector outside the resolved band");
    }
  }
  std::array<double, 3> e{0.0, 0.0, 0.0};
  if (grid.dim == 2) {
    e = {-static_cast<double>(k[1]), static_cast<double>(k[0]), 0.0};
  } else {
    // e = k x z, or k x x when k is parallel to z.
    if (k[0] != 0 || k[1] != 0) {
      e = {static_cast<double>(k[1]), -static_cast<double>(k[0]), 0.0};
    } else {
      e = {0.0, static_cast<double>(k[2]), 0.0};
    }
  }
  const double en = std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]);
  std::vector<SpectralField::Coeffs> comps(static_cast<std::size_t>(grid.dim),
                                           SpectralField::Coeffs(grid.size()));
  const std::array<int, 3> mk{-k[0], -k[1], -k[2]};
  for (int c = 0; c < grid.dim; ++c) {
    const double a = 0.5 * amplitude * e[c] / en;
    comps[c][flat_index(grid, k)] = a;
    comps[c][flat_index(grid, mk)] = a;
  }
  return SpectralField(grid, std::move(comps));
}

SpectralField random_divfree(const Grid& grid, double spectrum_slope, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<SpectralField::Coeffs> comps(static_cast<std::size_t>(grid.dim),
                                           SpectralField::Coeffs(grid.size()));
  // Sequential fill keeps the draw order, and so the field, seed-determined.
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto k = grid.wavevector(i);
    const double k2 = kernels::ksq(k);
    if (k2 == 0.0 || grid.is_nyquist(i) || !dealias_keep(k, grid.n)) continue;
    const double amp = std::pow(std::sqrt(k2), 0.5 * (spectrum_slope - (grid.dim - 1)));
    for (int c = 0; c < grid.dim; ++c) {
      const double re = normal(rng);
      const double im = normal(rng);
      comps[c][i] = amp * Cplx{re, im};
    }
  }
  kernels::serial::hermitian_symmetrize(grid, mutable_view(grid, comps));
  kernels::serial::leray_project(grid, mutable_view(grid, comps));
  const double energy = grid.volume() * kernels::serial::sum_sq(
                                            grid, kernels::as_const(mutable_view(grid, comps)));
  if (energy > 0.0) {
    const double target = 0.5 * grid.volume();
    const double s = std::sqrt(target / energy);
    for (auto& comp : comps) {
      for (auto& z : comp) z *= s;
    }
  }
  return SpectralField(grid, std::move(comps));
}

SpectralField scaled(const SpectralField& v, double factor) {
  auto comps = v.components();
  for (auto& comp : comps) {
    for (auto& z : comp) z *= factor;
  }
  return SpectralField(v.grid(), std::move(comps));
}

std::vector<std::vector<double>> to_physical(const SpectralField& v) {
  const Grid& g = v.grid();
  FftEngine fft(g, 1);
  std::vector<std::vector<double>> out(static_cast<std::size_t>(g.dim));
  for (int c = 0; c < g.dim; ++c) {
    auto buf = fft.buffer(0);
    std::copy(v.component(c).begin(), v.component(c).end(), buf.begin());
    fft.to_physical(0);
    out[c].resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[c][i] = buf[i].real();
  }
  return out;
}

SpectralField from_physical(const Grid& grid, const std::vector<std::vector<double>>& values) {
  if (values.size() != static_cast<std::size_t>(grid.dim)) {
    throw std::invalid_argument("from_physical: component count must equal grid dimension");
  }
  FftEngine fft(grid, 1);
  std::vector<SpectralField::Coeffs> comps(static_cast<std::size_t>(grid.dim));
  for (int c = 0; c < grid.dim; ++c) {
    if (values[c].size() != grid.size()) {
      throw std::invalid_argument("from_physical: component length must equal grid size");
    }
    auto buf = fft.buffer(0);
    for (std::size_t i = 0; i < grid.size(); ++i) buf[i] = values[c][i];
    fft.to_spectral(0);
    comps[c].assign(buf.begin(), buf.end());
  }
  return SpectralField(grid, std::move(comps));
}

}  // namespace nsgap
