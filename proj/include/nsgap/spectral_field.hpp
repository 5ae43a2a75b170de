#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "nsgap/grid.hpp"
#include "nsgap/kernels.hpp"

namespace nsgap {

/// A real vector field on the periodic box stored as truncated Fourier
/// coefficients, one complex array per component. Values are immutable once
/// constructed; operations return new fields.
class SpectralField {
 public:
  using Coeffs = std::vector<std::complex<double>>;

  /// Zero field.
  explicit SpectralField(const Grid& grid);
  /// Takes ownership of `components` (exactly grid.dim arrays of grid.size()).
  SpectralField(const Grid& grid, std::vector<Coeffs> components);

  const Grid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return grid_.dim; }
  std::span<const std::complex<double>> component(int c) const noexcept { return comps_[c]; }
  const std::vector<Coeffs>& components() const noexcept { return comps_; }
  kernels::ConstComponents view() const noexcept;

  bool is_zero() const noexcept;

 private:
  Grid grid_;
  std::vector<Coeffs> comps_;
};

enum class MollifierProfile { kSharp, kSmooth };

/// Orthogonal projection onto divergence-free, zero-mean fields.
SpectralField leray_project(const SpectralField& f);

/// ||v||_2^2 over the box, by Parseval.
double l2_norm_sq(const SpectralField& v);
/// ||grad v||_2^2 = (2 pi)^dim sum |k|^2 |v(k)|^2.
double grad_norm_sq(const SpectralField& v);
/// (grad a, grad b) over the box.
double grad_inner(const SpectralField& a, const SpectralField& b);
double max_abs_divergence(const SpectralField& v);
/// Largest |c(k) - conj c(-k)| over all components; zero for real fields.
double hermitian_defect(const SpectralField& v);

/// Spectral mollifier J_m. Sharp keeps |k|_inf <= m and drops the rest; smooth
/// multiplies by exp(-(|k|/m)^2).
SpectralField mollify(const SpectralField& v, int m, MollifierProfile profile = MollifierProfile::kSharp);
double mollifier_factor(const std::array<int, 3>& k, int m, MollifierProfile profile) noexcept;

/// Two-thirds rule: keeps modes with 3|k_i| < n on every axis.
bool dealias_keep(const std::array<int, 3>& k, int n) noexcept;

/// 2D: (sin x cos y, -cos x sin y). 3D: (sin x cos y cos z, -cos x sin y cos z, 0).
SpectralField taylor_green(const Grid& grid);
/// Real single Fourier mode a * cos(k.x) * e with e a unit vector orthogonal to k.
SpectralField single_mode(const Grid& grid, std::array<int, 3> k, double amplitude = 1.0);
/// Random-phase divergence-free field with energy spectrum ~ |k|^slope on
/// 1 <= |k| and 3|k_i| < n, normalized to mean |v|^2 = 1/2. Same seed, same field.
SpectralField random_divfree(const Grid& grid, double spectrum_slope, std::uint64_t seed);

SpectralField scaled(const SpectralField& v, double factor);

/// Physical-space samples on the uniform grid, one real array per component.
std::vector<std::vector<double>> to_physical(const SpectralField& v);
/// Builds coefficients from physical samples (no projection applied).
SpectralField from_physical(const Grid& grid, const std::vector<std::vector<double>>& values);

}  // namespace nsgap
