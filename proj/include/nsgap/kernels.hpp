#pragma once

// Coefficient-space and pointwise kernels used by the field operations and
// the solver. Every kernel has a plain serial reference in `serial` and an
// OpenMP version in `parallel` with the same contract; the test suite checks
// that the two agree and bench/ compares their speed.
//
// Parallel reductions sum fixed-size blocks and combine the partial sums in
// block order, so results do not depend on the thread count.

#include <array>
#include <complex>
#include <cstddef>
#include <span>

#include "nsgap/grid.hpp"

namespace nsgap::kernels {

using Cplx = std::complex<double>;
using Components = std::array<std::span<Cplx>, 3>;
using ConstComponents = std::array<std::span<const Cplx>, 3>;

inline ConstComponents as_const(const Components& c) { return {c[0], c[1], c[2]}; }

inline double ksq(const std::array<int, 3>& k) noexcept {
  return static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
}

inline constexpr std::size_t kReductionBlock = 4096;

namespace serial {

/// v <- v - k (k.v)/|k|^2; also zeroes the mean and Nyquist modes.
void leray_project(const Grid& g, Components v);
double sum_sq(const Grid& g, ConstComponents v);
double sum_ksq_sq(const Grid& g, ConstComponents v);
double sum_ksq_inner(const Grid& g, ConstComponents a, ConstComponents b);
double max_abs_divergence(const Grid& g, ConstComponents v);
/// Replaces each c(k) by (c(k) + conj c(-k))/2.
void hermitian_symmetrize(const Grid& g, Components v);
/// out_i = sum_j Re(u_j) Re(grad_ij) at every physical point.
void advect(std::size_t points, int dim, std::span<const Cplx* const> u,
            std::span<const Cplx* const> grad, std::span<Cplx* const> out);

template <class Factor>
void scale_modes(const Grid& g, Components v, Factor&& factor) {
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double f = factor(g.wavevector(i));
    for (int c = 0; c < g.dim; ++c) v[c][i] *= f;
  }
}

}  // namespace serial

namespace parallel {

void leray_project(const Grid& g, Components v);
double sum_sq(const Grid& g, ConstComponents v);
double sum_ksq_sq(const Grid& g, ConstComponents v);
double sum_ksq_inner(const Grid& g, ConstComponents a, ConstComponents b);
double max_abs_divergence(const Grid& g, ConstComponents v);
void hermitian_symmetrize(const Grid& g, Components v);
void advect(std::size_t points, int dim, std::span<const Cplx* const> u,
            std::span<const Cplx* const> grad, std::span<Cplx* const> out);

template <class Factor>
void scale_modes(const Grid& g, Components v, Factor&& factor) {
  const auto n = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double f = factor(g.wavevector(ui));
    for (int c = 0; c < g.dim; ++c) v[c][ui] *= f;
  }
}

}  // namespace parallel

}  // namespace nsgap::kernels
