#include "nsgap/kernels.hpp"


#include <algorithm>
#include <cmath>
#include <vector>

namespace nsgap::kernels {
namespace {

inline void project_mode(const Grid& g, Components& v, std::size_t i) {
  const auto k = g.wavevector(i);
  const double k2 = ksq(k);
  if (k2 == 0.0 || g.is_nyquist(i)) {
    for (int c = 0; c < g.dim; ++c) v[c][i] = 0.0;
    return;
  }
  Cplx kv = 0.0;
  for (int c = 0; c < g.dim; ++c) kv += static_cast<double>(k[c]) * v[c][i];
  const Cplx s = kv / k2;
  for (int c = 0; c < g.dim; ++c) v[c][i] -= static_cast<double>(k[c]) * s;
}

inline double divergence_at(const Grid& g, const ConstComponents& v, std::size_t i) {
  const auto k = g.wavevector(i);
  Cplx kv = 0.0;
  for (int c = 0; c < g.dim; ++c) kv += static_cast<double>(k[c]) * v[c][i];
  return std::abs(kv);
}

inline void symmetrize_pair(const Grid& g, Components& v, std::size_t i) {
  const std::size_t j = g.mirror(i);
  if (j < i) return;
  for (int c = 0; c < g.dim; ++c) {
    if (i == j) {
      v[c][i] = v[c][i].real();
    } else {
      const Cplx a = 0.5 * (v[c][i] + std::conj(v[c][j]));
      v[c][i] = a;
      v[c][j] = std::conj(a);
    }
  }
}

// Blocked reduction with a thread-count independent summation order.
template <class Term>
double blocked_sum(std::size_t n, Term&& term) {
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

template <class Term>
double blocked_max(std::size_t n, Term&& term) {
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s = std::max(s, term(i));
    partial[static_cast<std::size_t>(b)] = s;
  }
  double m = 0.0;
  for (double p : partial) m = std::max(m, p);
  return m;
}

inline double sq_term(const Grid& g, const ConstComponents& v, std::size_t i) {
  double s = 0.0;
  for (int c = 0; c < g.dim; ++c) s += std::norm(v[c][i]);
  return s;
}

inline double ksq_sq_term(const Grid& g, const ConstComponents& v, std::size_t i) {
  return ksq(g.wavevector(i)) * sq_term(g, v, i);
}

inline double ksq_inner_term(const Grid& g, const ConstComponents& a, const ConstComponents& b,
                             std::size_t i) {
  double s = 0.0;
  for (int c = 0; c < g.dim; ++c) s += (std::conj(a[c][i]) * b[c][i]).real();
  return ksq(g.wavevector(i)) * s;
}

inline void advect_point(std::size_t p, int dim, std::span<const Cplx* const> u,
                         std::span<const Cplx* const> grad, std::span<Cplx* const> out) {
  for (int i = 0; i < dim; ++i) {
    double s = 0.0;
    for (int j = 0; j < dim; ++j) s += u[j][p].real() * grad[i * dim + j][p].real();
    out[i][p] = s;
  }
}

}  // namespace

namespace serial {

void leray_project(const Grid& g, Components v) {
  for (std::size_t i = 0; i < g.size(); ++i) project_mode(g, v, i);
}

double sum_sq(const Grid& g, ConstComponents v) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += sq_term(g, v, i);
  return s;
}

double sum_ksq_sq(const Grid& g, ConstComponents v) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += ksq_sq_term(g, v, i);
  return s;
}

double sum_ksq_inner(const Grid& g, ConstComponents a, ConstComponents b) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += ksq_inner_term(g, a, b, i);
  return s;
}

double max_abs_divergence(const Grid& g, ConstComponents v) {
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) m = std::max(m, divergence_at(g, v, i));
  return m;
}

void hermitian_symmetrize(const Grid& g, Components v) {
  for (std::size_t i = 0; i < g.size(); ++i) symmetrize_pair(g, v, i);
}

void advect(std::size_t points, int dim, std::span<const Cplx* const> u,
            std::span<const Cplx* const> grad, std::span<Cplx* const> out) {
  for (std::size_t p = 0; p < points; ++p) advect_point(p, dim, u, grad, out);
}

}  // namespace serial

namespace parallel {

void leray_project(const Grid& g, Components v) {
  const auto n = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) project_mode(g, v, static_cast<std::size_t>(i));
}

double sum_sq(const Grid& g, ConstComponents v) {
  return blocked_sum(g.size(), [&](std::size_t i) { return sq_term(g, v, i); });
}

double sum_ksq_sq(const Grid& g, ConstComponents v) {
  return blocked_sum(g.size(), [&](std::size_t i) { return ksq_sq_term(g, v, i); });
}

double sum_ksq_inner(const Grid& g, ConstComponents a, ConstComponents b) {
  return blocked_sum(g.size(), [&](std::size_t i) { return ksq_inner_term(g, a, b, i); });
}

double max_abs_divergence(const Grid& g, ConstComponents v) {
  return blocked_max(g.size(), [&](std::size_t i) { return divergence_at(g, v, i); });
}

void hermitian_symmetrize(const Grid& g, Components v) {
  // Each pair is owned by its lower index, so iterations never collide.
  const auto n = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) symmetrize_pair(g, v, static_cast<std::size_t>(i));
}

void advect(std::size_t points, int dim, std::span<const Cplx* const> u,
            std::span<const Cplx* const> grad, std::span<Cplx* const> out) {
  const auto n = static_cast<std::ptrdiff_t>(points);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < n; ++p) advect_point(static_cast<std::size_t>(p), dim, u, grad, out);
}

}  // namespace parallel

}  // namespace nsgap::kernels
