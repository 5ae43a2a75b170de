#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "nsgap/grid.hpp"

namespace nsgap {

/// Owns a set of SIMD-aligned transform buffers and the two in-place FFTW
/// plans that act on them. Not shareable between threads; each solver or
/// worker keeps its own engine. Plan creation is serialized internally.
class FftEngine {
 public:
  FftEngine(const Grid& grid, int buffers);
  ~FftEngine();
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  const Grid& grid() const noexcept { return grid_; }
  int buffer_count() const noexcept { return static_cast<int>(buffers_.size()); }
  std::span<std::complex<double>> buffer(int i) noexcept;

  /// Coefficients -> physical values, v(x) = sum_k c_k exp(i k.x).
  void to_physical(int i);
  /// Physical values -> coefficients, normalized by 1/N.
  void to_spectral(int i);

 private:
  struct Buffer {
    std::complex<double>* data = nullptr;
  };
  Grid grid_;
  std::vector<Buffer> buffers_;
  void* forward_ = nullptr;
  void* backward_ = nullptr;
};

}  // namespace nsgap
