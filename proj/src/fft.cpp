#include "nsgap/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace nsgap {
namespace {

// The FFTW planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FftEngine::FftEngine(const Grid& grid, int buffers) : grid_(grid) {
  if (buffers < 1) throw std::invalid_argument("FftEngine needs at least one buffer");
  const std::size_t n = grid.size();
  buffers_.resize(static_cast<std::size_t>(buffers));
  for (auto& b : buffers_) {
    b.data = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n));
    if (b.data == nullptr) throw std::bad_alloc();
    std::fill(b.data, b.data + n, std::complex<double>{});
  }
  int dims[3] = {grid.n, grid.n, grid.n};
  auto* first = reinterpret_cast<fftw_complex*>(buffers_.front().data);
  std::lock_guard lock(planner_mutex());
  // ESTIMATE keeps plan selection deterministic run to run.
  forward_ = fftw_plan_dft(grid.dim, dims, first, first, FFTW_FORWARD, FFTW_ESTIMATE);
  backward_ = fftw_plan_dft(grid.dim, dims, first, first, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (forward_ == nullptr || backward_ == nullptr) {
    throw std::runtime_error("FFTW failed to create a plan");
  }
}

FftEngine::~FftEngine() {
  {
    std::lock_guard lock(planner_mutex());
    if (forward_) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
    if (backward_) fftw_destroy_plan(static_cast<fftw_plan>(backward_));
  }
  for (auto& b : buffers_) fftw_free(b.data);
}

std::span<std::complex<double>> FftEngine::buffer(int i) noexcept {
  return {buffers_[static_cast<std::size_t>(i)].data, grid_.size()};
}

void FftEngine::to_physical(int i) {
  auto* p = reinterpret_cast<fftw_complex*>(buffers_[static_cast<std::size_t>(i)].data);
  fftw_execute_dft(static_cast<fftw_plan>(backward_), p, p);
}

void FftEngine::to_spectral(int i) {
  auto* p = reinterpret_cast<fftw_complex*>(buffers_[static_cast<std::size_t>(i)].data);
  fftw_execute_dft(static_cast<fftw_plan>(forward_), p, p);
  const double scale = 1.0 / static_cast<double>(grid_.size());
  auto* c = buffers_[static_cast<std::size_t>(i)].data;
  for (std::size_t j = 0; j < grid_.size(); ++j) c[j] *= scale;
}

}  // namespace nsgap
