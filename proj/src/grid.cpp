#include "nsgap/grid.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

namespace nsgap {

std::size_t Grid::size() const noexcept {
  std::size_t s = 1;
  for (int d = 0; d < dim; ++d) s *= static_cast<std::size_t>(n);
  return s;
}

double Grid::spacing() const noexcept { return 2.0 * std::numbers::pi / n; }

double Grid::volume() const noexcept {
  double v = 1.0;
  for (int d = 0; d < dim; ++d) v *= 2.0 * std::numbers::pi;
  return v;
}

std::array<int, 3> Grid::wavevector(std::size_t index) const noexcept {
  std::array<int, 3> k{0, 0, 0};
  const auto un = static_cast<std::size_t>(n);
  for (int d = dim - 1; d >= 0; --d) {
    k[d] = signed_wavenumber(static_cast<int>(index % un), n);
    index /= un;
  }
  return k;
}

std::size_t Grid::mirror(std::size_t index) const noexcept {
  const auto un = static_cast<std::size_t>(n);
  std::size_t out = 0;
  std::size_t stride = 1;
  for (int d = dim - 1; d >= 0; --d) {
    const std::size_t i = index % un;
    index /= un;
    out += ((un - i) % un) * stride;
    stride *= un;
  }
  return out;
}

bool Grid::is_nyquist(std::size_t index) const noexcept {
  const auto un = static_cast<std::size_t>(n);
  for (int d = 0; d < dim; ++d) {
    if (index % un == un / 2) return true;
    index /= un;
  }
  return false;
}

Grid make_grid(int dim, int n) {
  if (dim != 2 && dim != 3) {
    throw std::invalid_argument("grid dimension must be 2 or 3, got " + std::to_string(dim));
  }
  if (n < 4 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("modes per axis must be a power of two >= 4, got " +
                                std::to_string(n));
  }
  return Grid{dim, n};
}

}  // namespace nsgap
