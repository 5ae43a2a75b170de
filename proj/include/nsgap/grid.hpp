#pragma once

#include <array>
#include <cstddef>

namespace nsgap {

/// Periodic box [0, 2*pi)^dim resolved by n Fourier modes per axis.
///
/// Coefficients are stored in FFTW order: the flat index is row-major over
/// (x, y[, z]) and axis index i maps to wavenumber i for i < n/2 and i - n
/// above. The Nyquist plane i == n/2 is kept identically zero by every
/// operation in the library.
struct Grid {
  int dim = 2;
  int n = 0;

  std::size_t size() const noexcept;
  /// Grid spacing in physical space.
  double spacing() const noexcept;
  /// (2*pi)^dim, the factor between coefficient sums and L2 integrals.
  double volume() const noexcept;

  /// Integer wavevector of a flat index; unused trailing entries are zero.
  std::array<int, 3> wavevector(std::size_t index) const noexcept;
  /// Flat index of the mode -k for the mode stored at `index`.
  std::size_t mirror(std::size_t index) const noexcept;
  /// True when any axis sits on the Nyquist wavenumber.
  bool is_nyquist(std::size_t index) const noexcept;

  bool operator==(const Grid&) const = default;
};

/// Validates and builds a grid. Throws std::invalid_argument unless
/// dim is 2 or 3 and n is a power of two no smaller than 4.
Grid make_grid(int dim, int n);

inline int signed_wavenumber(int i, int n) noexcept { return i < n / 2 ? i : i - n; }

}  // namespace nsgap
