#pragma once

#include <cstddef>
#include <vector>

namespace rwl {

/// Discretization of the slab [-L, L)^2 x [-1, 1) with periodic identification
/// in every direction. The vertical period is 2, so vertical wavenumbers are
/// kappa_n = pi * n.
///
/// Spectral index i on an axis of size N maps to the signed mode m(i) = i for
/// i < N/2 and i - N otherwise; m = -N/2 is the Nyquist mode. Derivative
/// multipliers treat the Nyquist wavenumber as zero (see wavenumber()).
class SlabGrid {
 public:
  /// Validates L > 0 and even sizes >= 4; throws Error(InvalidArgument).
  static SlabGrid make(double L, int nx, int ny, int nz);

  double L() const { return L_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }

  double dx() const { return 2.0 * L_ / nx_; }
  double dy() const { return 2.0 * L_ / ny_; }
  double dz() const { return 2.0 / nz_; }
  double horizontal_area() const { return 4.0 * L_ * L_; }
  double volume() const { return 2.0 * horizontal_area(); }

  /// pi / L, the horizontal wavenumber quantum.
  double dxi() const;

  std::size_t horizontal_size() const { return static_cast<std::size_t>(nx_) * ny_; }
  std::size_t volume_size() const { return horizontal_size() * nz_; }

  double x(int i) const { return -L_ + i * dx(); }
  double y(int j) const { return -L_ + j * dy(); }
  double z(int l) const { return -1.0 + l * dz(); }

  static int signed_mode(int i, int n) { return i < n / 2 ? i : i - n; }
  static bool is_nyquist(int i, int n) { return i == n / 2; }

  /// Raw signed wavenumbers per axis, Nyquist included: (pi/L) * m.
  std::vector<double> raw_xi1() const;
  std::vector<double> raw_xi2() const;
  /// Raw vertical wavenumbers pi * n.
  std::vector<double> raw_kappa() const;

  /// Wavenumbers used by every Fourier multiplier: raw values with the
  /// Nyquist entry replaced by zero.
  std::vector<double> xi1() const;
  std::vector<double> xi2() const;
  std::vector<double> kappa() const;

  bool operator==(const SlabGrid&) const = default;

 private:
  SlabGrid(double L, int nx, int ny, int nz) : L_(L), nx_(nx), ny_(ny), nz_(nz) {}

  double L_;
  int nx_;
  int ny_;
  int nz_;
};

}  // namespace rwl
