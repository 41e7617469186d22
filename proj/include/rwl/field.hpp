#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rwl/grid.hpp"

namespace rwl {

using cplx = std::complex<double>;

/// Volume fields live on nx*ny*nz samples; planar fields depend on the
/// horizontal variables only and carry a single vertical sample.
enum class Layout { Volume, Planar };

/// Reflection symmetry in x3.
enum class Parity { None, Even, Odd };

/// Row-major sample layout shared by real and spectral fields: the vertical
/// index runs fastest, then y, then x.
struct Shape {
  SlabGrid grid;
  Layout layout;

  int nx() const { return grid.nx(); }
  int ny() const { return grid.ny(); }
  int nz() const { return layout == Layout::Volume ? grid.nz() : 1; }
  std::size_t size() const {
    return static_cast<std::size_t>(nx()) * ny() * nz();
  }
  std::size_t index(int i, int j, int l) const {
    return (static_cast<std::size_t>(i) * ny() + j) * nz() + l;
  }
  /// Integration weight of one sample (trapezoidal rule).
  double cell() const;
  /// Measure of the domain the field lives on.
  double measure() const;

  bool operator==(const Shape&) const = default;
};

void require_same_shape(const Shape& a, const Shape& b);

class ScalarField {
 public:
  ScalarField(SlabGrid grid, Layout layout, Parity parity = Parity::None);

  /// Samples f(x, y, z) on the grid; planar fields ignore z.
  static ScalarField from_function(SlabGrid grid, Layout layout,
                                   const std::function<double(double, double, double)>& f,
                                   Parity parity = Parity::None);

  const Shape& shape() const { return shape_; }
  const SlabGrid& grid() const { return shape_.grid; }
  Layout layout() const { return shape_.layout; }
  Parity parity() const { return parity_; }
  void set_parity(Parity p) { parity_ = p; }

  std::size_t size() const { return data_.size(); }
  double& operator[](std::size_t n) { return data_[n]; }
  double operator[](std::size_t n) const { return data_[n]; }
  double& at(int i, int j, int l = 0) { return data_[shape_.index(i, j, l)]; }
  double at(int i, int j, int l = 0) const { return data_[shape_.index(i, j, l)]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double a);

 private:
  Shape shape_;
  Parity parity_;
  std::vector<double> data_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double a, ScalarField b);

/// Two (horizontal) or three components sharing one shape.
struct VectorField {
  std::vector<ScalarField> c;

  static VectorField zeros(SlabGrid grid, Layout layout, int dim);

  int dim() const { return static_cast<int>(c.size()); }
  const Shape& shape() const { return c.front().shape(); }
  ScalarField& operator[](int n) { return c[n]; }
  const ScalarField& operator[](int n) const { return c[n]; }
};

/// Fourier coefficients in the unitary normalization
///   f_hat(m) = measure^{-1/2} * sum_x f(x) exp(-i kappa_m . (x - x0)) * cell,
/// with x0 = (-L, -L, -1) the grid origin, so that sum |f_hat|^2 equals the
/// trapezoidal L2 norm squared of f.
class SpectralField {
 public:
  SpectralField(SlabGrid grid, Layout layout);

  const Shape& shape() const { return shape_; }
  const SlabGrid& grid() const { return shape_.grid; }
  Layout layout() const { return shape_.layout; }

  std::size_t size() const { return data_.size(); }
  cplx& operator[](std::size_t n) { return data_[n]; }
  cplx operator[](std::size_t n) const { return data_[n]; }
  cplx& at(int i, int j, int l = 0) { return data_[shape_.index(i, j, l)]; }
  cplx at(int i, int j, int l = 0) const { return data_[shape_.index(i, j, l)]; }

  std::span<cplx> values() { return data_; }
  std::span<const cplx> values() const { return data_; }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(cplx a);

 private:
  Shape shape_;
  std::vector<cplx> data_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(cplx a, SpectralField b);

// Quadrature helpers (trapezoidal rule, exact for band-limited periodic data).
double integral(const ScalarField& f);
double inner(const ScalarField& a, const ScalarField& b);
double l2_norm(const ScalarField& f);
double lp_norm(const ScalarField& f, double p);
double sup_norm(const ScalarField& f);
double mean(const ScalarField& f);

double inner(const VectorField& a, const VectorField& b);
double l2_norm(const VectorField& v);

/// Sum of |coefficient|^2, equal to l2_norm^2 of the physical field.
double spectral_energy(const SpectralField& f);
cplx spectral_inner(const SpectralField& a, const SpectralField& b);

/// Planar field replicated along x3 as a volume field.
ScalarField extrude(const ScalarField& planar);

}  // namespace rwl
