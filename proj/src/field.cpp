#include "rwl/field.hpp"

#include <algorithm>
#include <cmath>

#include "rwl/error.hpp"

namespace rwl {

double Shape::cell() const {
  const double area = grid.dx() * grid.dy();
  return layout == Layout::Volume ? area * grid.dz() : area;
}

double Shape::measure() const {
  return layout == Layout::Volume ? grid.volume() : grid.horizontal_area();
}

void require_same_shape(const Shape& a, const Shape& b) {
  require(a == b, ErrorCode::GridMismatch, "fields live on different grids or layouts");
}

ScalarField::ScalarField(SlabGrid grid, Layout layout, Parity parity)
    : shape_{grid, layout}, parity_(parity), data_(shape_.size(), 0.0) {}

ScalarField ScalarField::from_function(SlabGrid grid, Layout layout,
                                       const std::function<double(double, double, double)>& f,
                                       Parity parity) {
  ScalarField out(grid, layout, parity);
  const Shape& s = out.shape();
  for (int i = 0; i < s.nx(); ++i)
    for (int j = 0; j < s.ny(); ++j)
      for (int l = 0; l < s.nz(); ++l) {
        const double z = layout == Layout::Volume ? grid.z(l) : 0.0;
        out.at(i, j, l) = f(grid.x(i), grid.y(j), z);
      }
  return out;
}

bool ScalarField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_shape(shape_, o.shape_);
  for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += o.data_[n];
  if (parity_ != o.parity_) parity_ = Parity::None;
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_shape(shape_, o.shape_);
  for (std::size_t n = 0; n < data_.size(); ++n) data_[n] -= o.data_[n];
  if (parity_ != o.parity_) parity_ = Parity::None;
  return *this;
}

ScalarField& ScalarField::operator*=(double a) {
  for (double& v : data_) v *= a;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double a, ScalarField b) { return b *= a; }

VectorField VectorField::zeros(SlabGrid grid, Layout layout, int dim) {
  require(dim == 2 || dim == 3, ErrorCode::InvalidArgument, "vector dimension must be 2 or 3");
  VectorField v;
  for (int n = 0; n < dim; ++n) v.c.emplace_back(grid, layout);
  return v;
}

SpectralField::SpectralField(SlabGrid grid, Layout layout)
    : shape_{grid, layout}, data_(shape_.size(), cplx(0.0, 0.0)) {}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_shape(shape_, o.shape_);
  for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += o.data_[n];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_shape(shape_, o.shape_);
  for (std::size_t n = 0; n < data_.size(); ++n) data_[n] -= o.data_[n];
  return *this;
}

SpectralField& SpectralField::operator*=(cplx a) {
  for (cplx& v : data_) v *= a;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(cplx a, SpectralField b) { return b *= a; }

double integral(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s * f.shape().cell();
}

double inner(const ScalarField& a, const ScalarField& b) {
  require_same_shape(a.shape(), b.shape());
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * b[n];
  return s * a.shape().cell();
}

double l2_norm(const ScalarField& f) { return std::sqrt(inner(f, f)); }

double lp_norm(const ScalarField& f, double p) {
  if (std::isinf(p)) return sup_norm(f);
  double s = 0.0;
  for (double v : f.values()) s += std::pow(std::abs(v), p);
  return std::pow(s * f.shape().cell(), 1.0 / p);
}

double sup_norm(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double mean(const ScalarField& f) { return integral(f) / f.shape().measure(); }

double inner(const VectorField& a, const VectorField& b) {
  require(a.dim() == b.dim(), ErrorCode::InvalidArgument, "vector dimensions differ");
  double s = 0.0;
  for (int n = 0; n < a.dim(); ++n) s += inner(a[n], b[n]);
  return s;
}

double l2_norm(const VectorField& v) { return std::sqrt(inner(v, v)); }

double spectral_energy(const SpectralField& f) {
  double s = 0.0;
  for (const cplx& c : f.values()) s += std::norm(c);
  return s;
}

cplx spectral_inner(const SpectralField& a, const SpectralField& b) {
  require_same_shape(a.shape(), b.shape());
  cplx s(0.0, 0.0);
  for (std::size_t n = 0; n < a.size(); ++n) s += std::conj(a[n]) * b[n];
  return s;
}

ScalarField extrude(const ScalarField& planar) {
  require(planar.layout() == Layout::Planar, ErrorCode::InvalidArgument,
          "extrude expects a planar field");
  ScalarField out(planar.grid(), Layout::Volume, Parity::Even);
  const Shape& s = out.shape();
  for (int i = 0; i < s.nx(); ++i)
    for (int j = 0; j < s.ny(); ++j)
      for (int l = 0; l < s.nz(); ++l) out.at(i, j, l) = planar.at(i, j);
  return out;
}

}  // namespace rwl
