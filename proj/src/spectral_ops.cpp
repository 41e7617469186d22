#include "rwl/spectral_ops.hpp"

#include <cmath>

#include "rwl/error.hpp"
#include "rwl/transform.hpp"

namespace rwl {
namespace {

const cplx I(0.0, 1.0);

// Multiplies every coefficient by m(xi1, xi2, kappa).
template <class M>
SpectralField multiply(const SpectralField& f, M&& m) {
  const Shape& s = f.shape();
  const auto xi1 = s.grid.xi1();
  const auto xi2 = s.grid.xi2();
  const auto kap = s.grid.kappa();
  const bool volume = s.layout == Layout::Volume;
  SpectralField out(s.grid, s.layout);
  for (int i = 0; i < s.nx(); ++i)
    for (int j = 0; j < s.ny(); ++j)
      for (int l = 0; l < s.nz(); ++l) {
        const std::size_t n = s.index(i, j, l);
        out[n] = m(xi1[i], xi2[j], volume ? kap[l] : 0.0) * f[n];
      }
  return out;
}

Parity flip(Parity p) {
  switch (p) {
    case Parity::Even: return Parity::Odd;
    case Parity::Odd: return Parity::Even;
    default: return Parity::None;
  }
}

}  // namespace

SpectralField d_x1(const SpectralField& f) {
  return multiply(f, [](double a, double, double) { return I * a; });
}

SpectralField d_x2(const SpectralField& f) {
  return multiply(f, [](double, double b, double) { return I * b; });
}

SpectralField d_x3(const SpectralField& f) {
  return multiply(f, [](double, double, double k) { return I * k; });
}

std::vector<SpectralField> grad_h(const SpectralField& f) { return {d_x1(f), d_x2(f)}; }

SpectralField div_h(const SpectralField& v1, const SpectralField& v2) {
  require_same_shape(v1.shape(), v2.shape());
  return d_x1(v1) + d_x2(v2);
}

SpectralField curl_h(const SpectralField& v1, const SpectralField& v2) {
  require_same_shape(v1.shape(), v2.shape());
  return d_x1(v2) - d_x2(v1);
}

SpectralField laplace_h(const SpectralField& f) {
  return multiply(f, [](double a, double b, double) { return cplx(-(a * a + b * b), 0.0); });
}

SpectralField laplace(const SpectralField& f) {
  return multiply(
      f, [](double a, double b, double k) { return cplx(-(a * a + b * b + k * k), 0.0); });
}

std::vector<SpectralField> perp_grad_h(const SpectralField& f) {
  return {-1.0 * d_x2(f), d_x1(f)};
}

VectorField grad_h(const ScalarField& f) {
  const SpectralField fh = forward_transform(f);
  VectorField out;
  out.c.push_back(inverse_transform(d_x1(fh), f.parity()));
  out.c.push_back(inverse_transform(d_x2(fh), f.parity()));
  return out;
}

ScalarField div_h(const VectorField& v) {
  require(v.dim() >= 2, ErrorCode::InvalidArgument, "div_h needs two components");
  return inverse_transform(div_h(forward_transform(v[0]), forward_transform(v[1])),
                           v[0].parity());
}

ScalarField curl_h(const VectorField& v) {
  require(v.dim() >= 2, ErrorCode::InvalidArgument, "curl_h needs two components");
  return inverse_transform(curl_h(forward_transform(v[0]), forward_transform(v[1])),
                           v[0].parity());
}

ScalarField laplace_h(const ScalarField& f) {
  return inverse_transform(laplace_h(forward_transform(f)), f.parity());
}

VectorField perp_grad_h(const ScalarField& f) {
  const SpectralField fh = forward_transform(f);
  VectorField out;
  out.c.push_back(inverse_transform(-1.0 * d_x2(fh), f.parity()));
  out.c.push_back(inverse_transform(d_x1(fh), f.parity()));
  return out;
}

ScalarField d_x3(const ScalarField& f) {
  return inverse_transform(d_x3(forward_transform(f)), flip(f.parity()));
}

bool is_dealiased_mode(const Shape& s, int i, int j, int l) {
  auto kept = [](int idx, int n) { return 3 * std::abs(SlabGrid::signed_mode(idx, n)) <= n; };
  if (!kept(i, s.nx()) || !kept(j, s.ny())) return false;
  return s.layout == Layout::Planar || kept(l, s.nz());
}

void dealias(SpectralField& f) {
  const Shape& s = f.shape();
  for (int i = 0; i < s.nx(); ++i)
    for (int j = 0; j < s.ny(); ++j)
      for (int l = 0; l < s.nz(); ++l)
        if (!is_dealiased_mode(s, i, j, l)) f.at(i, j, l) = 0.0;
}

ScalarField dealiased_product(const ScalarField& a, const ScalarField& b) {
  require_same_shape(a.shape(), b.shape());
  SpectralField ah = forward_transform(a);
  SpectralField bh = forward_transform(b);
  dealias(ah);
  dealias(bh);
  ScalarField pa = inverse_transform(ah);
  const ScalarField pb = inverse_transform(bh);
  for (std::size_t n = 0; n < pa.size(); ++n) pa[n] *= pb[n];
  SpectralField ph = forward_transform(pa);
  dealias(ph);
  return inverse_transform(ph);
}

double horizontal_wavenumber(const SlabGrid& g, int i, int j) {
  const double dxi = g.dxi();
  const double a = SlabGrid::is_nyquist(i, g.nx()) ? 0.0 : dxi * SlabGrid::signed_mode(i, g.nx());
  const double b = SlabGrid::is_nyquist(j, g.ny()) ? 0.0 : dxi * SlabGrid::signed_mode(j, g.ny());
  return std::hypot(a, b);
}

SpectralField apply_frequency_cutoff(const SpectralField& f, const CutoffSpec& c) {
  c.validate();
  const Shape& s = f.shape();
  SpectralField out(s.grid, s.layout);
  for (int i = 0; i < s.nx(); ++i)
    for (int j = 0; j < s.ny(); ++j) {
      const double w = c.psi(horizontal_wavenumber(s.grid, i, j));
      for (int l = 0; l < s.nz(); ++l) {
        const bool vertical_ok = s.layout == Layout::Planar ||
                                 std::abs(SlabGrid::signed_mode(l, s.nz())) <= c.K;
        out.at(i, j, l) = vertical_ok ? w * f.at(i, j, l) : cplx(0.0, 0.0);
      }
    }
  return out;
}

ScalarField apply_frequency_cutoff(const ScalarField& f, const CutoffSpec& c) {
  return inverse_transform(apply_frequency_cutoff(forward_transform(f), c), f.parity());
}

ScalarField apply_spatial_cutoff(const ScalarField& f, const CutoffSpec& c) {
  c.validate();
  ScalarField out = f;
  const Shape& s = f.shape();
  for (int i = 0; i < s.nx(); ++i)
    for (int j = 0; j < s.ny(); ++j) {
      const double w = c.phi(std::hypot(s.grid.x(i), s.grid.y(j)));
      for (int l = 0; l < s.nz(); ++l) out.at(i, j, l) *= w;
    }
  return out;
}

namespace {

ScalarField reflect_combine(const ScalarField& f, double sign, Parity tag) {
  ScalarField out(f.grid(), f.layout(), tag);
  const Shape& s = f.shape();
  const int nz = s.nz();
  for (int i = 0; i < s.nx(); ++i)
    for (int j = 0; j < s.ny(); ++j)
      for (int l = 0; l < nz; ++l) {
        const int lr = (nz - l) % nz;  // z -> -z on the periodic grid
        out.at(i, j, l) = 0.5 * (f.at(i, j, l) + sign * f.at(i, j, lr));
      }
  return out;
}

}  // namespace

ScalarField even_part(const ScalarField& f) {
  if (f.layout() == Layout::Planar) {
    ScalarField out = f;
    out.set_parity(Parity::Even);
    return out;
  }
  return reflect_combine(f, 1.0, Parity::Even);
}

ScalarField odd_part(const ScalarField& f) {
  if (f.layout() == Layout::Planar) return ScalarField(f.grid(), Layout::Planar, Parity::Odd);
  return reflect_combine(f, -1.0, Parity::Odd);
}

std::pair<ScalarField, VectorField> enforce_symmetry_class(const ScalarField& rho,
                                                           const VectorField& u) {
  require(u.dim() == 3, ErrorCode::InvalidArgument, "symmetry class needs a 3-vector");
  require_same_shape(rho.shape(), u.shape());
  VectorField v;
  v.c.push_back(even_part(u[0]));
  v.c.push_back(even_part(u[1]));
  v.c.push_back(odd_part(u[2]));
  return {even_part(rho), std::move(v)};
}

}  // namespace rwl
