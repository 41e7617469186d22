#include "rwl/presets.hpp"

#include <cmath>

#include "rwl/cutoff.hpp"
#include "rwl/error.hpp"
#include "rwl/rng.hpp"
#include "rwl/spectral_ops.hpp"
#include "rwl/transform.hpp"

namespace rwl {
namespace {

double gauss(double x, double y, double w) { return std::exp(-(x * x + y * y) / (2.0 * w * w)); }

void require_width(double w) {
  require(w > 0.0, ErrorCode::InvalidArgument, "preset width must be positive");
}

}  // namespace

ScalarField gaussian_monopole(const SlabGrid& g, double amplitude, double width, double x0,
                              double y0) {
  require_width(width);
  return ScalarField::from_function(
      g, Layout::Planar,
      [=](double x, double y, double) { return amplitude * gauss(x - x0, y - y0, width); },
      Parity::Even);
}

ScalarField vortex_dipole(const SlabGrid& g, double amplitude, double width, double separation) {
  require_width(width);
  const double h = 0.5 * separation;
  return ScalarField::from_function(
      g, Layout::Planar,
      [=](double x, double y, double) {
        return amplitude * (gauss(x - h, y, width) - gauss(x + h, y, width));
      },
      Parity::Even);
}

ScalarField vortex_pair(const SlabGrid& g, double amplitude, double width, double separation) {
  require_width(width);
  const double h = 0.5 * separation;
  return ScalarField::from_function(
      g, Layout::Planar,
      [=](double x, double y, double) {
        return amplitude * (gauss(x - h, y, width) + 0.6 * gauss(x + h, y, 0.8 * width));
      },
      Parity::Even);
}

ScalarField random_band_limited(const SlabGrid& g, double kmin, double kmax, double amplitude,
                                std::uint64_t seed) {
  require(kmin >= 0.0 && kmax > kmin, ErrorCode::InvalidArgument, "invalid random band");
  SplitMix64 rng(seed);
  ScalarField f(g, Layout::Planar);
  for (double& x : f.values()) x = rng.normal();
  SpectralField fh = forward_transform(f);
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      const double r = horizontal_wavenumber(g, i, j);
      const bool nyq = SlabGrid::is_nyquist(i, g.nx()) || SlabGrid::is_nyquist(j, g.ny());
      if (nyq || r < kmin || r > kmax) fh.at(i, j) = 0.0;
    }
  ScalarField out = inverse_transform(fh, Parity::Even);
  const double s = sup_norm(out);
  require(s > 0.0, ErrorCode::InvalidArgument, "random band contains no resolved modes");
  out *= amplitude / s;
  return out;
}

ScalarField gaussian_hill(const SlabGrid& g, double amplitude, double width) {
  require_width(width);
  return ScalarField::from_function(
      g, Layout::Volume, [=](double x, double y, double) { return amplitude * gauss(x, y, width); },
      Parity::Even);
}

WaveSpectrum acoustic_pulse(const SlabGrid& g, double a, double b, int n, double amplitude) {
  require(0.0 < a && a < b, ErrorCode::InvalidArgument, "pulse band needs 0 < a < b");
  require(n >= 0 && 2 * n < g.nz(), ErrorCode::InvalidArgument,
          "pulse vertical mode is not resolved");
  const CutoffSpec band = CutoffSpec::band(a, b, n);
  WaveSpectrum w{{SpectralField(g, Layout::Volume), SpectralField(g, Layout::Volume),
                  SpectralField(g, Layout::Volume), SpectralField(g, Layout::Volume)}};
  // cos(pi n x3) in the basis exp(i kappa (x3 + 1)).
  const double vz = n == 0 ? 1.0 : 0.5 * (n % 2 == 0 ? 1.0 : -1.0);
  const int lp = n;
  const int lm = (g.nz() - n) % g.nz();
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j) {
      if (SlabGrid::is_nyquist(i, g.nx()) || SlabGrid::is_nyquist(j, g.ny())) continue;
      const double p = band.psi(horizontal_wavenumber(g, i, j));
      if (p == 0.0) continue;
      // Centre at x_h = 0 relative to the grid origin (-L, -L).
      const int m = SlabGrid::signed_mode(i, g.nx()) + SlabGrid::signed_mode(j, g.ny());
      const double c = p * vz * (m % 2 == 0 ? 1.0 : -1.0);
      w.c[0].at(i, j, lp) = c;
      w.c[0].at(i, j, lm) = c;
    }
  const double s = sup_norm(inverse_transform(w.c[0]));
  require(s > 0.0, ErrorCode::InvalidArgument, "pulse band contains no resolved modes");
  w.c[0] *= cplx(amplitude / s);
  return w;
}

}  // namespace rwl
