#pragma once

#include <cstdint>

#include "rwl/field.hpp"
#include "rwl/wave.hpp"

namespace rwl {

// Initial-data library. Planar fields are stream functions on the horizontal
// torus; wave data is returned in spectral form so that its support is exact.

ScalarField gaussian_monopole(const SlabGrid& g, double amplitude, double width, double x0 = 0.0,
                              double y0 = 0.0);

/// Opposite-signed Gaussians at (+-separation/2, 0).
ScalarField vortex_dipole(const SlabGrid& g, double amplitude, double width, double separation);

/// Two same-signed Gaussians at (+-separation/2, 0) with unequal widths, a
/// co-rotating pair that evolves non-trivially.
ScalarField vortex_pair(const SlabGrid& g, double amplitude, double width, double separation);

/// Normal random field restricted to kmin <= |xi| <= kmax, scaled to the
/// given sup norm.
ScalarField random_band_limited(const SlabGrid& g, double kmin, double kmax, double amplitude,
                                std::uint64_t seed);

/// Smooth Gaussian hill in x_h, even in x3, for the forcing potential G.
ScalarField gaussian_hill(const SlabGrid& g, double amplitude, double width);

/// Radially symmetric pulse s0 centred at the origin with s0_hat supported in
/// a < |xi| < b and vertical profile cos(pi n x3); V0 = 0. The result is
/// normalized so that sup |s0| = amplitude.
WaveSpectrum acoustic_pulse(const SlabGrid& g, double a, double b, int n, double amplitude);

}  // namespace rwl
