#pragma once

#include <utility>
#include <vector>

#include "rwl/cutoff.hpp"
#include "rwl/field.hpp"

namespace rwl {

// Spectral-space differential operators. Each is an exact Fourier multiplier:
//   grad_h: (i xi1, i xi2)     div_h: i xi . v     curl_h: i xi1 v2 - i xi2 v1
//   laplace_h: -|xi|^2         perp_grad_h: (-i xi2, i xi1)     d_x3: i kappa
// Compositions in spectral space are therefore exact identities.

std::vector<SpectralField> grad_h(const SpectralField& f);
SpectralField div_h(const SpectralField& v1, const SpectralField& v2);
SpectralField curl_h(const SpectralField& v1, const SpectralField& v2);
SpectralField laplace_h(const SpectralField& f);
std::vector<SpectralField> perp_grad_h(const SpectralField& f);
SpectralField d_x3(const SpectralField& f);
SpectralField d_x1(const SpectralField& f);
SpectralField d_x2(const SpectralField& f);
/// Full 3D Laplacian (horizontal plus vertical) of a volume field.
SpectralField laplace(const SpectralField& f);

// Physical-space wrappers (transform, multiply, transform back).
VectorField grad_h(const ScalarField& f);
ScalarField div_h(const VectorField& v);
ScalarField curl_h(const VectorField& v);
ScalarField laplace_h(const ScalarField& f);
VectorField perp_grad_h(const ScalarField& f);
ScalarField d_x3(const ScalarField& f);

/// 2/3-rule truncation: zero every coefficient with 3|m| > N on any axis
/// (vertical axis included for volume fields).
void dealias(SpectralField& f);
bool is_dealiased_mode(const Shape& s, int i, int j, int l);

/// Pointwise product evaluated pseudo-spectrally from dealiased factors;
/// the result is dealiased as well.
ScalarField dealiased_product(const ScalarField& a, const ScalarField& b);

/// |xi| of the mode at (i, j), Nyquist convention applied.
double horizontal_wavenumber(const SlabGrid& g, int i, int j);

/// Multiplies each coefficient by psi(|xi|) and zeroes vertical modes with
/// |n| > K.
SpectralField apply_frequency_cutoff(const SpectralField& f, const CutoffSpec& c);
ScalarField apply_frequency_cutoff(const ScalarField& f, const CutoffSpec& c);

/// Pointwise product with phi(|x_h|).
ScalarField apply_spatial_cutoff(const ScalarField& f, const CutoffSpec& c);

/// Even part in x3 of a volume field; planar fields are returned unchanged.
ScalarField even_part(const ScalarField& f);
/// Odd part in x3 of a volume field; planar fields map to zero.
ScalarField odd_part(const ScalarField& f);

/// Projection onto the reflection-symmetry class: rho, u1, u2 even in x3,
/// u3 odd. Idempotent and self-adjoint in L2.
std::pair<ScalarField, VectorField> enforce_symmetry_class(const ScalarField& rho,
                                                           const VectorField& u);

}  // namespace rwl
