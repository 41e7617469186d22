#pragma once

#include <vector>

#include "rwl/field.hpp"

namespace rwl {

/// Unitary forward transform (see SpectralField for the normalization).
/// Throws Error(NonFinite) on NaN/Inf samples.
SpectralField forward_transform(const ScalarField& f);

/// Inverse of forward_transform; the imaginary round-off is discarded.
ScalarField inverse_transform(const SpectralField& f, Parity parity = Parity::None);

/// Inverse transform keeping complex samples.
std::vector<cplx> inverse_transform_complex(const SpectralField& f);

std::vector<SpectralField> forward_transform(const VectorField& v);
VectorField inverse_transform(const std::vector<SpectralField>& v);

}  // namespace rwl
