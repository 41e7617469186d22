#pragma once

#include <string>
#include <utility>

#include "rwl/cutoff.hpp"
#include "rwl/field.hpp"
#include "rwl/wave.hpp"

namespace rwl {

/// Element of the null space of the wave generator: a planar stream function
/// q and the horizontal velocity v = (-d2 q, d1 q), v3 = 0.
struct KernelPair {
  ScalarField q;
  VectorField v;
};

/// Builds (q, perp_grad_h q) from a planar stream function.
KernelPair kernel_pair_from_stream(const ScalarField& q);

/// Average over one vertical period. For symmetric data this equals the
/// integral over [0, 1]. The vertical velocity component is dropped.
std::pair<ScalarField, VectorField> vertical_average(const ScalarField& r, const VectorField& U);

/// Orthogonal L2 projection onto the null space. Per horizontal mode
///   q_hat = (r_hat - curl_h U_hat) / (1 + |xi|^2),  curl_h U = d1 U2 - d2 U1,
/// of the vertically averaged data, which is the minimizer of
/// |q - r|^2 + |v - U_h|^2 under omega x v + grad q = 0.
KernelPair project_to_kernel(const ScalarField& r, const VectorField& U);

/// The pair extruded to a volume wave state (s = q, V = (v1, v2, 0)).
WaveState to_wave_state(const KernelPair& k, const SlabGrid& grid);

/// Mollified initial data split into a kernel part and an orthogonal wave part.
struct DataSplit {
  double delta = 0.0;
  ScalarField rho1;  // [rho0^(1)]_delta
  VectorField u;     // [u0]_delta
  KernelPair kernel;
  ScalarField s0;
  VectorField V0;
  /// Set when the cutoff removed every resolved mode; all fields are zero.
  bool annihilated = false;
  std::string warning;
};

/// Spatial cutoff, then frequency cutoff with the vertical mode bound, then
/// projection: s0 = [rho1]_delta - q, V0 = [u0]_delta - v.
DataSplit decompose_initial_data(const ScalarField& rho1, const VectorField& u0,
                                 const CutoffSpec& c, double delta = 0.0);

/// <a, b> in L2 over the volume for (s, V) pairs.
double wave_inner(const WaveState& a, const WaveState& b);

}  // namespace rwl
