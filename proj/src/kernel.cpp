#include "rwl/kernel.hpp"

#include "rwl/error.hpp"
#include "rwl/spectral_ops.hpp"
#include "rwl/transform.hpp"

namespace rwl {
namespace {

ScalarField average(const ScalarField& f) {
  if (f.layout() == Layout::Planar) return f;
  ScalarField out(f.grid(), Layout::Planar, Parity::Even);
  const int nz = f.grid().nz();
  for (int i = 0; i < f.grid().nx(); ++i)
    for (int j = 0; j < f.grid().ny(); ++j) {
      double s = 0.0;
      for (int l = 0; l < nz; ++l) s += f.at(i, j, l);
      out.at(i, j) = s / nz;
    }
  return out;
}

bool all_zero(const ScalarField& f) {
  for (double x : f.values())
    if (x != 0.0) return false;
  return true;
}

}  // namespace

KernelPair kernel_pair_from_stream(const ScalarField& q) {
  require(q.layout() == Layout::Planar, ErrorCode::InvalidArgument,
          "kernel stream function must be planar");
  KernelPair k{q, perp_grad_h(q)};
  k.q.set_parity(Parity::Even);
  for (ScalarField& c : k.v.c) c.set_parity(Parity::Even);
  return k;
}

std::pair<ScalarField, VectorField> vertical_average(const ScalarField& r, const VectorField& U) {
  require(U.dim() >= 2, ErrorCode::InvalidArgument, "vertical_average needs a velocity");
  require(r.grid() == U.shape().grid, ErrorCode::GridMismatch, "vertical_average: grid mismatch");
  VectorField Uh;
  Uh.c.push_back(average(U[0]));
  Uh.c.push_back(average(U[1]));
  return {average(r), std::move(Uh)};
}

KernelPair project_to_kernel(const ScalarField& r, const VectorField& U) {
  const auto [rt, Ut] = vertical_average(r, U);
  const SpectralField rh = forward_transform(rt);
  const SpectralField curl = curl_h(forward_transform(Ut[0]), forward_transform(Ut[1]));
  SpectralField qh = rh - curl;
  const Shape& s = qh.shape();
  const auto xi1 = s.grid.xi1();
  const auto xi2 = s.grid.xi2();
  for (int i = 0; i < s.nx(); ++i)
    for (int j = 0; j < s.ny(); ++j) qh.at(i, j) /= 1.0 + xi1[i] * xi1[i] + xi2[j] * xi2[j];
  return kernel_pair_from_stream(inverse_transform(qh, Parity::Even));
}

WaveState to_wave_state(const KernelPair& k, const SlabGrid& grid) {
  require(k.q.grid() == grid, ErrorCode::GridMismatch, "kernel pair on a different grid");
  WaveState w{extrude(k.q), VectorField{}};
  w.V.c.push_back(extrude(k.v[0]));
  w.V.c.push_back(extrude(k.v[1]));
  w.V.c.push_back(ScalarField(grid, Layout::Volume, Parity::Odd));
  return w;
}

DataSplit decompose_initial_data(const ScalarField& rho1, const VectorField& u0,
                                 const CutoffSpec& c, double delta) {
  require(rho1.layout() == Layout::Volume && u0.dim() == 3, ErrorCode::InvalidArgument,
          "initial data must be a volume density and a 3-vector velocity");
  require_same_shape(rho1.shape(), u0.shape());
  c.validate();
  auto mollify = [&c](const ScalarField& f) {
    return apply_frequency_cutoff(apply_spatial_cutoff(f, c), c);
  };
  const ScalarField rho_d = mollify(rho1);
  VectorField u_d;
  for (const ScalarField& x : u0.c) u_d.c.push_back(mollify(x));

  bool empty = all_zero(rho_d);
  for (const ScalarField& x : u_d.c) empty = empty && all_zero(x);
  const SlabGrid& g = rho1.grid();
  if (empty) {
    DataSplit d{delta,
                rho_d,
                u_d,
                kernel_pair_from_stream(ScalarField(g, Layout::Planar, Parity::Even)),
                ScalarField(g, Layout::Volume, Parity::Even),
                VectorField::zeros(g, Layout::Volume, 3),
                true,
                "cutoff removes every resolved mode; returning a zero split"};
    return d;
  }

  KernelPair k = project_to_kernel(rho_d, u_d);
  ScalarField s0 = rho_d - extrude(k.q);
  VectorField V0;
  V0.c.push_back(u_d[0] - extrude(k.v[0]));
  V0.c.push_back(u_d[1] - extrude(k.v[1]));
  V0.c.push_back(u_d[2]);
  return DataSplit{delta, rho_d, u_d, std::move(k), std::move(s0), std::move(V0), false, {}};
}

double wave_inner(const WaveState& a, const WaveState& b) {
  double s = inner(a.s, b.s);
  for (int n = 0; n < 3; ++n) s += inner(a.V[n], b.V[n]);
  return s;
}

}  // namespace rwl
