#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rwl/error.hpp"
#include "rwl/kernel.hpp"
#include "rwl/spectral_ops.hpp"
#include "rwl/transform.hpp"

using namespace rwl;
constexpr double pi = std::numbers::pi;

namespace {

ScalarField random_field(const SlabGrid& g, Layout layout, std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  ScalarField f(g, layout);
  for (double& x : f.values()) x = n(gen);
  return f;
}

WaveState random_symmetric(const SlabGrid& g, std::mt19937_64& gen) {
  ScalarField s = random_field(g, Layout::Volume, gen);
  VectorField V{{random_field(g, Layout::Volume, gen), random_field(g, Layout::Volume, gen),
                 random_field(g, Layout::Volume, gen)}};
  auto [s2, V2] = enforce_symmetry_class(s, V);
  return WaveState{s2, V2};
}

double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

WaveState minus(const WaveState& a, const WaveState& b) {
  return WaveState{a.s - b.s, VectorField{{a.V[0] - b.V[0], a.V[1] - b.V[1], a.V[2] - b.V[2]}}};
}

}  // namespace

TEST_CASE("vertical average") {
  const SlabGrid g = SlabGrid::make(pi, 8, 8, 8);
  const ScalarField flat = ScalarField::from_function(
      g, Layout::Volume, [](double x, double y, double) { return std::sin(x) + y; });
  const ScalarField wavy = ScalarField::from_function(
      g, Layout::Volume, [](double x, double, double z) { return std::cos(pi * z) * std::sin(x); });
  const ScalarField odd = ScalarField::from_function(
      g, Layout::Volume, [](double x, double, double z) { return std::sin(pi * z) * std::cos(x); });
  const auto [r, U] = vertical_average(flat, VectorField{{wavy, odd, odd}});
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) CHECK(r.at(i, j) == doctest::Approx(flat.at(i, j, 3)));
  CHECK(sup_norm(U[0]) < 1e-15);
  CHECK(sup_norm(U[1]) < 1e-15);
  CHECK(U.dim() == 2);
  CHECK(r.layout() == Layout::Planar);
}

TEST_CASE("kernel pairs satisfy the balance relation") {
  const SlabGrid g = SlabGrid::make(2 * pi, 32, 32, 4);
  std::mt19937_64 gen(1);
  const ScalarField q = random_field(g, Layout::Planar, gen);
  const KernelPair k = kernel_pair_from_stream(q);
  const VectorField gq = grad_h(q);
  const double scale = sup_norm(gq[0]);
  // omega x v + grad q = (-v2 + d1 q, v1 + d2 q)
  CHECK(max_diff(k.v[1], gq[0]) < 1e-12 * scale);
  CHECK(sup_norm(k.v[0] + gq[1]) < 1e-12 * scale);
  CHECK(sup_norm(div_h(k.v)) < 1e-12 * scale);
}

TEST_CASE("projection of a pure density mode") {
  const SlabGrid g = SlabGrid::make(2 * pi, 16, 16, 4);
  const ScalarField r = ScalarField::from_function(
      g, Layout::Volume, [](double x, double, double) { return std::cos(x); });
  const KernelPair k = project_to_kernel(r, VectorField::zeros(g, Layout::Volume, 3));
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) CHECK(std::abs(k.q.at(i, j) - 0.5 * r.at(i, j, 0)) < 1e-14);
}

TEST_CASE("projection is an orthogonal projection") {
  const SlabGrid g = SlabGrid::make(3.0, 16, 16, 8);
  std::mt19937_64 gen(42);
  const WaveState w = random_symmetric(g, gen);
  const KernelPair k = project_to_kernel(w.s, w.V);
  const WaveState kw = to_wave_state(k, g);
  const double scale = wave_inner(w, w);

  SUBCASE("idempotent") {
    const KernelPair kk = project_to_kernel(kw.s, kw.V);
    CHECK(max_diff(kk.q, k.q) < 1e-12 * sup_norm(k.q));
    CHECK(max_diff(kk.v[0], k.v[0]) < 1e-12 * sup_norm(k.v[0]));
    const KernelPair kp = project_to_kernel(k.q, k.v);
    CHECK(max_diff(kp.q, k.q) < 1e-12 * sup_norm(k.q));
  }
  SUBCASE("residual orthogonal to random kernel elements") {
    const WaveState res = minus(w, kw);
    for (int trial = 0; trial < 5; ++trial) {
      const KernelPair other = kernel_pair_from_stream(random_field(g, Layout::Planar, gen));
      const WaveState ow = to_wave_state(other, g);
      CHECK(std::abs(wave_inner(res, ow)) < 1e-10 * std::sqrt(scale * wave_inner(ow, ow)));
    }
  }
  SUBCASE("self-adjoint") {
    const WaveState z = random_symmetric(g, gen);
    const WaveState kz = to_wave_state(project_to_kernel(z.s, z.V), g);
    CHECK(std::abs(wave_inner(kw, z) - wave_inner(w, kz)) < 1e-10 * scale);
  }
  SUBCASE("linear") {
    const WaveState z = random_symmetric(g, gen);
    const KernelPair sum =
        project_to_kernel(w.s + z.s, VectorField{{w.V[0] + z.V[0], w.V[1] + z.V[1], w.V[2] + z.V[2]}});
    const KernelPair kz = project_to_kernel(z.s, z.V);
    CHECK(max_diff(sum.q, k.q + kz.q) < 1e-12 * sup_norm(sum.q));
  }
  SUBCASE("commutes with frequency cutoff") {
    const CutoffSpec c = CutoffSpec::from_delta(0.3);
    VectorField Vc;
    for (const ScalarField& x : w.V.c) Vc.c.push_back(apply_frequency_cutoff(x, c));
    const KernelPair a = project_to_kernel(apply_frequency_cutoff(w.s, c), Vc);
    CHECK(max_diff(a.q, apply_frequency_cutoff(k.q, c)) < 1e-12 * sup_norm(k.q));
  }
}

TEST_CASE("initial data decomposition") {
  const SlabGrid g = SlabGrid::make(2 * pi, 32, 32, 8);
  std::mt19937_64 gen(3);

  SUBCASE("kernel data has no wave part") {
    const ScalarField q = apply_frequency_cutoff(random_field(g, Layout::Planar, gen),
                                                 CutoffSpec::band(0.6, 2.0, 0));
    const KernelPair k = kernel_pair_from_stream(q);
    const ScalarField zero(g, Layout::Volume, Parity::Even);
    VectorField u{{extrude(k.v[0]), extrude(k.v[1]), ScalarField(g, Layout::Volume, Parity::Odd)}};
    const CutoffSpec c = CutoffSpec::band(0.25, 4.0, 4);
    const DataSplit d = decompose_initial_data(zero, u, c, 0.25);
    CHECK_FALSE(d.annihilated);
    // The kernel part carries the density that balances v.
    const double scale = sup_norm(k.v[0]);
    CHECK(sup_norm(d.V0[0] + (extrude(d.kernel.v[0]) - u[0])) < 1e-10 * scale);
  }

  SUBCASE("split invariants on random data") {
    const WaveState w = random_symmetric(g, gen);
    const CutoffSpec c = CutoffSpec::from_delta(0.25);
    const DataSplit d = decompose_initial_data(w.s, w.V, c, 0.25);
    const WaveState kw = to_wave_state(d.kernel, g);
    const WaveState ws{d.s0, d.V0};
    const double scale = std::sqrt(wave_inner(kw, kw) * wave_inner(ws, ws));
    CHECK(std::abs(wave_inner(kw, ws)) < 1e-10 * scale);
    CHECK(max_diff(d.s0 + extrude(d.kernel.q), d.rho1) < 1e-12 * sup_norm(d.rho1));
    CHECK(max_diff(d.V0[1] + extrude(d.kernel.v[1]), d.u[1]) < 1e-12 * sup_norm(d.u[1]));
    CHECK(sup_norm(d.V0[2] - d.u[2]) == 0.0);
  }

  SUBCASE("finer cutoffs approach the data") {
    const ScalarField f = ScalarField::from_function(
        g, Layout::Volume, [](double x, double y, double z) {
          return std::exp(-(x * x + y * y)) * (1.0 + 0.3 * std::cos(pi * z));
        });
    const VectorField u0 = VectorField::zeros(g, Layout::Volume, 3);
    double prev = 1e300;
    for (double delta : {0.5, 0.3, 0.15, 0.05}) {
      const DataSplit d = decompose_initial_data(f, u0, CutoffSpec::from_delta(delta), delta);
      const double err = l2_norm(d.rho1 - f);
      CHECK(err <= prev);
      prev = err;
    }
  }

  SUBCASE("annihilating cutoff returns a zero split") {
    const ScalarField f = ScalarField::from_function(
        g, Layout::Volume, [](double x, double, double) { return std::cos(x); });
    const DataSplit d = decompose_initial_data(f, VectorField::zeros(g, Layout::Volume, 3),
                                               CutoffSpec::band(20.0, 40.0, 4), 1.0);
    CHECK(d.annihilated);
    CHECK_FALSE(d.warning.empty());
    CHECK(sup_norm(d.s0) == 0.0);
  }
}

TEST_CASE("wave part stays orthogonal to the kernel") {
  const SlabGrid g = SlabGrid::make(2 * pi, 16, 16, 8);
  std::mt19937_64 gen(5);
  const WaveState w = random_symmetric(g, gen);
  const DataSplit d = decompose_initial_data(w.s, w.V, CutoffSpec::from_delta(0.3), 0.3);
  const WavePropagator prop(g);
  const WaveState wt = prop.propagate(WaveState{d.s0, d.V0}, 3.0, 0.2);
  const KernelPair k = project_to_kernel(wt.s, wt.V);
  CHECK(sup_norm(k.q) < 1e-10 * sup_norm(d.s0));
}
