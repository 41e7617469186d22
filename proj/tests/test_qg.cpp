#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "rwl/error.hpp"
#include "rwl/presets.hpp"
#include "rwl/qg.hpp"
#include "rwl/spectral_ops.hpp"
#include "rwl/transform.hpp"

using namespace rwl;
constexpr double pi = std::numbers::pi;

namespace {

double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

SlabGrid torus(int n = 64) { return SlabGrid::make(2.0 * pi, n, n, 4); }

}  // namespace

TEST_CASE("kernel velocity is divergence free and balanced") {
  const SlabGrid g = torus();
  const ScalarField q = vortex_pair(g, 1.0, 1.0, 2.0);
  const VectorField v = perp_grad_h(q);
  CHECK(sup_norm(div_h(v)) < 1e-12);
  // omega x v + grad q = (-v2 + d1 q, v1 + d2 q)
  const VectorField gq = grad_h(q);
  CHECK(sup_norm(gq[0] - v[1]) < 1e-12);
  CHECK(sup_norm(gq[1] + v[0]) < 1e-12);
}

TEST_CASE("tendency vanishes on steady states") {
  const SlabGrid g = torus();
  SUBCASE("radial vortex") {
    const ScalarField q = gaussian_monopole(g, 1.0, 0.8);
    CHECK(sup_norm(qg_rhs(q)) < 1e-12);
  }
  SUBCASE("single Fourier mode") {
    const ScalarField q = ScalarField::from_function(
        g, Layout::Planar, [](double x, double y, double) { return std::cos(1.5 * x + 0.5 * y); });
    CHECK(sup_norm(qg_rhs(q)) < 1e-12);
  }
}

TEST_CASE("Jacobian antisymmetry and equivalent forms") {
  const SlabGrid g = torus();
  const ScalarField q = random_band_limited(g, 0.5, 6.0, 1.0, 42);
  const ScalarField r = qg_rhs(q);
  const ScalarField P = potential_vorticity(q);
  // int q (v . grad P) = -int P (v . grad q) = 0
  CHECK(std::abs(inner(q, r)) < 1e-10 * l2_norm(q) * l2_norm(r));
  CHECK(std::abs(integral(r)) < 1e-10 * l2_norm(r));
  const ScalarField r2 = qg_rhs_laplacian_form(q);
  CHECK(max_diff(r, r2) < 1e-12 * sup_norm(r));
  CHECK(l2_norm(P) > 0.0);
}

TEST_CASE("Helmholtz inversion") {
  SUBCASE("known mode") {
    // xi0 = (sqrt 3, 0) on a torus of half-width pi / sqrt 3
    const SlabGrid g = SlabGrid::make(pi / std::sqrt(3.0), 16, 16, 4);
    const double k = std::sqrt(3.0);
    const ScalarField P = ScalarField::from_function(
        g, Layout::Planar, [&](double x, double, double) { return -std::cos(k * x); });
    const ScalarField q = invert_helmholtz(P);
    const ScalarField expect = ScalarField::from_function(
        g, Layout::Planar, [&](double x, double, double) { return std::cos(k * x) / 4.0; });
    CHECK(max_diff(q, expect) < 1e-14);
  }
  SUBCASE("round trip") {
    const SlabGrid g = torus();
    const ScalarField P = random_band_limited(g, 0.0, 10.0, 1.0, 9);
    CHECK(max_diff(potential_vorticity(invert_helmholtz(P)), P) < 1e-12);
  }
  SUBCASE("constant") {
    const SlabGrid g = torus(16);
    ScalarField P(g, Layout::Planar);
    for (double& x : P.values()) x = 2.5;
    const ScalarField q = invert_helmholtz(P);
    for (double x : q.values()) CHECK(x == doctest::Approx(-2.5).epsilon(1e-14));
  }
}

TEST_CASE("time stepping") {
  const SlabGrid g = torus();
  SUBCASE("radial vortex is a fixed point") {
    const ScalarField q = gaussian_monopole(g, 1.0, 0.8);
    CHECK(max_diff(qg_step(q, 0.05), q) < 1e-13);
  }
  SUBCASE("fourth-order self convergence") {
    const ScalarField q0 = vortex_pair(g, 0.5, 1.0, 2.0);
    const double T = 0.4;
    auto run = [&](int n) {
      ScalarField q = q0;
      for (int k = 0; k < n; ++k) q = qg_step(q, T / n);
      return q;
    };
    const ScalarField ref = run(256);
    const double e1 = l2_norm(run(4) - ref), e2 = l2_norm(run(8) - ref);
    const double ratio = e1 / e2;
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
  }
  SUBCASE("energy drift per step on a resolved state") {
    const ScalarField q = vortex_pair(g, 0.5, 1.0, 2.0);
    const double dt = 0.4 * 0.5 * g.dx() / qg_max_speed(q);
    const double e0 = qg_energy(q);
    CHECK(std::abs(qg_energy(qg_step(q, dt)) - e0) / e0 < 1e-10);
  }
  SUBCASE("CFL violation") {
    const ScalarField q = vortex_pair(g, 0.5, 1.0, 2.0);
    const double limit = 0.5 * g.dx() / qg_max_speed(q);
    CHECK_NOTHROW(qg_step(q, 0.99 * limit));
    try {
      qg_step(q, 1.5 * limit);
      FAIL("expected a CFL error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CflViolation);
    }
  }
}

TEST_CASE("trajectory invariants") {
  const SlabGrid g = torus();
  const ScalarField q0 = vortex_pair(g, 0.5, 1.0, 2.0);
  const QGTrajectory tr = run_qg(q0, 2.0, 0.05, 10);
  REQUIRE_FALSE(tr.aborted);
  CHECK(tr.energy_drift() < 1e-8);
  CHECK(tr.pv_l2_drift() < 1e-8);
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    CHECK(std::abs(tr.pv_l4[k] - tr.pv_l4.front()) < 1e-7 * tr.pv_l4.front());
    CHECK(std::abs(tr.pv_mean[k] - tr.pv_mean.front()) < 1e-13);
  }
  CHECK_FALSE(tr.under_resolved);
  CHECK(tr.snapshot_times.front() == 0.0);
  CHECK(tr.snapshot_times.back() == doctest::Approx(2.0));
  CHECK(tr.snapshots.size() == 5);
  // The changed vortex pair has really moved.
  CHECK(max_diff(tr.snapshots.back(), q0) > 1e-3);
}

TEST_CASE("step is adjusted to divide T") {
  const SlabGrid g = torus(32);
  const QGTrajectory tr = run_qg(gaussian_monopole(g, 0.5, 1.0), 1.0, 0.3, 1);
  CHECK(tr.dt == doctest::Approx(0.25));
  CHECK(tr.times.size() == 5);
}

TEST_CASE("radial vortex stays put over a long run") {
  const SlabGrid g = torus();
  const ScalarField q0 = gaussian_monopole(g, 1.0, 0.8);
  const QGTrajectory tr = run_qg(q0, 10.0, 0.1, 100);
  CHECK(max_diff(tr.snapshots.back(), q0) < 1e-8 * sup_norm(q0));
}

TEST_CASE("resolution monitor and failure handling") {
  const SlabGrid g = torus(32);
  SUBCASE("rough data is flagged") {
    const ScalarField q = random_band_limited(g, 4.0, 16.0, 0.01, 3);
    CHECK(qg_tail_fraction(q) > 1e-6);
    const QGTrajectory tr = run_qg(q, 0.1, 0.05, 1);
    CHECK(tr.under_resolved);
  }
  SUBCASE("smooth data is not") {
    CHECK(qg_tail_fraction(gaussian_monopole(g, 1.0, 1.0)) < 1e-6);
  }
  SUBCASE("non-finite initial data is rejected") {
    ScalarField q = gaussian_monopole(g, 1.0, 1.0);
    q.at(3, 3) = std::numeric_limits<double>::quiet_NaN();
    try {
      run_qg(q, 0.1, 0.05, 1);
      FAIL("expected a non-finite error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonFinite);
    }
  }
  SUBCASE("blow-up aborts with the last good state") {
    const ScalarField q = random_band_limited(g, 1.0, 8.0, 1e3, 11);
    QGOptions o;
    o.cfl = 1e300;
    const QGTrajectory tr = run_qg(q, 1e4, 10.0, 1, o);
    CHECK(tr.aborted);
    CHECK_FALSE(tr.message.empty());
    for (double e : tr.energy) CHECK(std::isfinite(e));
  }
}

TEST_CASE("optional filter departs from the inviscid model") {
  const SlabGrid g = torus(32);
  const ScalarField q = random_band_limited(g, 1.0, 8.0, 0.2, 5);
  QGOptions o;
  o.filter = true;
  const QGTrajectory tr = run_qg(q, 0.5, 0.05, 10, o);
  CHECK(tr.energy.back() < tr.energy.front());
}
