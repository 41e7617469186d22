#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rwl/diagnostics.hpp"
#include "rwl/error.hpp"
#include "rwl/ns.hpp"
#include "rwl/presets.hpp"
#include "rwl/qg.hpp"
#include "rwl/spectral_ops.hpp"

using namespace rwl;
constexpr double pi = std::numbers::pi;

namespace {

SlabGrid box(int n = 16) { return SlabGrid::make(pi, n, n, 4); }

ScalarField vol(const SlabGrid& g, std::function<double(double, double, double)> f,
                Parity p = Parity::Even) {
  return ScalarField::from_function(g, Layout::Volume, f, p);
}

UniformBounds bounds(double eps, double kin, double sig, double res, double visc) {
  return UniformBounds{eps, kin, sig, res, res / (eps * eps), visc};
}

LimitErrorSeries series(double eps, double s, double m) {
  LimitErrorSeries r;
  r.eps = eps;
  r.sup_sigma_l2 = s;
  r.sup_momentum_l2 = m;
  return r;
}

}  // namespace

TEST_CASE("relative entropy") {
  const SlabGrid g = box();
  const PressureLaw law(2.0);
  const ScalarField rho = vol(g, [](double x, double y, double) { return 1.0 + 0.3 * std::cos(x) * std::sin(y); });
  const ScalarField r = vol(g, [](double x, double, double z) { return 1.0 + 0.1 * std::sin(x) * std::cos(pi * z); });
  VectorField u = VectorField::zeros(g, Layout::Volume, 3);
  u[0] = vol(g, [](double, double y, double) { return std::cos(y); });
  VectorField U = VectorField::zeros(g, Layout::Volume, 3);
  U[1] = vol(g, [](double x, double, double) { return 0.5 * std::sin(x); });

  SUBCASE("vanishes at equality") {
    const RelativeEntropy e = relative_entropy(rho, u, rho, u, 0.1, law);
    CHECK(e.kinetic == 0.0);
    CHECK(std::abs(e.free) < 1e-14);
  }
  SUBCASE("quadratic law closed form") {
    // For gamma = 2 the free-energy distance is (rho - r)^2 / 2.
    const double eps = 0.2;
    ScalarField kin(g, Layout::Volume), fr(g, Layout::Volume);
    for (std::size_t n = 0; n < kin.size(); ++n) {
      const double du0 = u[0][n] - U[0][n], du1 = u[1][n] - U[1][n];
      kin[n] = 0.5 * rho[n] * (du0 * du0 + du1 * du1);
      fr[n] = 0.5 * (rho[n] - r[n]) * (rho[n] - r[n]) / (eps * eps);
    }
    const RelativeEntropy e = relative_entropy(rho, u, r, U, eps, law);
    CHECK(e.kinetic == doctest::Approx(integral(kin)).epsilon(1e-13));
    CHECK(e.free == doctest::Approx(integral(fr)).epsilon(1e-11));
    CHECK(e.total() > 0.0);
  }
  SUBCASE("nonnegative for other laws") {
    for (double gamma : {1.6, 7.0 / 3.0, 3.0}) {
      const ScalarField d = free_energy_distance(rho, r, PressureLaw(gamma));
      for (double v : d.values()) CHECK(v >= -1e-16);
      CHECK(relative_entropy(rho, u, r, U, 0.05, PressureLaw(gamma)).total() > 0.0);
    }
  }
}

TEST_CASE("essential and residual parts") {
  const EssResSpec band{0.25};
  CHECK(band.chi(1.0) == 1.0);
  CHECK(band.chi(1.25) == 1.0);
  CHECK(band.chi(0.75) == 1.0);
  CHECK(band.chi(1.5) == 0.0);
  CHECK(band.chi(0.4) == 0.0);
  const double mid = band.chi(1.4);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
  for (double rho = 0.4; rho < 1.0; rho += 0.01) CHECK(band.chi(rho + 0.01) >= band.chi(rho));

  const SlabGrid g = box();
  const ScalarField rho = vol(g, [](double x, double, double) { return 1.0 + 0.8 * std::cos(x); });
  const ScalarField f = vol(g, [](double, double y, double) { return 2.0 + std::sin(y); });
  const auto [ess, res] = ess_res_split(f, rho, band);
  for (std::size_t n = 0; n < f.size(); ++n) {
    CHECK(ess[n] + res[n] == doctest::Approx(f[n]).epsilon(1e-15));
    if (std::abs(rho[n] - 1.0) <= 0.25) CHECK(res[n] == 0.0);
    if (std::abs(rho[n] - 1.0) >= 0.5) CHECK(ess[n] == 0.0);
  }
  CHECK_THROWS_AS(ess_res_split(f, rho, EssResSpec{0.6}), Error);
}

TEST_CASE("uniform-bound monitor") {
  SUBCASE("bounded sweep") {
    const std::vector<UniformBounds> runs = {bounds(0.4, 1.0, 1.0, 0.16 * 1e-2, 1.0),
                                             bounds(0.2, 1.5, 1.2, 0.04 * 1e-2, 2.0),
                                             bounds(0.1, 1.7, 1.1, 0.01 * 1e-2, 1.5)};
    const UniformBoundReport rep = uniform_bound_monitor(runs, 10.0);
    CHECK(rep.within_bounds);
    CHECK(rep.kinetic_ratio == doctest::Approx(1.7));
    CHECK(rep.sigma_ess_ratio == doctest::Approx(1.2));
    CHECK(rep.viscous_ratio == doctest::Approx(2.0));
    CHECK(rep.residual_exponent == doctest::Approx(2.0));
    CHECK(rep.residual_fit_points == 3);
  }
  SUBCASE("growing monitor") {
    const std::vector<UniformBounds> runs = {bounds(0.4, 1.0, 1.0, 0.0, 1.0),
                                             bounds(0.1, 11.0, 1.0, 0.0, 1.0)};
    const UniformBoundReport rep = uniform_bound_monitor(runs, 10.0);
    CHECK_FALSE(rep.within_bounds);
    CHECK(rep.residual_fit_points == 0);
  }
  SUBCASE("peaks of a trajectory") {
    NSTrajectory tr;
    tr.eps = 0.5;
    tr.kinetic_l2 = {1.0, 3.0, 2.0};
    tr.sigma_ess_l2 = {0.5, 0.4, 0.2};
    tr.residual_mass = {0.0, 0.1, 0.05};
    tr.viscous_bound = {0.0, 0.2, 0.3};
    const UniformBounds b = uniform_bounds(tr);
    CHECK(b.eps == 0.5);
    CHECK(b.kinetic_l2 == 3.0);
    CHECK(b.sigma_ess_l2 == 0.5);
    CHECK(b.residual_mass == doctest::Approx(0.1));
    CHECK(b.residual_mass_scaled == doctest::Approx(0.4));
    CHECK(b.viscous_bound == 0.3);
  }
}

TEST_CASE("convergence report") {
  SUBCASE("first-order decay") {
    const ConvergenceReport rep = convergence_report(
        {series(0.4, 0.8, 1.6), series(0.2, 0.4, 0.8), series(0.1, 0.2, 0.4)});
    CHECK(rep.strictly_decreasing);
    CHECK(rep.sigma_order == doctest::Approx(1.0));
    CHECK(rep.momentum_order == doctest::Approx(1.0));
    CHECK(rep.sigma_ratio == doctest::Approx(0.25));
    CHECK(rep.momentum_ratio == doctest::Approx(0.25));
  }
  SUBCASE("stagnating errors") {
    const ConvergenceReport rep =
        convergence_report({series(0.4, 0.8, 1.6), series(0.2, 0.8, 0.8)});
    CHECK_FALSE(rep.strictly_decreasing);
  }
  SUBCASE("unordered runs are rejected") {
    CHECK_THROWS_AS(convergence_report({series(0.1, 1, 1), series(0.2, 1, 1)}), Error);
  }
}

TEST_CASE("log-log slope") {
  std::vector<double> x = {0.1, 0.2, 0.4, 0.8}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 1.5));
  CHECK(log_log_slope(x, y) == doctest::Approx(1.5).epsilon(1e-13));
  y[2] = 0.0;
  CHECK(log_log_slope(x, y) == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(std::isnan(log_log_slope({1.0}, {2.0})));
  CHECK_THROWS_AS(log_log_slope({1.0, 2.0}, {1.0}), Error);
}

TEST_CASE("windowed norms") {
  const SlabGrid g = SlabGrid::make(4.0, 32, 32, 4);
  ScalarField one(g, Layout::Planar);
  for (double& v : one.values()) v = 1.0;
  // Samples sit at multiples of 0.25; |x| <= 1 holds for 9 of them.
  const double cell = g.dx() * g.dy();
  CHECK(windowed_l1(one, 1.0) == doctest::Approx(81 * cell));
  CHECK(windowed_l2(one, 1.0) == doctest::Approx(std::sqrt(81 * cell)));
  CHECK(windowed_l2(one, 10.0) == doctest::Approx(l2_norm(one)));
  CHECK_THROWS_AS(windowed_l2(extrude(one), 1.0), Error);
}

TEST_CASE("limit error between matching runs") {
  const SlabGrid g = box();
  const ScalarField q0 = gaussian_monopole(g, 0.5, 1.0);
  const double eps = 0.1;

  // State whose averaged density and sqrt(rho) u_h reproduce (c q0, perp grad c q0).
  auto state = [&](double c, double shift) {
    const ScalarField q = c * q0;
    const VectorField v = perp_grad_h(q);
    FluidState s{extrude(q), VectorField::zeros(g, Layout::Volume, 3), eps};
    for (std::size_t n = 0; n < s.sigma.size(); ++n) s.sigma[n] += shift;
    const ScalarField rho = s.density();
    const VectorField ve = {{extrude(v[0]), extrude(v[1])}};
    for (int i = 0; i < 2; ++i)
      for (std::size_t n = 0; n < rho.size(); ++n) s.m[i][n] = std::sqrt(rho[n]) * ve[i][n];
    s.m[2].set_parity(Parity::Odd);
    return s;
  };

  QGTrajectory qg;
  for (int k = 0; k < 4; ++k) {
    qg.snapshot_times.push_back(k);
    qg.snapshots.push_back((1.0 + k) * q0);
  }
  SUBCASE("coinciding times") {
    NSTrajectory ns;
    ns.eps = eps;
    ns.snapshot_times = {0.0, 2.0};
    ns.snapshots = {state(1.0, 0.0), state(3.0, 0.01)};
    const LimitErrorSeries e = limit_error(ns, qg, pi);
    CHECK_FALSE(e.interpolated);
    CHECK(e.sigma_l2[0] < 1e-14);
    CHECK(e.momentum_l2[0] < 1e-13);
    CHECK(e.sigma_l2[1] == doctest::Approx(0.01 * 2 * pi).epsilon(1e-10));
    CHECK(e.sigma_l1[1] == doctest::Approx(0.01 * 4 * pi * pi).epsilon(1e-10));
    CHECK(e.sup_sigma_l2 == e.sigma_l2[1]);
  }
  SUBCASE("interpolated times") {
    NSTrajectory ns;
    ns.eps = eps;
    ns.snapshot_times = {1.5};
    ns.snapshots = {state(2.5, 0.0)};
    const LimitErrorSeries e = limit_error(ns, qg, pi);
    CHECK(e.interpolated);
    CHECK(e.sigma_l2[0] < 1e-13);
    CHECK(e.momentum_l2[0] < 1e-13);
  }
}
