#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rwl/error.hpp"
#include "rwl/spectral_ops.hpp"
#include "rwl/transform.hpp"

using namespace rwl;
constexpr double pi = std::numbers::pi;

namespace {

ScalarField random_field(const SlabGrid& g, Layout layout, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  ScalarField f(g, layout);
  for (double& x : f.values()) x = n(gen);
  return f;
}

double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

double max_abs(const ScalarField& a) { return sup_norm(a); }

}  // namespace

TEST_CASE("grid wavenumbers") {
  const SlabGrid g = SlabGrid::make(pi, 4, 4, 4);
  const auto xi = g.raw_xi1();
  CHECK(xi[0] == doctest::Approx(0.0));
  CHECK(xi[1] == doctest::Approx(1.0));
  CHECK(xi[2] == doctest::Approx(-2.0));
  CHECK(xi[3] == doctest::Approx(-1.0));
  CHECK(g.xi1()[2] == 0.0);
  CHECK(g.raw_kappa()[1] == doctest::Approx(pi));

  const SlabGrid h = SlabGrid::make(2 * pi, 8, 8, 4);
  CHECK(h.raw_xi1()[1] == doctest::Approx(0.5));
  CHECK(g.dz() == doctest::Approx(0.5));
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(SlabGrid::make(pi, 3, 4, 4), Error);
  CHECK_THROWS_AS(SlabGrid::make(pi, 2, 4, 4), Error);
  CHECK_THROWS_AS(SlabGrid::make(0.0, 4, 4, 4), Error);
  CHECK_THROWS_AS(SlabGrid::make(-1.0, 4, 4, 4), Error);
}

TEST_CASE("transform basics") {
  const SlabGrid g = SlabGrid::make(2 * pi, 16, 16, 8);

  SUBCASE("constant field has one coefficient") {
    const ScalarField c = ScalarField::from_function(g, Layout::Volume,
                                                     [](double, double, double) { return 3.0; });
    const SpectralField ch = forward_transform(c);
    for (std::size_t n = 1; n < ch.size(); ++n) CHECK(std::abs(ch[n]) < 1e-12);
    CHECK(std::abs(ch[0]) > 1.0);
  }

  SUBCASE("cosine gives conjugate pair") {
    const ScalarField f = ScalarField::from_function(
        g, Layout::Volume, [](double x, double y, double) { return std::cos(x + 0.5 * y); });
    const SpectralField fh = forward_transform(f);
    // xi = (1, 0.5) is mode (2, 1) on L = 2 pi.
    const cplx a = fh.at(2, 1, 0);
    const cplx b = fh.at(14, 15, 0);
    CHECK(std::abs(a - std::conj(b)) < 1e-12);
    CHECK(std::abs(a) > 1.0);
    CHECK(spectral_energy(fh) == doctest::Approx(2 * std::norm(a)).epsilon(1e-12));
  }

  SUBCASE("parseval and round trip") {
    for (Layout layout : {Layout::Volume, Layout::Planar}) {
      const ScalarField f = random_field(g, layout, 7);
      const SpectralField fh = forward_transform(f);
      const double e = inner(f, f);
      CHECK(std::abs(spectral_energy(fh) - e) / e < 1e-10);
      const ScalarField back = inverse_transform(fh);
      CHECK(max_diff(back, f) / max_abs(f) < 1e-12);
    }
  }

  SUBCASE("non-finite input rejected") {
    ScalarField f(g, Layout::Planar);
    f[3] = std::nan("");
    CHECK_THROWS_AS(forward_transform(f), Error);
  }
}

TEST_CASE("differential operator identities") {
  const SlabGrid g = SlabGrid::make(3.0, 16, 12, 8);
  const ScalarField f = random_field(g, Layout::Volume, 11);
  const double scale = max_abs(laplace_h(f));

  CHECK(max_abs(curl_h(grad_h(f))) / scale < 1e-12);
  CHECK(max_diff(laplace_h(f), div_h(grad_h(f))) / scale < 1e-12);
  CHECK(max_abs(div_h(perp_grad_h(f))) / scale < 1e-12);
  CHECK(max_diff(curl_h(perp_grad_h(f)), laplace_h(f)) / scale < 1e-12);

  const SpectralField fh = forward_transform(f);
  const SpectralField a = d_x1(d_x3(fh));
  const SpectralField b = d_x3(d_x1(fh));
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  CHECK(m < 1e-12 * scale);
}

TEST_CASE("derivative of a smooth function") {
  const SlabGrid g = SlabGrid::make(pi, 32, 32, 8);
  const ScalarField f = ScalarField::from_function(
      g, Layout::Volume, [](double x, double y, double z) {
        return std::sin(2 * x) * std::cos(y) * std::cos(pi * z);
      });
  const ScalarField dz = d_x3(f);
  const ScalarField expect = ScalarField::from_function(
      g, Layout::Volume, [](double x, double y, double z) {
        return -pi * std::sin(2 * x) * std::cos(y) * std::sin(pi * z);
      });
  CHECK(max_diff(dz, expect) < 1e-12);
}

TEST_CASE("grid mismatch") {
  const SlabGrid g = SlabGrid::make(pi, 8, 8, 4);
  const SlabGrid h = SlabGrid::make(pi, 16, 8, 4);
  VectorField v;
  v.c.push_back(ScalarField(g, Layout::Planar));
  v.c.push_back(ScalarField(h, Layout::Planar));
  CHECK_THROWS_AS(div_h(v), Error);
}

TEST_CASE("cutoffs") {
  const CutoffSpec c = CutoffSpec::from_delta(0.25);
  CHECK(c.a == 0.25);
  CHECK(c.b == 4.0);
  CHECK(c.K == 4);
  CHECK(c.psi(0.2) == 0.0);
  CHECK(c.psi(1.0) == doctest::Approx(1.0));
  CHECK(c.phi(3.0) == 1.0);
  CHECK(c.phi(7.0) == 0.0);
  for (double r = 0.01; r < 10; r *= 1.1) {
    CHECK(c.psi(r) >= 0.0);
    CHECK(c.psi(r) <= 1.0);
  }
  CHECK_THROWS_AS(CutoffSpec::from_delta(0.0), Error);

  const CutoffSpec finer = CutoffSpec::from_delta(0.1);
  CHECK(finer.a < c.a);
  CHECK(finer.b > c.b);
  CHECK(finer.R > c.R);

  const SlabGrid g = SlabGrid::make(2 * pi, 32, 32, 8);
  const ScalarField f = random_field(g, Layout::Volume, 3);

  SUBCASE("identity on support") {
    const ScalarField band = ScalarField::from_function(
        g, Layout::Volume,
        [](double x, double y, double) { return std::cos(x) + std::sin(x - 1.5 * y); });
    const ScalarField out = apply_frequency_cutoff(band, CutoffSpec::band(0.2, 20.0, 8));
    CHECK(max_diff(out, band) < 1e-12);
  }
  SUBCASE("support below inner radius") {
    const ScalarField low = ScalarField::from_function(
        g, Layout::Volume, [](double x, double, double) { return std::cos(0.5 * x); });
    CHECK(max_abs(apply_frequency_cutoff(low, CutoffSpec::band(0.6, 20.0, 8))) < 1e-14);
  }
  SUBCASE("norms never increase") {
    CHECK(l2_norm(apply_frequency_cutoff(f, c)) <= l2_norm(f));
    CHECK(sup_norm(apply_spatial_cutoff(f, c)) <= sup_norm(f));
  }
  SUBCASE("spatial cutoff plateau and exterior") {
    const CutoffSpec wide = CutoffSpec::from_delta(0.05);
    CHECK(max_diff(apply_spatial_cutoff(f, wide), f) == 0.0);
    const ScalarField one = ScalarField::from_function(
        g, Layout::Volume, [](double, double, double) { return 1.0; });
    const CutoffSpec small{0.1, 10.0, 1.0, 0.5, 4};
    const ScalarField out = apply_spatial_cutoff(one, small);
    CHECK(out.at(0, 0, 0) == 0.0);
    CHECK(out.at(16, 16, 0) == 1.0);
  }
  SUBCASE("cutoff commutes with derivatives") {
    const ScalarField a = apply_frequency_cutoff(laplace_h(f), c);
    const ScalarField b = laplace_h(apply_frequency_cutoff(f, c));
    CHECK(max_diff(a, b) < 1e-12 * max_abs(laplace_h(f)));
  }
  SUBCASE("vertical mode bound") {
    const ScalarField high = ScalarField::from_function(
        g, Layout::Volume, [](double x, double, double z) { return std::cos(x) * std::cos(3 * pi * z); });
    CHECK(max_abs(apply_frequency_cutoff(high, CutoffSpec::band(0.2, 20.0, 2))) < 1e-13);
    CHECK(max_diff(apply_frequency_cutoff(high, CutoffSpec::band(0.2, 20.0, 3)), high) < 1e-12);
  }
}

TEST_CASE("dealiasing") {
  const SlabGrid g = SlabGrid::make(pi, 12, 12, 4);
  const Shape s{g, Layout::Planar};
  CHECK(is_dealiased_mode(s, 4, 0, 0));
  CHECK_FALSE(is_dealiased_mode(s, 5, 0, 0));
  CHECK(is_dealiased_mode(s, 8, 0, 0));
  CHECK_FALSE(is_dealiased_mode(s, 7, 0, 0));
  // The product of two resolved low modes is computed exactly.
  const SlabGrid h = SlabGrid::make(pi, 32, 32, 4);
  const ScalarField a = ScalarField::from_function(
      h, Layout::Planar, [](double x, double, double) { return std::cos(2 * x); });
  const ScalarField b = ScalarField::from_function(
      h, Layout::Planar, [](double, double y, double) { return std::sin(3 * y); });
  const ScalarField ab = ScalarField::from_function(
      h, Layout::Planar, [](double x, double y, double) { return std::cos(2 * x) * std::sin(3 * y); });
  CHECK(max_diff(dealiased_product(a, b), ab) < 1e-13);
}

TEST_CASE("symmetry class projection") {
  const SlabGrid g = SlabGrid::make(2.0, 8, 8, 8);
  const ScalarField rho = random_field(g, Layout::Volume, 1);
  VectorField u;
  for (unsigned k = 0; k < 3; ++k) u.c.push_back(random_field(g, Layout::Volume, 10 + k));

  const auto [r1, u1] = enforce_symmetry_class(rho, u);
  const auto [r2, u2] = enforce_symmetry_class(r1, u1);
  CHECK(max_diff(r1, r2) < 1e-14);
  for (int k = 0; k < 3; ++k) CHECK(max_diff(u1[k], u2[k]) < 1e-14);

  // Self-adjoint: <P a, b> = <a, P b>.
  const ScalarField b = random_field(g, Layout::Volume, 99);
  CHECK(std::abs(inner(even_part(rho), b) - inner(rho, even_part(b))) < 1e-12);
  CHECK(std::abs(inner(odd_part(rho), b) - inner(rho, odd_part(b))) < 1e-12);

  const ScalarField even_u3 = ScalarField::from_function(
      g, Layout::Volume, [](double x, double, double z) { return std::cos(x) * std::cos(pi * z); });
  VectorField w{{u[0], u[1], even_u3}};
  CHECK(max_abs(enforce_symmetry_class(rho, w).second[2]) < 1e-14);

  const ScalarField odd = ScalarField::from_function(
      g, Layout::Volume, [](double, double, double z) { return std::sin(pi * z); });
  CHECK(max_diff(odd_part(odd), odd) < 1e-14);
  CHECK(max_abs(even_part(odd)) < 1e-14);
}
