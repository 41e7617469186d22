#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "rwl/error.hpp"
#include "rwl/kernel.hpp"
#include "rwl/spectral_ops.hpp"
#include "rwl/transform.hpp"
#include "rwl/wave.hpp"

using namespace rwl;
constexpr double pi = std::numbers::pi;

namespace {

WaveState random_state(const SlabGrid& g, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  auto field = [&] {
    ScalarField f(g, Layout::Volume);
    for (double& x : f.values()) x = n(gen);
    return f;
  };
  ScalarField s = field();
  VectorField V{{field(), field(), field()}};
  auto [s2, V2] = enforce_symmetry_class(s, V);
  return WaveState{s2, V2};
}

double spectrum_diff(const WaveSpectrum& a, const WaveSpectrum& b) {
  double m = 0.0;
  for (int c = 0; c < 4; ++c)
    for (std::size_t n = 0; n < a.c[c].size(); ++n) m = std::max(m, std::abs(a.c[c][n] - b.c[c][n]));
  return m;
}

double spectrum_max(const WaveSpectrum& a) {
  double m = 0.0;
  for (int c = 0; c < 4; ++c)
    for (std::size_t n = 0; n < a.c[c].size(); ++n) m = std::max(m, std::abs(a.c[c][n]));
  return m;
}

cplx spectrum_inner(const WaveSpectrum& a, const WaveSpectrum& b) {
  cplx s = 0.0;
  for (int c = 0; c < 4; ++c) s += spectral_inner(a.c[c], b.c[c]);
  return s;
}

}  // namespace

TEST_CASE("symbol") {
  const ModeSymbol z = assemble_symbol(0, 0, 0);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      const bool rot = (r == 1 && c == 2) || (r == 2 && c == 1);
      CHECK((std::abs(z.A(r, c)) > 0) == rot);
    }
  CHECK(z.A(1, 2) == cplx(0, 1));
  CHECK(z.A(2, 1) == cplx(0, -1));

  const ModeSymbol a = assemble_symbol(1, 0, 0);
  CHECK(a.A(0, 0) == 0.0);
  CHECK(a.A(0, 1) == 1.0);
  CHECK(a.A(0, 2) == 0.0);
  CHECK(a.A(0, 3) == 0.0);

  const ModeSymbol b = assemble_symbol(0.3, -1.7, 2 * pi);
  CHECK((b.A - b.A.adjoint()).norm() == 0.0);
}

TEST_CASE("closed-form eigenvalues") {
  for (double r : {0.0, 0.5, 3.0, 40.0}) {
    const auto l = eigenvalues_closed_form(r, 0.3 * r, 0.0);
    CHECK(l[2] == 0.0);
    CHECK(l[3] == 0.0);
  }
  CHECK(eigenvalues_closed_form(0, 0, 0)[0] == doctest::Approx(1.0).epsilon(1e-15));
  const auto l = eigenvalues_closed_form(0, 0, pi);
  CHECK(l[0] == doctest::Approx(pi).epsilon(1e-15));
  CHECK(l[2] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(l[1] == -l[0]);
  CHECK(l[3] == -l[2]);

  const EigenSystem e = eigensystem(0, 0, pi);
  CHECK(std::abs(e.lambda[0] - pi) < 1e-12);
  CHECK(std::abs(e.lambda[2] - 1.0) < 1e-12);
}

TEST_CASE("closed form matches numeric eigensystem") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0, unitary = 0.0, diag = 0.0;
  for (int n = 0; n < 2000; ++n) {
    double xi1, xi2;
    do {
      xi1 = 50 * u(gen);
      xi2 = 50 * u(gen);
    } while (std::hypot(xi1, xi2) > 50);
    const double k = pi * std::round(10 * u(gen));
    const auto cf = eigenvalues_closed_form(xi1, xi2, k);
    const EigenSystem es = eigensystem(xi1, xi2, k);
    for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(cf[j] - es.lambda[j]));
    unitary = std::max(unitary, (es.Q * es.Q.adjoint() - Eigen::Matrix4cd::Identity()).norm());
    Eigen::Matrix4cd D = es.Q * assemble_symbol(xi1, xi2, k).A * es.Q.adjoint();
    for (int j = 0; j < 4; ++j) D(j, j) -= es.lambda[j];
    diag = std::max(diag, D.cwiseAbs().maxCoeff() / (1.0 + cf[0]));
  }
  CHECK(worst < 1e-10);
  CHECK(unitary < 1e-12);
  CHECK(diag < 1e-12);
}

TEST_CASE("eigenvector phase convention") {
  const EigenSystem e = eigensystem(0.7, -0.2, pi);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (std::abs(e.Q(r, c)) > 1e-8) {
        CHECK(std::abs(e.Q(r, c).imag()) < 1e-15);
        CHECK(e.Q(r, c).real() > 0.0);
        break;
      }
    }
  }
}

TEST_CASE("branch monotonicity") {
  for (double k : {pi, 2 * pi, 5 * pi}) {
    double prev1 = -1.0, prev3 = 1e300;
    for (double r = 0.0; r <= 30.0; r += 0.05) {
      const auto l = eigenvalues_closed_form(r, 0.0, k);
      CHECK(l[0] > prev1);
      CHECK(l[2] < prev3);
      prev1 = l[0];
      prev3 = l[2];
    }
  }
}

TEST_CASE("propagator group properties") {
  const SlabGrid g = SlabGrid::make(2 * pi, 16, 16, 8);
  const WavePropagator prop(g);
  const WaveSpectrum w0 = to_spectrum(random_state(g, 5));
  const double scale = spectrum_max(w0);

  CHECK(spectrum_diff(prop.propagate(w0, 0.0, 0.3), w0) < 1e-14 * scale);

  const double e0 = w0.energy();
  for (double t : {0.5, 3.0, 10.0}) {
    const WaveSpectrum w = prop.propagate(w0, t, 0.3);
    CHECK(std::abs(w.energy() - e0) / e0 < 1e-12);
    CHECK(std::abs(w.sobolev_energy(2) - w0.sobolev_energy(2)) / w0.sobolev_energy(2) < 1e-12);
  }

  const WaveSpectrum ab = prop.propagate(prop.propagate(w0, 1.3, 0.2), 2.1, 0.2);
  CHECK(spectrum_diff(ab, prop.propagate(w0, 3.4, 0.2)) < 1e-10 * scale);
  CHECK(spectrum_diff(prop.propagate(prop.propagate(w0, 4.0, 0.5), -4.0, 0.5), w0) < 1e-10 * scale);

  CHECK_THROWS_AS(prop.propagate(w0, 1.0, 0.0), Error);
  CHECK_THROWS_AS(prop.propagate(w0, 1.0, -1.0), Error);
}

TEST_CASE("real fields stay real and symmetric") {
  const SlabGrid g = SlabGrid::make(3.0, 16, 16, 8);
  const WavePropagator prop(g);
  const WaveState w0 = random_state(g, 8);
  const WaveSpectrum w = prop.propagate(to_spectrum(w0), 2.5, 0.4);
  for (int c = 0; c < 4; ++c) {
    const auto z = inverse_transform_complex(w.c[c]);
    double im = 0.0, re = 0.0;
    for (const cplx& x : z) {
      im = std::max(im, std::abs(x.imag()));
      re = std::max(re, std::abs(x.real()));
    }
    CHECK(im < 1e-12 * re);
  }
  const WaveState st = to_state(w);
  CHECK(sup_norm(odd_part(st.s)) < 1e-12);
  CHECK(sup_norm(even_part(st.V[2])) < 1e-12);
}

TEST_CASE("single modes agree with adaptive ODE integration") {
  using state = std::array<double, 8>;
  namespace odeint = boost::numeric::odeint;
  const SlabGrid g = SlabGrid::make(2 * pi, 16, 16, 8);
  const WavePropagator prop(g);
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<int> pick(0, 15);
  std::uniform_int_distribution<int> pickz(0, 7);
  std::normal_distribution<double> n(0.0, 1.0);
  const double eps = 0.5, t = 2.0;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int i = pick(gen), j = pick(gen), l = pickz(gen);
    WaveSpectrum w0{{SpectralField(g, Layout::Volume), SpectralField(g, Layout::Volume),
                     SpectralField(g, Layout::Volume), SpectralField(g, Layout::Volume)}};
    state y{};
    for (int c = 0; c < 4; ++c) {
      const cplx z(n(gen), n(gen));
      w0.c[c].at(i, j, l) = z;
      y[2 * c] = z.real();
      y[2 * c + 1] = z.imag();
    }
    const Eigen::Matrix4cd A = assemble_symbol(g.xi1()[i], g.xi2()[j], g.kappa()[l]).A;
    auto rhs = [&](const state& x, state& dx, double) {
      for (int r = 0; r < 4; ++r) {
        cplx s = 0.0;
        for (int c = 0; c < 4; ++c) s += A(r, c) * cplx(x[2 * c], x[2 * c + 1]);
        const cplx d = cplx(0, -1.0 / eps) * s;
        dx[2 * r] = d.real();
        dx[2 * r + 1] = d.imag();
      }
    };
    odeint::integrate_adaptive(
        odeint::make_controlled(1e-14, 1e-14, odeint::runge_kutta_dopri5<state>()), rhs, y, 0.0,
        t, 1e-3);
    const WaveSpectrum w = prop.propagate(w0, t, eps);
    for (int c = 0; c < 4; ++c)
      worst = std::max(worst, std::abs(w.c[c].at(i, j, l) - cplx(y[2 * c], y[2 * c + 1])));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("generator is skew-adjoint and annihilates the kernel") {
  const SlabGrid g = SlabGrid::make(2 * pi, 16, 16, 8);
  const WavePropagator prop(g);
  const WaveSpectrum a = to_spectrum(random_state(g, 1));
  const WaveSpectrum b = to_spectrum(random_state(g, 2));
  const cplx lhs = spectrum_inner(prop.apply_generator(a), b);
  const cplx rhs = spectrum_inner(a, prop.apply_generator(b));
  CHECK(std::abs(lhs + rhs) < 1e-10 * std::abs(lhs));

  const WaveState s = random_state(g, 3);
  const KernelPair k = project_to_kernel(s.s, s.V);
  const WaveSpectrum kw = to_spectrum(to_wave_state(k, g));
  CHECK(spectrum_max(prop.apply_generator(kw)) < 1e-12 * spectrum_max(kw) * 30);
  for (double t : {1.0, 10.0})
    CHECK(spectrum_diff(prop.propagate(kw, t, 0.1), kw) < 1e-10 * spectrum_max(kw));
}

TEST_CASE("branch polarization") {
  const SlabGrid g = SlabGrid::make(2 * pi, 8, 8, 4);
  const WavePropagator prop(g);
  const WaveSpectrum w = to_spectrum(random_state(g, 4));
  const WaveSpectrum fast = prop.polarize(w, Branch::Fast);
  const WaveSpectrum slow = prop.polarize(w, Branch::Slow);
  WaveSpectrum sum = fast;
  for (int c = 0; c < 4; ++c) sum.c[c] += slow.c[c];
  CHECK(spectrum_diff(sum, w) < 1e-12 * spectrum_max(w));
  CHECK(std::abs(spectrum_inner(fast, slow)) < 1e-10 * w.energy());
  CHECK(spectrum_diff(prop.polarize(fast, Branch::Fast), fast) < 1e-12 * spectrum_max(w));
}

TEST_CASE("restricted cache gives the same answer") {
  const SlabGrid g = SlabGrid::make(2 * pi, 16, 16, 4);
  WaveSpectrum w = to_spectrum(random_state(g, 6));
  const CutoffSpec band = CutoffSpec::band(1.0, 3.0, 1);
  for (SpectralField& c : w.c) c = apply_frequency_cutoff(c, band);
  const WavePropagator full(g);
  const WavePropagator part(g, w);
  CHECK(part.cached_modes() < full.cached_modes());
  CHECK(spectrum_diff(full.propagate(w, 1.7, 0.3), part.propagate(w, 1.7, 0.3)) == 0.0);

  const WaveSpectrum other = to_spectrum(random_state(g, 9));
  CHECK(spectrum_diff(full.propagate(other, 0.7, 1.0), part.propagate(other, 0.7, 1.0)) == 0.0);
}

TEST_CASE("exponential matrices match propagate") {
  const SlabGrid g = SlabGrid::make(2 * pi, 8, 8, 4);
  const WavePropagator prop(g);
  const WaveSpectrum w0 = to_spectrum(random_state(g, 12));
  WaveSpectrum w = w0;
  prop.exponential(0.9, 0.3).apply(w);
  CHECK(spectrum_diff(w, prop.propagate(w0, 0.9, 0.3)) < 1e-13 * spectrum_max(w0));
}

TEST_CASE("decay harness on a stationary state") {
  const SlabGrid g = SlabGrid::make(2 * pi, 16, 16, 4);
  const WaveState s = random_state(g, 3);
  const WaveState k = to_wave_state(project_to_kernel(s.s, s.V), g);
  const WavePropagator prop(g);
  DecayOptions opt;
  opt.window_lo = 0.1;
  opt.window_hi = 2.0;
  const DecayReport r = measure_decay(prop, k, {0.1, 0.3, 1.0, 2.0}, opt);
  CHECK(r.l2_drift < 1e-12);
  CHECK(std::abs(r.slope) < 1e-10);
  CHECK(r.recurrence_time > 0.0);
}

TEST_CASE("decay harness flags recurrence") {
  const SlabGrid g = SlabGrid::make(pi, 16, 16, 4);
  const WaveState s = random_state(g, 10);
  const WavePropagator prop(g);
  DecayOptions opt;
  const DecayReport r = measure_decay(prop, s, {1.0, 2.0, 5.0, 10.0, 50.0}, opt);
  CHECK(r.max_group_speed > 0.0);
  CHECK(r.recurrence_time == doctest::Approx(pi / (2 * r.max_group_speed)));
  CHECK(r.beyond_recurrence.back());
  CHECK(r.window_hi <= 0.8 * r.recurrence_time);
  CHECK(r.window_empty);
  CHECK(r.l2_drift < 1e-10);
}
