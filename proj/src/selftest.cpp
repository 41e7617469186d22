#include "rwl/selftest.hpp"

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <memory>
#include <numbers>

#include "rwl/bundled_configs.hpp"
#include "rwl/config.hpp"
#include "rwl/diagnostics.hpp"
#include "rwl/error.hpp"
#include "rwl/experiment.hpp"
#include "rwl/kernel.hpp"
#include "rwl/ns.hpp"
#include "rwl/parallel.hpp"
#include "rwl/presets.hpp"
#include "rwl/pressure.hpp"
#include "rwl/qg.hpp"
#include "rwl/rng.hpp"
#include "rwl/spectral_ops.hpp"
#include "rwl/wave.hpp"

namespace rwl {
namespace {

using std::numbers::pi;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ExperimentConfig bundled(const char* text) {
  ConfigResult r = parse_config(text);
  if (!r.config) {
    std::string msg = "bundled config rejected:";
    for (const auto& e : r.errors) msg += " " + e + ";";
    fail(ErrorCode::Config, msg);
  }
  return *r.config;
}

WaveState random_wave(const SlabGrid& g, std::uint64_t seed) {
  SplitMix64 rng(seed);
  ScalarField s(g, Layout::Volume);
  VectorField V = VectorField::zeros(g, Layout::Volume, 3);
  for (double& x : s.values()) x = rng.normal();
  for (auto& f : V.c)
    for (double& x : f.values()) x = rng.normal();
  auto [se, Ve] = enforce_symmetry_class(s, V);
  return {std::move(se), std::move(Ve)};
}

double wave_distance(const WaveState& a, const WaveState& b) {
  double d = std::pow(l2_norm(a.s - b.s), 2);
  for (int k = 0; k < a.V.dim(); ++k) d += std::pow(l2_norm(a.V[k] - b.V[k]), 2);
  return std::sqrt(d);
}

struct Outcome {
  bool passed;
  std::string detail;
};

// 1: closed-form eigenvalues against a numeric Hermitian solver.
Outcome eigen_oracle() {
  SplitMix64 rng(20240601);
  double worst = 0.0;
  for (int n = 0; n < 10000; ++n) {
    double a, b;
    do {
      a = 100.0 * rng.uniform() - 50.0;
      b = 100.0 * rng.uniform() - 50.0;
    } while (a * a + b * b > 2500.0);
    const double k = (2.0 * rng.uniform() - 1.0) * 10.0 * pi;
    const ModeSymbol m = assemble_symbol(a, b, k);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m.A, Eigen::EigenvaluesOnly);
    std::array<double, 4> closed = eigenvalues_closed_form(a, b, k);
    std::sort(closed.begin(), closed.end());
    for (int r = 0; r < 4; ++r) worst = std::max(worst, std::abs(closed[r] - es.eigenvalues()(r)));
  }
  return {worst < 1e-10, fmt("10^4 modes, max |err| %.2e (< 1e-10)", worst)};
}

// 2: L2 and W^{2,2} isometry of the exact group.
Outcome isometry(int threads) {
  const SlabGrid g = SlabGrid::make(2.0 * pi, 256, 256, 8);
  const WavePropagator prop(g, threads);
  const WaveSpectrum w0 = to_spectrum(random_wave(g, 11));
  const double e0 = w0.energy(), s0 = w0.sobolev_energy(2);
  double dl2 = 0.0, dw2 = 0.0;
  for (int n = 0; n <= 20; ++n) {
    const WaveSpectrum w = prop.propagate(w0, 0.5 * n, 0.1);
    dl2 = std::max(dl2, std::abs(std::sqrt(w.energy() / e0) - 1.0));
    dw2 = std::max(dw2, std::abs(std::sqrt(w.sobolev_energy(2) / s0) - 1.0));
  }
  return {dl2 < 1e-10 && dw2 < 1e-10,
          fmt("256^2x8, t in [0, 10]: L2 drift %.2e, W^{2,2} drift %.2e (< 1e-10)", dl2, dw2)};
}

// 3: per-mode exponentials against adaptive Dormand-Prince integration.
Outcome ode_oracle() {
  namespace odeint = boost::numeric::odeint;
  using state = std::array<double, 8>;
  const SlabGrid g = SlabGrid::make(2.0 * pi, 32, 32, 16);
  const WavePropagator prop(g);
  const auto xi1 = g.xi1(), xi2 = g.xi2(), kap = g.kappa();
  SplitMix64 rng(314159);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int i = static_cast<int>(rng.uniform() * g.nx());
    const int j = static_cast<int>(rng.uniform() * g.ny());
    const int l = static_cast<int>(rng.uniform() * g.nz());
    const double eps = 0.1 + 0.9 * rng.uniform();
    const double t = 0.5 + 2.5 * rng.uniform();
    WaveSpectrum w0{{SpectralField(g, Layout::Volume), SpectralField(g, Layout::Volume),
                     SpectralField(g, Layout::Volume), SpectralField(g, Layout::Volume)}};
    state y{};
    double norm = 0.0;
    for (int c = 0; c < 4; ++c) {
      const cplx z(rng.normal(), rng.normal());
      w0.c[c].at(i, j, l) = z;
      y[2 * c] = z.real();
      y[2 * c + 1] = z.imag();
      norm += std::norm(z);
    }
    const Eigen::Matrix4cd A = assemble_symbol(xi1[i], xi2[j], kap[l]).A;
    auto rhs = [&](const state& x, state& dx, double) {
      for (int r = 0; r < 4; ++r) {
        cplx s = 0.0;
        for (int c = 0; c < 4; ++c) s += A(r, c) * cplx(x[2 * c], x[2 * c + 1]);
        const cplx d = cplx(0.0, -1.0 / eps) * s;
        dx[2 * r] = d.real();
        dx[2 * r + 1] = d.imag();
      }
    };
    odeint::integrate_adaptive(
        odeint::make_controlled(1e-14, 1e-14, odeint::runge_kutta_dopri5<state>()), rhs, y, 0.0,
        t, 1e-3);
    const WaveSpectrum w = prop.propagate(w0, t, eps);
    double err = 0.0;
    for (int c = 0; c < 4; ++c)
      err += std::norm(w.c[c].at(i, j, l) - cplx(y[2 * c], y[2 * c + 1]));
    worst = std::max(worst, std::sqrt(err / norm));
  }
  return {worst < 1e-8, fmt("100 modes, max relative err %.2e (< 1e-8)", worst)};
}

// 4: fitted sup-norm decay rate of fast-branch data on the wide torus.
Outcome decay(int threads) {
  const ExperimentConfig cfg = bundled(bundled::decay_study);
  const SlabGrid g = SlabGrid::make(cfg.grid.L, cfg.grid.nx, cfg.grid.ny, cfg.grid.nz);
  WaveSpectrum w = wave_from_config(cfg.data, g);
  const WavePropagator prop(g, w, threads);
  w = prop.polarize(w, branch_from_config(cfg.data));
  const auto& d = cfg.decay;
  std::vector<double> times;
  for (int k = 0; k < d.samples; ++k)
    times.push_back(d.t_min * std::pow(d.t_max / d.t_min, static_cast<double>(k) / (d.samples - 1)));
  DecayOptions o;
  o.eps = cfg.physics.eps.front();
  o.window_lo = d.window_lo;
  o.window_hi = d.window_hi;
  o.sobolev_m = d.sobolev_m;
  o.threads = threads;
  const DecayReport r = measure_decay(prop, to_state(w), times, o);
  const bool ok = !r.window_empty && r.slope >= d.slope_min && r.slope <= d.slope_max &&
                  r.l2_drift < d.l2_tol;
  return {ok, fmt("slope %.4f in [%.2f, %.2f] over [%g, %.3g] (recurrence %.0f), L2 drift %.2e "
                  "(< %.0e)",
                  r.slope, d.slope_min, d.slope_max, r.window_lo, r.window_hi, r.recurrence_time,
                  r.l2_drift, d.l2_tol)};
}

// 5: projection is idempotent and orthogonal; its range is stationary.
Outcome kernel(int threads) {
  const SlabGrid g = SlabGrid::make(2.0 * pi, 64, 64, 8);
  const WavePropagator prop(g, threads);
  double idem = 0.0, orth = 0.0, stat = 0.0;
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    const WaveState x = random_wave(g, seed);
    const KernelPair p = project_to_kernel(x.s, x.V);
    const WaveState pw = to_wave_state(p, g);
    const WaveState ppw = to_wave_state(project_to_kernel(pw.s, pw.V), g);
    const double np = std::sqrt(wave_inner(pw, pw));
    idem = std::max(idem, wave_distance(ppw, pw) / np);
    WaveState rest = x;
    rest.s -= pw.s;
    for (int k = 0; k < 3; ++k) rest.V[k] -= pw.V[k];
    orth = std::max(orth, std::abs(wave_inner(pw, rest)) / (np * std::sqrt(wave_inner(rest, rest))));
    for (int t = 1; t <= 10; ++t)
      stat = std::max(stat, wave_distance(prop.propagate(pw, t, 0.1), pw) / np);
  }
  return {idem < 1e-10 && orth < 1e-10 && stat < 1e-10,
          fmt("idempotence %.2e, orthogonality %.2e, stationarity to t = 10 %.2e (< 1e-10)", idem,
              orth, stat)};
}

// 6: QG invariants and a stationary radial vortex.
Outcome qg() {
  const ExperimentConfig cfg = bundled(bundled::qg_run);
  const SlabGrid g = SlabGrid::make(cfg.grid.L, cfg.grid.nx, cfg.grid.ny, cfg.grid.nz);
  QGOptions o;
  o.cfl = cfg.run.cfl;
  const ScalarField q0 = stream_from_config(cfg.data, g);
  const QGTrajectory tr = run_qg(q0, cfg.run.T, qg_dt_from_config(cfg, q0), 1000000, o);
  const ScalarField m0 = gaussian_monopole(g, 1.0, 0.8);
  const QGTrajectory mr = run_qg(m0, cfg.run.T, qg_dt_from_config(cfg, m0), 1000000, o);
  const double stat = sup_norm(mr.snapshots.back() - m0) / sup_norm(m0);
  const bool ok = !tr.aborted && !mr.aborted && tr.energy_drift() < 1e-6 &&
                  tr.pv_l2_drift() < 1e-6 && stat < 1e-8;
  return {ok, fmt("T = %g, %zu steps: energy drift %.2e, PV drift %.2e (< 1e-6); radial vortex "
                  "%.2e (< 1e-8)",
                  cfg.run.T, tr.times.size() - 1, tr.energy_drift(), tr.pv_l2_drift(), stat)};
}

// 7: discrete energy inequality on the reference run.
Outcome energy(int threads) {
  const ExperimentConfig cfg = bundled(bundled::ns_reference);
  const SlabGrid g = SlabGrid::make(cfg.grid.L, cfg.grid.nx, cfg.grid.ny, cfg.grid.nz);
  const auto [rho1, u] = primitive_from_config(cfg.data, g);
  const NSTrajectory tr =
      ns_run_from_config(cfg, cfg.physics.eps.front(), rho1, u, nullptr, threads);
  const double rate = tr.energy_residual_rate();
  return {!tr.aborted && rate <= 1e-6,
          fmt("%dx%dx%d, gamma %g, eps %g: residual rate %.2e (<= 1e-6)%s", g.nx(), g.ny(), g.nz(),
              cfg.physics.gamma, cfg.physics.eps.front(), rate,
              tr.aborted ? (" aborted: " + tr.message).c_str() : "")};
}

// 8: convergence to the QG limit along the eps sweep.
Outcome limit(int threads) {
  const ExperimentConfig cfg = bundled(bundled::limit_study);
  const SlabGrid g = SlabGrid::make(cfg.grid.L, cfg.grid.nx, cfg.grid.ny, cfg.grid.nz);
  const auto [rho1, u] = primitive_from_config(cfg.data, g);
  const KernelPair k = project_to_kernel(rho1, u);
  QGOptions qo;
  qo.cfl = cfg.run.cfl;
  const QGTrajectory qt =
      run_qg(k.q, cfg.run.T, qg_dt_from_config(cfg, k.q), cfg.run.snapshot_stride, qo);

  const auto& eps = cfg.physics.eps;
  auto prop = std::make_shared<const WavePropagator>(g, threads);
  std::vector<NSTrajectory> runs(eps.size());
  std::vector<std::exception_ptr> errors(eps.size());
  parallel_for(eps.size(), std::min<int>(threads, eps.size()), [&](std::size_t b, std::size_t e) {
    for (std::size_t n = b; n < e; ++n) try {
        runs[n] = ns_run_from_config(cfg, eps[n], rho1, u, prop, 1);
      } catch (...) {
        errors[n] = std::current_exception();
      }
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<LimitErrorSeries> series;
  std::vector<UniformBounds> bounds;
  for (const auto& r : runs) {
    if (r.aborted) return {false, fmt("eps %g aborted: %s", r.eps, r.message.c_str())};
    series.push_back(limit_error(r, qt, cfg.run.window));
    bounds.push_back(uniform_bounds(r));
  }
  const ConvergenceReport cr = convergence_report(series);
  const UniformBoundReport ub = uniform_bound_monitor(bounds, cfg.run.bound_factor);
  const bool exp_ok = ub.residual_exponent >= cfg.run.min_residual_exponent;
  const bool ok = cr.strictly_decreasing && cr.sigma_ratio < cfg.run.error_ratio &&
                  cr.momentum_ratio < cfg.run.error_ratio && ub.within_bounds && exp_ok;
  std::string errs;
  for (const auto& s : series) errs += fmt(" %.3g/%.3g", s.sup_sigma_l2, s.sup_momentum_l2);
  return {ok, fmt("errors (sigma/momentum)%s; decreasing %s, ratios %.3f/%.3f (< %.3f); bounds "
                  "%.2f/%.2f/%.2f (<= %g); residual exponent %.2f from %d runs (>= %g)",
                  errs.c_str(), cr.strictly_decreasing ? "yes" : "no", cr.sigma_ratio,
                  cr.momentum_ratio, cfg.run.error_ratio, ub.kinetic_ratio, ub.sigma_ess_ratio,
                  ub.viscous_ratio, cfg.run.bound_factor, ub.residual_exponent,
                  ub.residual_fit_points, cfg.run.min_residual_exponent)};
}

// 9: gamma = 2 closed forms and H'' = p'/rho.
Outcome pressure() {
  const PressureLaw law(2.0);
  SplitMix64 rng(2718);
  double fe = 0.0, pr = 0.0, hd = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const double rho = 0.05 + 3.0 * rng.uniform();
    const double r = 0.05 + 3.0 * rng.uniform();
    const double at1 = 0.5 * (rho - 1.0) * (rho - 1.0);
    fe = std::max(fe, std::abs(law.free_energy_distance(rho, 1.0) - at1) / std::max(1.0, at1));
    const double full = 0.5 * (rho - r) * (rho - r);
    fe = std::max(fe, std::abs(law.free_energy_distance(rho, r) - full) / std::max(1.0, full));
    const double e = 0.01 + rng.uniform();
    const double sigma = (2.9 * rng.uniform() - 0.9) / e;
    const double half = 0.5 * sigma * sigma;
    pr = std::max(pr, std::abs(law.pressure_remainder(sigma, e) - half) / std::max(1.0, half));
  }
  for (double gamma : {1.6, 2.0, 7.0 / 3.0, 3.0}) {
    const PressureLaw l(gamma);
    for (int n = 0; n < 2000; ++n) {
      const double rho = 0.2 + 2.8 * rng.uniform();
      const double h = 1e-5;
      const double fd = (l.dH(rho + h) - l.dH(rho - h)) / (2.0 * h);
      const double target = l.dp(rho) / rho;
      hd = std::max(hd, std::abs(fd - target) / std::max(1.0, target));
      hd = std::max(hd, std::abs(l.d2H(rho) - target) / std::max(1.0, target));
    }
  }
  return {fe < 1e-12 && pr < 1e-12 && hd < 1e-8,
          fmt("free-energy distance %.2e, pressure remainder %.2e (< 1e-12); H'' vs p'/rho %.2e "
              "(< 1e-8)",
              fe, pr, hd)};
}

}  // namespace

std::string CriterionResult::line() const {
  return fmt("%s %d %s: %s (%.1f s)", passed ? "PASS" : "FAIL", id, title.c_str(), detail.c_str(),
             seconds);
}

std::vector<int> acceptance_ids() { return {1, 2, 3, 4, 5, 6, 7, 8, 9}; }

CriterionResult run_criterion(int id, int threads) {
  static const char* titles[] = {"",
                                 "eigenvalue oracle",
                                 "propagator isometry",
                                 "propagator vs ODE oracle",
                                 "dispersive decay",
                                 "kernel projection and stationarity",
                                 "QG conservation",
                                 "energy inequality",
                                 "singular limit sweep",
                                 "pressure and free-energy identities"};
  CriterionResult res;
  res.id = id;
  if (id < 1 || id > 9) {
    res.title = "unknown";
    res.detail = "no criterion with this number";
    return res;
  }
  res.title = titles[id];
  threads = std::max(1, threads);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Outcome o{false, ""};
    switch (id) {
      case 1: o = eigen_oracle(); break;
      case 2: o = isometry(threads); break;
      case 3: o = ode_oracle(); break;
      case 4: o = decay(threads); break;
      case 5: o = kernel(threads); break;
      case 6: o = qg(); break;
      case 7: o = energy(threads); break;
      case 8: o = limit(threads); break;
      case 9: o = pressure(); break;
    }
    res.passed = o.passed;
    res.detail = o.detail;
  } catch (const std::exception& e) {
    res.passed = false;
    res.detail = std::string("error: ") + e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace rwl
