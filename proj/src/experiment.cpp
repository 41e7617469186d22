#include "rwl/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>

#include "rwl/cutoff.hpp"
#include "rwl/diagnostics.hpp"
#include "rwl/error.hpp"
#include "rwl/io.hpp"
#include "rwl/kernel.hpp"
#include "rwl/ns.hpp"
#include "rwl/parallel.hpp"
#include "rwl/presets.hpp"
#include "rwl/qg.hpp"
#include "rwl/rng.hpp"
#include "rwl/spectral_ops.hpp"

namespace rwl {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

const double nan_v = std::numeric_limits<double>::quiet_NaN();

std::string tagged(const char* prefix, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%g", prefix, v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct Ctx {
  const ExperimentConfig& cfg;
  ArtifactDir& dir;
  ExperimentResult& result;
  const RunControl& control;

  void log(const std::string& s) const {
    if (control.log) control.log(s);
  }
  void check_cancel() const {
    if (control.cancel && control.cancel->load()) fail(ErrorCode::Interrupted, "run interrupted");
  }
  void failure(const std::string& s) const {
    result.failures.push_back(s);
    log("FAILED: " + s);
  }
  void note(const std::string& s) const {
    result.notes.push_back(s);
    log("note: " + s);
  }
  void write_json(const std::string& rel, const json& j) const {
    dir.write_text(rel, j.dump(2) + "\n");
  }
  SlabGrid grid() const {
    return SlabGrid::make(cfg.grid.L, cfg.grid.nx, cfg.grid.ny, cfg.grid.nz);
  }
};

void dump_state(Ctx& c, const std::string& prefix, const ScalarField& s, const VectorField& V,
                const char* sname, const char* vname) {
  write_field_dump(c.dir.file(prefix + sname + ".rwl"), s);
  for (int a = 0; a < V.dim(); ++a)
    write_field_dump(c.dir.file(prefix + vname + std::to_string(a + 1) + ".rwl"), V[a]);
}

double max_sup(const VectorField& V) {
  double m = 0.0;
  for (const auto& f : V.c) m = std::max(m, sup_norm(f));
  return m;
}

int steps_for(double T, double dt) {
  return std::max(1, static_cast<int>(std::ceil(T / dt - 1e-9)));
}

// ---------------------------------------------------------------- propagate

WaveState read_wave_input(const fs::path& dir, const SlabGrid& g) {
  WaveState w{read_field(dir / "s.rwl", g, Layout::Volume, Parity::Even),
              VectorField{{read_field(dir / "V1.rwl", g, Layout::Volume, Parity::Even),
                           read_field(dir / "V2.rwl", g, Layout::Volume, Parity::Even),
                           read_field(dir / "V3.rwl", g, Layout::Volume, Parity::Odd)}}};
  return w;
}

void run_propagate(Ctx& c) {
  const auto& cfg = c.cfg;
  const SlabGrid g = c.grid();
  const double eps = cfg.physics.eps.front();
  WaveSpectrum w0 = cfg.data.input.empty() ? wave_from_config(cfg.data, g)
                                            : to_spectrum(read_wave_input(cfg.data.input, g));
  const WavePropagator prop(g, w0, cfg.run.threads);
  if (cfg.data.input.empty()) w0 = prop.polarize(w0, branch_from_config(cfg.data));

  const int steps = steps_for(cfg.run.T, cfg.run.dt);
  const double h = cfg.run.T / steps;
  const int m = cfg.decay.sobolev_m;
  std::vector<double> t, l2, sob, sup_s, sup_V;
  WaveSpectrum w = w0;
  for (int n = 0; n <= steps; ++n) {
    c.check_cancel();
    w = prop.propagate(w0, n * h, eps);
    const WaveState st = to_state(w);
    t.push_back(n * h);
    l2.push_back(std::sqrt(w.energy()));
    sob.push_back(std::sqrt(w.sobolev_energy(m)));
    sup_s.push_back(sup_norm(st.s));
    sup_V.push_back(max_sup(st.V));
  }
  write_csv(c.dir.file("norms.csv"), {"t", "l2_total", "sobolev_total", "sup_s", "sup_V"},
            {t, l2, sob, sup_s, sup_V});
  const WaveState s0 = to_state(w0), s1 = to_state(w);
  dump_state(c, "initial/", s0.s, s0.V, "s", "V");
  dump_state(c, "final/", s1.s, s1.V, "s", "V");

  auto drift = [](const std::vector<double>& v) {
    double d = 0.0;
    for (double x : v) d = std::max(d, v.front() > 0 ? std::abs(x - v.front()) / v.front() : 0.0);
    return d;
  };
  const double dl2 = drift(l2), dsob = drift(sob);
  c.write_json("summary.json", {{"eps", eps},
                                {"steps", steps},
                                {"dt", h},
                                {"sobolev_m", m},
                                {"l2_drift", dl2},
                                {"sobolev_drift", dsob}});
  c.log("propagate: L2 drift " + sci(dl2) + ", W^{m,2} drift " + sci(dsob));
  if (dl2 > cfg.decay.l2_tol) c.failure("L2 norm drift " + sci(dl2) + " exceeds l2_tol");
  if (dsob > cfg.decay.l2_tol) c.failure("Sobolev norm drift " + sci(dsob) + " exceeds l2_tol");
}

// -------------------------------------------------------------------- decay

void run_decay(Ctx& c) {
  const auto& cfg = c.cfg;
  const SlabGrid g = c.grid();
  WaveSpectrum w = wave_from_config(cfg.data, g);
  const WavePropagator prop(g, w, cfg.run.threads);
  w = prop.polarize(w, branch_from_config(cfg.data));
  c.log("decay-study: " + std::to_string(prop.cached_modes()) + " cached modes");
  c.check_cancel();

  std::vector<double> times = cfg.decay.times;
  if (times.empty()) {
    const int n = cfg.decay.samples;
    for (int k = 0; k < n; ++k)
      times.push_back(cfg.decay.t_min *
                      std::pow(cfg.decay.t_max / cfg.decay.t_min, static_cast<double>(k) / (n - 1)));
  }
  DecayOptions o;
  o.eps = cfg.physics.eps.front();
  o.window_lo = cfg.decay.window_lo;
  o.window_hi = cfg.decay.window_hi;
  o.sobolev_m = cfg.decay.sobolev_m;
  o.threads = cfg.run.threads;
  const DecayReport r = measure_decay(prop, to_state(w), times, o);

  std::vector<double> beyond(r.times.size());
  for (std::size_t k = 0; k < beyond.size(); ++k) beyond[k] = r.beyond_recurrence[k] ? 1.0 : 0.0;
  write_csv(c.dir.file("decay.csv"),
            {"t", "sup_s", "sup_V", "l2_total", "l4_total", "sobolev_total", "beyond_recurrence"},
            {r.times, r.sup_s, r.sup_V, r.l2_total, r.l4_total, r.sobolev_total, beyond});
  const bool in_band = r.slope >= cfg.decay.slope_min && r.slope <= cfg.decay.slope_max;
  c.write_json("decay.json", {{"slope", r.slope},
                              {"intercept", r.intercept},
                              {"fit_residual", r.fit_residual},
                              {"fitted_points", r.fitted_points},
                              {"window_lo", r.window_lo},
                              {"window_hi", r.window_hi},
                              {"window_empty", r.window_empty},
                              {"recurrence_time", r.recurrence_time},
                              {"max_group_speed", r.max_group_speed},
                              {"l2_drift", r.l2_drift},
                              {"sobolev_m", cfg.decay.sobolev_m},
                              {"sobolev_drift", r.sobolev_drift},
                              {"eps", o.eps},
                              {"branch", cfg.data.branch},
                              {"slope_min", cfg.decay.slope_min},
                              {"slope_max", cfg.decay.slope_max},
                              {"slope_in_band", in_band}});
  char line[160];
  std::snprintf(line, sizeof line, "decay-study: slope %.4f over [%g, %g], recurrence %.1f",
                r.slope, r.window_lo, r.window_hi, r.recurrence_time);
  c.log(line);
  if (r.window_empty) c.failure("fit window contains fewer than two samples before recurrence");
  else if (!in_band) c.failure("decay slope " + std::to_string(r.slope) + " outside configured band");
  if (r.l2_drift > cfg.decay.l2_tol) c.failure("L2 drift " + sci(r.l2_drift) + " exceeds l2_tol");
}

// ------------------------------------------------------------------ project

struct SplitParts {
  KernelPair kernel;
  ScalarField s0;
  VectorField V0;
  bool annihilated = false;
  std::string warning;
};

SplitParts split_data(const ScalarField& rho1, const VectorField& u, double delta) {
  if (delta > 0.0) {
    DataSplit d = decompose_initial_data(rho1, u, CutoffSpec::from_delta(delta), delta);
    return {std::move(d.kernel), std::move(d.s0), std::move(d.V0), d.annihilated, d.warning};
  }
  KernelPair k = project_to_kernel(rho1, u);
  const SlabGrid& g = rho1.grid();
  const WaveState kw = to_wave_state(k, g);
  ScalarField s0 = rho1 - kw.s;
  s0.set_parity(Parity::Even);
  VectorField V0 = u;
  for (int a = 0; a < 3; ++a) V0[a] -= kw.V[a];
  return {std::move(k), std::move(s0), std::move(V0), false, ""};
}

void run_project(Ctx& c) {
  const auto& cfg = c.cfg;
  const SlabGrid g = c.grid();
  ScalarField rho1(g, Layout::Volume, Parity::Even);
  VectorField u;
  if (!cfg.data.input.empty()) {
    const fs::path in = cfg.data.input;
    rho1 = read_field(in / "rho1.rwl", g, Layout::Volume, Parity::Even);
    u.c = {read_field(in / "u1.rwl", g, Layout::Volume, Parity::Even),
           read_field(in / "u2.rwl", g, Layout::Volume, Parity::Even),
           read_field(in / "u3.rwl", g, Layout::Volume, Parity::Odd)};
  } else {
    std::tie(rho1, u) = primitive_from_config(cfg.data, g);
    dump_state(c, "input/", rho1, u, "rho1", "u");
  }

  std::vector<double> deltas = cfg.data.delta;
  if (deltas.empty()) deltas.push_back(0.0);
  std::vector<double> col_delta, col_k, col_w, col_inner, col_rel, col_idem, col_ann;
  for (double delta : deltas) {
    c.check_cancel();
    const SplitParts p = split_data(rho1, u, delta);
    const std::string sub = delta > 0.0 ? tagged("delta_", delta) + "/" : "delta_none/";
    write_field_dump(c.dir.file(sub + "q.rwl"), p.kernel.q);
    write_field_dump(c.dir.file(sub + "v1.rwl"), p.kernel.v[0]);
    write_field_dump(c.dir.file(sub + "v2.rwl"), p.kernel.v[1]);
    dump_state(c, sub, p.s0, p.V0, "s0", "V0_");

    const WaveState kw = to_wave_state(p.kernel, g);
    const WaveState ww{p.s0, p.V0};
    const double nk = std::sqrt(wave_inner(kw, kw)), nw = std::sqrt(wave_inner(ww, ww));
    const double in = wave_inner(kw, ww);
    const double rel = nk > 0.0 && nw > 0.0 ? std::abs(in) / (nk * nw) : 0.0;
    const KernelPair again = project_to_kernel(kw.s, kw.V);
    const double idem = nk > 0.0 ? std::sqrt(std::pow(l2_norm(again.q - p.kernel.q), 2) +
                                             std::pow(l2_norm(again.v[0] - p.kernel.v[0]), 2) +
                                             std::pow(l2_norm(again.v[1] - p.kernel.v[1]), 2)) /
                                       std::sqrt(std::pow(l2_norm(p.kernel.q), 2) +
                                                 std::pow(l2_norm(p.kernel.v[0]), 2) +
                                                 std::pow(l2_norm(p.kernel.v[1]), 2))
                                 : 0.0;
    col_delta.push_back(delta);
    col_k.push_back(nk);
    col_w.push_back(nw);
    col_inner.push_back(in);
    col_rel.push_back(rel);
    col_idem.push_back(idem);
    col_ann.push_back(p.annihilated ? 1.0 : 0.0);
    if (p.annihilated) c.note(sub + ": " + p.warning);
    if (rel > 1e-10) c.failure(sub + ": kernel and wave parts not orthogonal (" + sci(rel) + ")");
    if (idem > 1e-10) c.failure(sub + ": projection not idempotent (" + sci(idem) + ")");
    c.log("project " + sub + ": |kernel| " + sci(nk) + ", |wave| " + sci(nw) + ", cos " + sci(rel));
    c.dir.checkpoint();
  }
  write_csv(c.dir.file("orthogonality.csv"),
            {"delta", "kernel_l2", "wave_l2", "inner", "relative_inner", "idempotence_defect",
             "annihilated"},
            {col_delta, col_k, col_w, col_inner, col_rel, col_idem, col_ann});
}

// ----------------------------------------------------------------------- qg

QGTrajectory qg_from(Ctx& c, const ScalarField& q0, const std::string& prefix) {
  const auto& cfg = c.cfg;
  const double dt = qg_dt_from_config(cfg, q0);
  QGOptions o;
  o.cfl = cfg.run.cfl;
  o.filter = cfg.run.qg_filter;
  QGTrajectory tr = run_qg(q0, cfg.run.T, dt, cfg.run.snapshot_stride, o);
  write_csv(c.dir.file(prefix + "conservation.csv"),
            {"t", "energy", "pv_l2", "pv_l4", "pv_mean", "tail_fraction"},
            {tr.times, tr.energy, tr.pv_l2, tr.pv_l4, tr.pv_mean, tr.tail_fraction});
  for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshots/q_%04zu.rwl", k);
    write_field_dump(c.dir.file(prefix + name), tr.snapshots[k]);
  }
  write_csv(c.dir.file(prefix + "snapshots/times.csv"), {"index", "t"},
            {[&] {
               std::vector<double> i(tr.snapshot_times.size());
               for (std::size_t k = 0; k < i.size(); ++k) i[k] = static_cast<double>(k);
               return i;
             }(),
             tr.snapshot_times});
  c.write_json(prefix + "summary.json", {{"dt", tr.dt},
                                         {"steps", tr.times.size() - 1},
                                         {"energy_drift", tr.energy_drift()},
                                         {"pv_l2_drift", tr.pv_l2_drift()},
                                         {"under_resolved", tr.under_resolved},
                                         {"aborted", tr.aborted},
                                         {"filter", o.filter}});
  c.log("qg: " + std::to_string(tr.times.size() - 1) + " steps, energy drift " +
        sci(tr.energy_drift()) + ", PV drift " + sci(tr.pv_l2_drift()));
  if (tr.aborted) c.failure("qg run aborted: " + tr.message);
  if (tr.under_resolved) c.note("qg run under-resolved: spectral tail exceeded 1e-6 of the energy");
  if (!o.filter) {
    if (tr.energy_drift() > cfg.run.conservation_tol)
      c.failure("qg energy drift " + sci(tr.energy_drift()) + " exceeds conservation_tol");
    if (tr.pv_l2_drift() > cfg.run.conservation_tol)
      c.failure("qg PV drift " + sci(tr.pv_l2_drift()) + " exceeds conservation_tol");
  }
  c.dir.checkpoint();
  return tr;
}

void run_qg_study(Ctx& c) {
  const SlabGrid g = c.grid();
  qg_from(c, stream_from_config(c.cfg.data, g), "");
}

// ----------------------------------------------------------------------- ns

struct Cell {
  double eps = 0.0;
  NSTrajectory traj;
};

std::vector<Cell> run_cells(Ctx& c, const SlabGrid& g, const ScalarField& rho1,
                            const VectorField& u) {
  const auto& cfg = c.cfg;
  const auto& eps = cfg.physics.eps;
  const int workers = std::min<int>(cfg.run.threads, static_cast<int>(eps.size()));
  const int inner = std::max(1, cfg.run.threads / std::max(1, workers));
  auto prop = std::make_shared<const WavePropagator>(g, cfg.run.threads);

  std::vector<Cell> cells(eps.size());
  std::vector<std::exception_ptr> errors(eps.size());
  std::mutex log_mutex;
  parallel_for(eps.size(), workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      try {
        c.check_cancel();
        cells[k] = {eps[k], ns_run_from_config(cfg, eps[k], rho1, u, prop, inner)};
        std::lock_guard lock(log_mutex);
        c.log(tagged("ns: eps = ", eps[k]) + ", energy residual rate " +
              sci(cells[k].traj.energy_residual_rate()));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  });
  for (std::size_t k = 0; k < errors.size(); ++k) {
    if (!errors[k]) continue;
    try {
      std::rethrow_exception(errors[k]);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Interrupted) throw;
      throw Error(e.code(), tagged("eps = ", eps[k]) + ": " + e.what());
    }
  }
  return cells;
}

void write_cell(Ctx& c, const Cell& cell, const std::string& prefix) {
  const auto& cfg = c.cfg;
  const NSTrajectory& t = cell.traj;
  write_csv(c.dir.file(prefix + "ns.csv"),
            {"t", "energy", "dissipation", "forcing_work", "energy_residual", "mass",
             "min_density", "kinetic_l2", "sigma_ess_l2", "residual_mass", "viscous_bound"},
            {t.times, t.energy, t.dissipation, t.forcing_work, t.energy_residual, t.mass,
             t.min_density, t.kinetic_l2, t.sigma_ess_l2, t.residual_mass, t.viscous_bound});
  if (!t.snapshots.empty()) {
    const FluidState& f = t.snapshots.back();
    dump_state(c, prefix + "final/", f.sigma, f.m, "sigma", "m");
  }
  double mass_drift = 0.0;
  for (double m : t.mass) mass_drift = std::max(mass_drift, std::abs(m - t.mass.front()));
  const double mass_scale =
      t.snapshots.empty() ? 1.0
                          : std::max(1.0, sup_norm(t.snapshots.front().sigma) *
                                              t.snapshots.front().grid().volume());
  const double rate = t.energy_residual_rate();
  c.write_json(prefix + "summary.json", {{"eps", t.eps},
                                         {"mu", t.mu},
                                         {"dt", t.dt},
                                         {"steps", t.times.empty() ? 0 : t.times.size() - 1},
                                         {"energy_residual_rate", rate},
                                         {"symmetry_defect", t.symmetry_defect},
                                         {"mass_drift", mass_drift},
                                         {"aborted", t.aborted},
                                         {"message", t.message}});
  const std::string who = tagged("eps = ", cell.eps) + ": ";
  if (t.aborted) c.failure(who + "run aborted: " + t.message);
  if (rate > cfg.run.energy_tol)
    c.failure(who + "energy residual rate " + sci(rate) + " exceeds energy_tol");
  if (t.symmetry_defect > 1e-10)
    c.failure(who + "symmetry defect " + sci(t.symmetry_defect) + " exceeds 1e-10");
  if (mass_drift > 1e-10 * mass_scale) c.failure(who + "mass drift " + sci(mass_drift));
}

UniformBoundReport write_bounds(Ctx& c, const std::vector<Cell>& cells, const std::string& rel) {
  std::vector<UniformBounds> ub;
  for (const auto& cell : cells) ub.push_back(uniform_bounds(cell.traj));
  std::vector<double> e, k, s, r, rs, v;
  for (const auto& b : ub) {
    e.push_back(b.eps);
    k.push_back(b.kinetic_l2);
    s.push_back(b.sigma_ess_l2);
    r.push_back(b.residual_mass);
    rs.push_back(b.residual_mass_scaled);
    v.push_back(b.viscous_bound);
  }
  write_csv(c.dir.file(rel),
            {"eps", "kinetic_l2", "sigma_ess_l2", "residual_mass", "residual_mass_scaled",
             "viscous_bound"},
            {e, k, s, r, rs, v});
  const UniformBoundReport rep = uniform_bound_monitor(ub, c.cfg.run.bound_factor);
  if (!rep.within_bounds)
    c.failure("uniform-bound monitors grew beyond bound_factor across the eps sweep");
  return rep;
}

void run_ns_study(Ctx& c) {
  const SlabGrid g = c.grid();
  const auto [rho1, u] = primitive_from_config(c.cfg.data, g);
  const std::vector<Cell> cells = run_cells(c, g, rho1, u);
  for (const Cell& cell : cells) write_cell(c, cell, tagged("eps_", cell.eps) + "/");
  if (cells.size() > 1) write_bounds(c, cells, "bounds.csv");
}

// -------------------------------------------------------------- limit study

json bounds_json(const UniformBoundReport& r) {
  return {{"kinetic_ratio", r.kinetic_ratio},
          {"sigma_ess_ratio", r.sigma_ess_ratio},
          {"viscous_ratio", r.viscous_ratio},
          {"residual_exponent",
           std::isfinite(r.residual_exponent) ? json(r.residual_exponent) : json("inf")},
          {"residual_fit_points", r.residual_fit_points},
          {"within_bounds", r.within_bounds}};
}

void run_limit(Ctx& c) {
  const auto& cfg = c.cfg;
  const SlabGrid g = c.grid();
  const auto [rho1, u] = primitive_from_config(cfg.data, g);
  if (!cfg.data.delta.empty()) c.note("limit-study ignores data.delta; data are projected exactly");

  // Limit data: the projection of the compressible data; the remainder is the
  // acoustic part that the reference state carries along.
  const SplitParts split = split_data(rho1, u, 0.0);
  const QGTrajectory qg = qg_from(c, split.kernel.q, "qg/");
  c.check_cancel();

  const std::vector<Cell> cells = run_cells(c, g, rho1, u);
  const WaveState w0{split.s0, split.V0};
  const WavePropagator wave_prop(g, to_spectrum(w0), cfg.run.threads);
  const PressureLaw law(cfg.physics.gamma);

  std::vector<LimitErrorSeries> series;
  std::vector<double> rel_max;
  for (const Cell& cell : cells) {
    const std::string sub = tagged("eps_", cell.eps) + "/";
    write_cell(c, cell, sub);
    if (cell.traj.snapshots.empty()) {
      c.failure(sub + ": no snapshots");
      continue;
    }
    LimitErrorSeries le = limit_error(cell.traj, qg, cfg.run.window);
    if (le.interpolated) c.note(sub + ": limit snapshots interpolated to compressible times");

    std::vector<double> rk, rf, rt;
    for (std::size_t k = 0; k < cell.traj.snapshots.size(); ++k) {
      const double t = cell.traj.snapshot_times[k];
      const FluidState& f = cell.traj.snapshots[k];
      std::size_t j = 0;
      while (j < qg.snapshot_times.size() &&
             std::abs(qg.snapshot_times[j] - t) > 1e-9 * std::max(1.0, t))
        ++j;
      if (j == qg.snapshot_times.size()) {
        rk.push_back(nan_v);
        rf.push_back(nan_v);
        rt.push_back(nan_v);
        continue;
      }
      const KernelPair kq = kernel_pair_from_stream(qg.snapshots[j]);
      const WaveState ref = to_wave_state(kq, g);
      const WaveState wt = wave_prop.propagate(w0, t, cell.eps);
      ScalarField r = ref.s + wt.s;
      r *= cell.eps;
      for (std::size_t n = 0; n < r.size(); ++n) r[n] += 1.0;
      VectorField U = ref.V;
      for (int a = 0; a < 3; ++a) U[a] += wt.V[a];
      double rmin = std::numeric_limits<double>::infinity();
      for (double x : r.values()) rmin = std::min(rmin, x);
      if (rmin <= 0.0) {
        rk.push_back(nan_v);
        rf.push_back(nan_v);
        rt.push_back(nan_v);
        continue;
      }
      const RelativeEntropy re = relative_entropy(f.density(), f.velocity(), r, U, cell.eps, law);
      rk.push_back(re.kinetic);
      rf.push_back(re.free);
      rt.push_back(re.total());
    }
    double mx = 0.0;
    for (double x : rt)
      if (std::isfinite(x)) mx = std::max(mx, x);
    rel_max.push_back(mx);
    if (rk.size() != le.times.size()) {
      rk.resize(le.times.size(), nan_v);
      rf.resize(le.times.size(), nan_v);
      rt.resize(le.times.size(), nan_v);
    }
    write_csv(c.dir.file(sub + "limit_error.csv"),
              {"t", "sigma_l2", "sigma_l1", "momentum_l2", "momentum_l1", "rel_entropy_kinetic",
               "rel_entropy_free", "rel_entropy"},
              {le.times, le.sigma_l2, le.sigma_l1, le.momentum_l2, le.momentum_l1, rk, rf, rt});
    series.push_back(std::move(le));
    c.dir.checkpoint();
  }
  if (series.size() != cells.size()) return;

  const UniformBoundReport ub = write_bounds(c, cells, "bounds.csv");
  const ConvergenceReport cr = convergence_report(series);
  std::vector<double> e, mu, sl2, sl1, ml2, ml1, kin, ess, res, ress, visc, rate;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& t = cells[k].traj;
    e.push_back(cells[k].eps);
    mu.push_back(t.mu);
    sl2.push_back(series[k].sup_sigma_l2);
    sl1.push_back(series[k].sup_sigma_l1);
    ml2.push_back(series[k].sup_momentum_l2);
    ml1.push_back(series[k].sup_momentum_l1);
    kin.push_back(ub.runs[k].kinetic_l2);
    ess.push_back(ub.runs[k].sigma_ess_l2);
    res.push_back(ub.runs[k].residual_mass);
    ress.push_back(ub.runs[k].residual_mass_scaled);
    visc.push_back(ub.runs[k].viscous_bound);
    rate.push_back(t.energy_residual_rate());
  }
  write_csv(c.dir.file("summary.csv"),
            {"eps", "mu", "sigma_err_l2", "sigma_err_l1", "momentum_err_l2", "momentum_err_l1",
             "kinetic_l2", "sigma_ess_l2", "residual_mass", "residual_mass_scaled",
             "viscous_bound", "energy_residual_rate", "rel_entropy_max"},
            {e, mu, sl2, sl1, ml2, ml1, kin, ess, res, ress, visc, rate, rel_max});
  c.write_json("summary.json",
               {{"window", cfg.run.window},
                {"convergence",
                 {{"strictly_decreasing", cr.strictly_decreasing},
                  {"sigma_ratio", cr.sigma_ratio},
                  {"momentum_ratio", cr.momentum_ratio},
                  {"sigma_order", cr.sigma_order},
                  {"momentum_order", cr.momentum_order},
                  {"error_ratio_limit", cfg.run.error_ratio}}},
                {"bounds", bounds_json(ub)},
                {"qg", {{"energy_drift", qg.energy_drift()}, {"pv_l2_drift", qg.pv_l2_drift()}}}});

  char line[200];
  std::snprintf(line, sizeof line,
                "limit-study: sigma ratio %.3f, momentum ratio %.3f, orders %.2f / %.2f",
                cr.sigma_ratio, cr.momentum_ratio, cr.sigma_order, cr.momentum_order);
  c.log(line);
  if (!cr.strictly_decreasing) c.failure("limit errors do not decrease strictly along the sweep");
  if (!(cr.sigma_ratio < cfg.run.error_ratio))
    c.failure("sigma error ratio " + std::to_string(cr.sigma_ratio) + " not below error_ratio");
  if (!(cr.momentum_ratio < cfg.run.error_ratio))
    c.failure("momentum error ratio " + std::to_string(cr.momentum_ratio) + " not below error_ratio");
  if (ub.residual_fit_points >= 2 && ub.residual_exponent < cfg.run.min_residual_exponent)
    c.failure("residual-mass exponent " + std::to_string(ub.residual_exponent) +
              " below min_residual_exponent");
  if (ub.residual_fit_points < 2)
    c.note("residual mass vanished on all but " + std::to_string(ub.residual_fit_points) +
           " runs; exponent not fitted");
}

}  // namespace

// ----------------------------------------------------------- initial data

ScalarField stream_from_config(const DataConfig& d, const SlabGrid& g) {
  if (d.preset == "monopole") return gaussian_monopole(g, d.amplitude, d.width);
  if (d.preset == "dipole") return vortex_dipole(g, d.amplitude, d.width, d.separation);
  if (d.preset == "pair") return vortex_pair(g, d.amplitude, d.width, d.separation);
  if (d.preset == "random") return random_band_limited(g, d.kmin, d.kmax, d.amplitude, d.seed);
  fail(ErrorCode::Config, "preset '" + d.preset + "' does not define a stream function");
}

WaveSpectrum wave_from_config(const DataConfig& d, const SlabGrid& g) {
  if (d.preset == "acoustic-pulse")
    return acoustic_pulse(g, d.band_lo, d.band_hi, d.vertical_mode, d.amplitude);
  require(d.preset == "random-wave", ErrorCode::Config,
          "preset '" + d.preset + "' does not define wave data");
  SplitMix64 rng(d.seed);
  ScalarField s(g, Layout::Volume);
  VectorField V = VectorField::zeros(g, Layout::Volume, 3);
  for (double& x : s.values()) x = rng.normal();
  for (auto& f : V.c)
    for (double& x : f.values()) x = rng.normal();
  auto [se, Ve] = enforce_symmetry_class(s, V);
  WaveSpectrum w = to_spectrum(WaveState{std::move(se), std::move(Ve)});
  const CutoffSpec band = CutoffSpec::band(std::max(d.kmin, 1e-12), d.kmax, d.vertical_mode);
  for (auto& f : w.c) f = apply_frequency_cutoff(f, band);
  const WaveState st = to_state(w);
  const double m = std::max(sup_norm(st.s), max_sup(st.V));
  if (m > 0.0)
    for (auto& f : w.c) f *= d.amplitude / m;
  return w;
}

Branch branch_from_config(const DataConfig& d) {
  if (d.branch == "fast") return Branch::Fast;
  if (d.branch == "slow") return Branch::Slow;
  return Branch::All;
}

std::pair<ScalarField, VectorField> primitive_from_config(const DataConfig& d, const SlabGrid& g) {
  const ScalarField q = stream_from_config(d, g);
  const KernelPair k = kernel_pair_from_stream(q);
  ScalarField rho1 = extrude(q);
  rho1.set_parity(Parity::Even);
  if (d.wave_amplitude > 0.0) {
    const double w2 = d.width * d.width;
    rho1 += ScalarField::from_function(
        g, Layout::Volume,
        [&](double x, double y, double z) {
          return d.wave_amplitude * std::exp(-(x * x + y * y) / w2) * std::cos(std::numbers::pi * z);
        },
        Parity::Even);
  }
  VectorField u;
  u.c = {extrude(k.v[0]), extrude(k.v[1]), ScalarField(g, Layout::Volume, Parity::Odd)};
  u[0].set_parity(Parity::Even);
  u[1].set_parity(Parity::Even);
  return {std::move(rho1), std::move(u)};
}

std::optional<ScalarField> forcing_from_config(const PhysicsConfig& p, const SlabGrid& g) {
  if (p.forcing == "gaussian-hill") return gaussian_hill(g, p.forcing_amplitude, p.forcing_width);
  return std::nullopt;
}

double qg_dt_from_config(const ExperimentConfig& cfg, const ScalarField& q0) {
  if (cfg.run.dt > 0.0) return cfg.run.dt;
  // 0.8 of the limit at t = 0 leaves room for the speed to grow.
  const double vmax = qg_max_speed(q0);
  const double dx = std::min(q0.grid().dx(), q0.grid().dy());
  return vmax > 0.0 ? std::min(cfg.run.T, 0.8 * cfg.run.cfl * dx / vmax) : cfg.run.T;
}

NSTrajectory ns_run_from_config(const ExperimentConfig& cfg, double eps, const ScalarField& rho1,
                                const VectorField& u, std::shared_ptr<const WavePropagator> prop,
                                int threads) {
  const SlabGrid& g = rho1.grid();
  if (!prop) prop = std::make_shared<const WavePropagator>(g, threads);
  NSParams p;
  p.eps = eps;
  p.mu = cfg.physics.mu(eps);
  p.cfl = cfg.run.cfl;
  p.symmetry_every = cfg.run.symmetry_every;
  p.threads = threads;
  NSSolver solver(g, p, PressureLaw(cfg.physics.gamma), forcing_from_config(cfg.physics, g),
                  std::move(prop));
  NSRunOptions o;
  o.T = cfg.run.T;
  o.dt = cfg.run.dt;
  o.snapshot_stride = cfg.run.snapshot_stride;
  o.ess_a = cfg.run.ess_a;
  return run_ns(solver, FluidState::from_primitive(rho1, u, eps), o);
}

// ------------------------------------------------------------------ runner

ExperimentResult run_experiment(const ExperimentConfig& cfg, const fs::path& out,
                                const RunControl& control) {
  ExperimentResult result;
  result.out_dir = out;
  ArtifactDir dir(out);
  Ctx c{cfg, dir, result, control};
  dir.write_text("config.ini", cfg.source);
  dir.write_text("effective.ini", describe(cfg));
  dir.checkpoint();
  const std::string name(study_name(cfg.study));
  try {
    c.check_cancel();
    switch (cfg.study) {
      case Study::Propagate: run_propagate(c); break;
      case Study::Decay: run_decay(c); break;
      case Study::Project: run_project(c); break;
      case Study::QGRun: run_qg_study(c); break;
      case Study::NSRun: run_ns_study(c); break;
      case Study::LimitStudy: run_limit(c); break;
    }
    c.check_cancel();
  } catch (const Error& e) {
    throw Error(e.code(), name + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::Internal, name + ": " + e.what());
  }
  json status = {{"study", name},
                 {"ok", result.ok()},
                 {"failures", result.failures},
                 {"notes", result.notes}};
  c.write_json("status.json", status);
  dir.finish(true);
  return result;
}

}  // namespace rwl
