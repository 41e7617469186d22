#include "rwl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rwl/cutoff.hpp"
#include "rwl/error.hpp"
#include "rwl/kernel.hpp"
#include "rwl/ns.hpp"
#include "rwl/qg.hpp"
#include "rwl/spectral_ops.hpp"

namespace rwl {
namespace {

// Cubic Lagrange interpolation of snapshots at time t from the four nearest
// nodes (fewer if the trajectory is shorter).
ScalarField interpolate(const std::vector<double>& times, const std::vector<ScalarField>& snaps,
                        double t) {
  const std::size_t n = times.size();
  const std::size_t npts = std::min<std::size_t>(4, n);
  std::size_t hi = std::lower_bound(times.begin(), times.end(), t) - times.begin();
  std::size_t lo = hi >= npts / 2 ? hi - npts / 2 : 0;
  lo = std::min(lo, n - npts);
  ScalarField out(snaps[0].grid(), snaps[0].layout(), snaps[0].parity());
  for (std::size_t a = lo; a < lo + npts; ++a) {
    double w = 1.0;
    for (std::size_t b = lo; b < lo + npts; ++b)
      if (b != a) w *= (t - times[b]) / (times[a] - times[b]);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += w * snaps[a][k];
  }
  return out;
}

double ratio(double worst, double base) {
  if (base > 0.0) return worst / base;
  return worst > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace

ScalarField free_energy_distance(const ScalarField& rho, const ScalarField& r,
                                 const PressureLaw& law) {
  require_same_shape(rho.shape(), r.shape());
  ScalarField out(rho.grid(), rho.layout(), rho.parity());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = law.free_energy_distance(rho[n], r[n]);
  return out;
}

RelativeEntropy relative_entropy(const ScalarField& rho, const VectorField& u, const ScalarField& r,
                                 const VectorField& U, double eps, const PressureLaw& law) {
  require(eps > 0.0, ErrorCode::InvalidArgument, "eps must be positive");
  require(u.dim() == U.dim(), ErrorCode::InvalidArgument, "velocity dimensions differ");
  require_same_shape(rho.shape(), r.shape());
  require_same_shape(rho.shape(), u.shape());
  require_same_shape(rho.shape(), U.shape());
  const double cell = rho.shape().cell();
  RelativeEntropy e;
  for (std::size_t n = 0; n < rho.size(); ++n) {
    double du2 = 0.0;
    for (int a = 0; a < u.dim(); ++a) {
      const double d = u[a][n] - U[a][n];
      du2 += d * d;
    }
    e.kinetic += 0.5 * rho[n] * du2;
    e.free += law.free_energy_distance(rho[n], r[n]);
  }
  e.kinetic *= cell;
  e.free *= cell / (eps * eps);
  return e;
}

double EssResSpec::chi(double rho) const {
  return smooth_step((2.0 * a - std::abs(rho - 1.0)) / a);
}

std::pair<ScalarField, ScalarField> ess_res_split(const ScalarField& f, const ScalarField& rho,
                                                  const EssResSpec& band) {
  require_same_shape(f.shape(), rho.shape());
  require(band.a > 0.0 && band.a < 0.5, ErrorCode::InvalidArgument,
          "essential half-width must lie in (0, 1/2)");
  ScalarField ess(f.grid(), f.layout(), f.parity());
  ScalarField res(f.grid(), f.layout(), f.parity());
  for (std::size_t n = 0; n < f.size(); ++n) {
    ess[n] = band.chi(rho[n]) * f[n];
    res[n] = f[n] - ess[n];
  }
  return {ess, res};
}

UniformBounds uniform_bounds(const NSTrajectory& traj) {
  auto peak = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
  };
  UniformBounds b;
  b.eps = traj.eps;
  b.kinetic_l2 = peak(traj.kinetic_l2);
  b.sigma_ess_l2 = peak(traj.sigma_ess_l2);
  b.residual_mass = peak(traj.residual_mass);
  b.residual_mass_scaled = b.residual_mass / (traj.eps * traj.eps);
  b.viscous_bound = peak(traj.viscous_bound);
  return b;
}

UniformBoundReport uniform_bound_monitor(const std::vector<UniformBounds>& runs, double factor) {
  require(!runs.empty(), ErrorCode::InvalidArgument, "no runs to monitor");
  UniformBoundReport rep;
  rep.runs = runs;
  const auto coarse = std::max_element(runs.begin(), runs.end(),
                                       [](const auto& a, const auto& b) { return a.eps < b.eps; });
  double k = 0, s = 0, v = 0, r = 0;
  for (const UniformBounds& b : runs) {
    k = std::max(k, b.kinetic_l2);
    s = std::max(s, b.sigma_ess_l2);
    v = std::max(v, b.viscous_bound);
    r = std::max(r, b.residual_mass_scaled);
  }
  rep.kinetic_ratio = ratio(k, coarse->kinetic_l2);
  rep.sigma_ess_ratio = ratio(s, coarse->sigma_ess_l2);
  rep.viscous_ratio = ratio(v, coarse->viscous_bound);
  const double residual_ratio = ratio(r, coarse->residual_mass_scaled);

  std::vector<double> e, m;
  for (const UniformBounds& b : runs)
    if (b.residual_mass > 0.0) {
      e.push_back(b.eps);
      m.push_back(b.residual_mass);
    }
  rep.residual_fit_points = static_cast<int>(e.size());
  rep.residual_exponent =
      e.size() >= 2 ? log_log_slope(e, m) : std::numeric_limits<double>::infinity();
  rep.within_bounds = rep.kinetic_ratio <= factor && rep.sigma_ess_ratio <= factor &&
                      rep.viscous_ratio <= factor && residual_ratio <= factor;
  return rep;
}

double windowed_l2(const ScalarField& f, double W) {
  require(f.layout() == Layout::Planar, ErrorCode::InvalidArgument, "window norms need planar fields");
  const SlabGrid& g = f.grid();
  double s = 0.0;
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j)
      if (std::abs(g.x(i)) <= W && std::abs(g.y(j)) <= W) s += f.at(i, j) * f.at(i, j);
  return std::sqrt(s * g.dx() * g.dy());
}

double windowed_l1(const ScalarField& f, double W) {
  require(f.layout() == Layout::Planar, ErrorCode::InvalidArgument, "window norms need planar fields");
  const SlabGrid& g = f.grid();
  double s = 0.0;
  for (int i = 0; i < g.nx(); ++i)
    for (int j = 0; j < g.ny(); ++j)
      if (std::abs(g.x(i)) <= W && std::abs(g.y(j)) <= W) s += std::abs(f.at(i, j));
  return s * g.dx() * g.dy();
}

LimitErrorSeries limit_error(const NSTrajectory& ns, const QGTrajectory& qg, double W) {
  require(W > 0.0, ErrorCode::InvalidArgument, "window half-width must be positive");
  require(!ns.snapshots.empty() && !qg.snapshots.empty(), ErrorCode::InvalidArgument,
          "limit_error needs snapshots from both runs");
  LimitErrorSeries out;
  out.eps = ns.eps;
  for (std::size_t n = 0; n < ns.snapshots.size(); ++n) {
    const double t = ns.snapshot_times[n];
    const FluidState& s = ns.snapshots[n];
    require(s.grid() == qg.snapshots[0].grid(), ErrorCode::GridMismatch,
            "limit_error: runs use different horizontal grids");
    const auto hit = std::find_if(qg.snapshot_times.begin(), qg.snapshot_times.end(),
                                  [t](double x) { return std::abs(x - t) <= 1e-9 * std::max(1.0, t); });
    ScalarField q = hit != qg.snapshot_times.end()
                        ? qg.snapshots[hit - qg.snapshot_times.begin()]
                        : interpolate(qg.snapshot_times, qg.snapshots, t);
    if (hit == qg.snapshot_times.end()) out.interpolated = true;

    const ScalarField rho = s.density();
    VectorField mom;
    for (int a = 0; a < 2; ++a) {
      ScalarField c = s.m[a];
      for (std::size_t k = 0; k < c.size(); ++k) c[k] /= std::sqrt(rho[k]);
      mom.c.push_back(std::move(c));
    }
    mom.c.push_back(s.m[2]);
    const auto [sbar, mbar] = vertical_average(s.sigma, mom);
    const KernelPair k = kernel_pair_from_stream(q);

    const ScalarField ds = sbar - q;
    const ScalarField d1 = mbar[0] - k.v[0];
    const ScalarField d2 = mbar[1] - k.v[1];
    ScalarField dm(d1.grid(), Layout::Planar);
    for (std::size_t a = 0; a < dm.size(); ++a) dm[a] = std::hypot(d1[a], d2[a]);

    out.times.push_back(t);
    out.sigma_l2.push_back(windowed_l2(ds, W));
    out.sigma_l1.push_back(windowed_l1(ds, W));
    out.momentum_l2.push_back(windowed_l2(dm, W));
    out.momentum_l1.push_back(windowed_l1(dm, W));
    out.sup_sigma_l2 = std::max(out.sup_sigma_l2, out.sigma_l2.back());
    out.sup_sigma_l1 = std::max(out.sup_sigma_l1, out.sigma_l1.back());
    out.sup_momentum_l2 = std::max(out.sup_momentum_l2, out.momentum_l2.back());
    out.sup_momentum_l1 = std::max(out.sup_momentum_l1, out.momentum_l1.back());
  }
  return out;
}

ConvergenceReport convergence_report(std::vector<LimitErrorSeries> runs) {
  require(!runs.empty(), ErrorCode::InvalidArgument, "no runs to compare");
  ConvergenceReport rep;
  rep.runs = std::move(runs);
  std::vector<double> e, s, m;
  bool dec = rep.runs.size() >= 2;
  for (std::size_t n = 0; n < rep.runs.size(); ++n) {
    const LimitErrorSeries& r = rep.runs[n];
    e.push_back(r.eps);
    s.push_back(r.sup_sigma_l2);
    m.push_back(r.sup_momentum_l2);
    if (n > 0) {
      require(r.eps < rep.runs[n - 1].eps, ErrorCode::InvalidArgument,
              "runs must be ordered from coarse to fine eps");
      dec = dec && s[n] < s[n - 1] && m[n] < m[n - 1];
    }
  }
  rep.strictly_decreasing = dec;
  rep.sigma_order = log_log_slope(e, s);
  rep.momentum_order = log_log_slope(e, m);
  rep.sigma_ratio = ratio(s.back(), s.front());
  rep.momentum_ratio = ratio(m.back(), m.front());
  return rep;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), ErrorCode::InvalidArgument, "slope fit needs paired samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0 && y[k] > 0.0)) continue;
    const double a = std::log(x[k]), b = std::log(y[k]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
    ++n;
  }
  const double den = n * sxx - sx * sx;
  return n >= 2 && den > 0.0 ? (n * sxy - sx * sy) / den : std::nan("");
}

}  // namespace rwl
