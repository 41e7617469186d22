#pragma once

#include <string>
#include <vector>

#include "rwl/field.hpp"
#include "rwl/pressure.hpp"

namespace rwl {

struct NSTrajectory;
struct QGTrajectory;

/// Pointwise H(rho) - H'(r)(rho - r) - H(r).
ScalarField free_energy_distance(const ScalarField& rho, const ScalarField& r,
                                 const PressureLaw& law);

struct RelativeEntropy {
  double kinetic = 0.0;
  double free = 0.0;
  double total() const { return kinetic + free; }
};

/// integral of rho |u - U|^2 / 2 + (1/eps^2)(H(rho) - H'(r)(rho - r) - H(r)).
RelativeEntropy relative_entropy(const ScalarField& rho, const VectorField& u, const ScalarField& r,
                                 const VectorField& U, double eps, const PressureLaw& law);

/// chi is 1 on [1 - a, 1 + a] and vanishes outside (1 - 2a, 1 + 2a).
struct EssResSpec {
  double a = 0.25;
  double chi(double rho) const;
};

/// (chi(rho) f, (1 - chi(rho)) f).
std::pair<ScalarField, ScalarField> ess_res_split(const ScalarField& f, const ScalarField& rho,
                                                  const EssResSpec& band);

/// Per-run maxima of the uniform-bound monitors.
struct UniformBounds {
  double eps = 0.0;
  double kinetic_l2 = 0.0;
  double sigma_ess_l2 = 0.0;
  double residual_mass = 0.0;
  /// residual_mass / eps^2.
  double residual_mass_scaled = 0.0;
  double viscous_bound = 0.0;
};

UniformBounds uniform_bounds(const NSTrajectory& traj);

struct UniformBoundReport {
  std::vector<UniformBounds> runs;
  /// max over runs / value at the coarsest eps, per monitor (NaN if that is 0).
  double kinetic_ratio = 0.0;
  double sigma_ess_ratio = 0.0;
  double viscous_ratio = 0.0;
  /// Least-squares exponent of residual_mass vs eps over runs where it is
  /// nonzero; `residual_fit_points` tells how many runs entered the fit.
  double residual_exponent = 0.0;
  int residual_fit_points = 0;
  bool within_bounds = true;
};

/// Sweep summary: every monitor must stay within `factor` times its value at
/// the coarsest eps.
UniformBoundReport uniform_bound_monitor(const std::vector<UniformBounds>& runs,
                                         double factor = 10.0);

/// Windowed norms over [-W, W]^2 of a planar field.
double windowed_l2(const ScalarField& f, double W);
double windowed_l1(const ScalarField& f, double W);

struct LimitErrorSeries {
  double eps = 0.0;
  std::vector<double> times;
  std::vector<double> sigma_l2, sigma_l1;
  std::vector<double> momentum_l2, momentum_l1;
  double sup_sigma_l2 = 0.0, sup_sigma_l1 = 0.0;
  double sup_momentum_l2 = 0.0, sup_momentum_l1 = 0.0;
  /// Set when the limit snapshots were interpolated to the compressible times.
  bool interpolated = false;
};

/// Distances between the vertical averages of sigma and sqrt(rho) u_h from a
/// compressible run and (q, perp_grad_h q) from a limit run, over the window
/// [-W, W]^2. Snapshot times that do not coincide are matched by cubic
/// Lagrange interpolation of the limit snapshots.
LimitErrorSeries limit_error(const NSTrajectory& ns, const QGTrajectory& qg, double W);

struct ConvergenceReport {
  std::vector<LimitErrorSeries> runs;
  /// Least-squares slopes of log sup error against log eps.
  double sigma_order = 0.0;
  double momentum_order = 0.0;
  bool strictly_decreasing = false;
  /// finest-eps error / coarsest-eps error, for both quantities.
  double sigma_ratio = 0.0;
  double momentum_ratio = 0.0;
};

/// Runs must be ordered from the coarsest to the finest eps.
ConvergenceReport convergence_report(std::vector<LimitErrorSeries> runs);

/// Least-squares slope of log y against log x over entries with x, y > 0.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rwl
