#pragma once

#include <string>
#include <vector>

#include "rwl/field.hpp"

namespace rwl {

// Quasi-geostrophic limit system on the horizontal torus. The state variable
// is the potential vorticity P = Laplace_h q - q, transported by v = perp_grad_h q:
//   dP/dt + v . grad_h P = 0.

ScalarField potential_vorticity(const ScalarField& q);

/// q_hat = -P_hat / (1 + |xi|^2), the exact inverse of q -> Laplace_h q - q.
SpectralField invert_helmholtz(const SpectralField& P);
ScalarField invert_helmholtz(const ScalarField& P);

/// -v . grad_h P with v = perp_grad_h q, evaluated with 2/3-rule dealiasing.
ScalarField qg_rhs(const ScalarField& q);

/// The same tendency written as -perp_grad_h q . grad_h (Laplace_h q), which is
/// equal because perp_grad_h q . grad_h q = 0.
ScalarField qg_rhs_laplacian_form(const ScalarField& q);

/// E = integral of |grad_h q|^2 + q^2 over the torus.
double qg_energy(const ScalarField& q);

/// max |perp_grad_h q| on the grid.
double qg_max_speed(const ScalarField& q);

/// Fraction of E carried by modes in the top sixth of the dealiased band,
/// (5/6) N/3 < max(|m1|, |m2|) <= N/3.
double qg_tail_fraction(const ScalarField& q);

struct QGOptions {
  double cfl = 0.5;
  /// Exponential spectral filter applied after every step. Off by default;
  /// enabling it departs from the inviscid model.
  bool filter = false;
};

/// One classical RK4 step on P. Throws Error(CflViolation) when
/// dt > cfl * dx / max|v|.
ScalarField qg_step(const ScalarField& q, double dt, const QGOptions& opt = {});

struct QGTrajectory {
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> pv_l2;
  std::vector<double> pv_l4;
  std::vector<double> pv_mean;
  std::vector<double> tail_fraction;
  std::vector<double> snapshot_times;
  std::vector<ScalarField> snapshots;
  double dt = 0.0;
  bool under_resolved = false;
  /// Set when a non-finite value appeared; snapshots end at the last good state.
  bool aborted = false;
  std::string message;

  double energy_drift() const;
  double pv_l2_drift() const;
};

/// Integrates to T with a constant step no larger than dt that divides T.
/// Diagnostics are recorded every step, snapshots every `stride` steps and at T.
QGTrajectory run_qg(const ScalarField& q0, double T, double dt, int stride,
                    const QGOptions& opt = {});

}  // namespace rwl
