#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rwl/field.hpp"
#include "rwl/pressure.hpp"
#include "rwl/wave.hpp"

namespace rwl {

/// Compressible state in the scaled variables sigma = (rho - 1)/eps and
/// m = rho u. Symmetry class: sigma, m1, m2 even in x3, m3 odd.
struct FluidState {
  ScalarField sigma;
  VectorField m;
  double eps = 1.0;

  /// Builds (sigma, m) from rho = 1 + eps rho1 and u.
  static FluidState from_primitive(const ScalarField& rho1, const VectorField& u, double eps);

  ScalarField density() const;
  VectorField velocity() const;
  const SlabGrid& grid() const { return sigma.grid(); }
};

struct NSParams {
  double eps = 0.2;
  double mu = 1e-2;
  double cfl = 0.5;
  /// Symmetry class re-enforced every this many steps.
  int symmetry_every = 16;
  /// Vacuum guard: the run aborts when min rho falls to this value.
  double rho_min = 1e-3;
  /// Drops the nonlinear remainder; the step is then the exact wave group.
  bool linear_only = false;
  int threads = 1;
};

/// Tendencies (d sigma/dt, dm/dt) in wave-state layout.
using Tendency = WaveState;

/// Stiff part -(1/eps) B(sigma, m): d sigma = -div m / eps,
/// dm = -(omega x m + grad sigma) / eps.
Tendency ns_stiff_part(const FluidState& s);

/// Everything else in the momentum balance:
///   -div(m (x) u) - grad r(sigma) + mu (Laplace u + grad div u / 3) + rho grad G,
/// with r = [p(1 + eps sigma) - p(1) - eps sigma]/eps^2. The rotation term
/// (1/eps) rho omega x u equals (1/eps) omega x m and lies entirely in the
/// stiff part. Products are dealiased; throws Error(Vacuum) when rho <= rho_min.
Tendency ns_nonlinear_remainder(const FluidState& s, const PressureLaw& law, double mu,
                                const ScalarField* G, double rho_min = 1e-3);

/// Full right-hand side assembled directly from the primitive form
///   d rho = -div(rho u),
///   d(rho u) = -div(rho u (x) u) - rho omega x u / eps - grad p(rho) / eps^2
///              + div S(grad u) + rho grad G,
/// converted to (sigma, m). Independent of the stiff/remainder split.
Tendency ns_full_rhs(const FluidState& s, const PressureLaw& law, double mu, const ScalarField* G);

/// Energy functional integral of |m|^2/(2 rho) + (1/eps^2)(H(rho) - H'(1)(rho - 1) - H(1)).
double ns_energy(const FluidState& s, const PressureLaw& law);

/// Dissipation rate integral of S(grad u) : grad u.
double ns_dissipation_rate(const FluidState& s, double mu);

/// Forcing power integral of rho grad G . u.
double ns_forcing_power(const FluidState& s, const ScalarField& G);

/// Integrating-factor RK4 solver: the stiff part is propagated exactly, the
/// remainder by classical RK4 in the interaction picture.
class NSSolver {
 public:
  NSSolver(SlabGrid grid, NSParams params, PressureLaw law,
           std::optional<ScalarField> G = std::nullopt);
  NSSolver(SlabGrid grid, NSParams params, PressureLaw law, std::optional<ScalarField> G,
           std::shared_ptr<const WavePropagator> prop);

  const NSParams& params() const { return params_; }
  const PressureLaw& law() const { return law_; }

  /// Advances by dt. Throws Error(CflViolation) or Error(Vacuum). If given,
  /// `dissipation` and `forcing` receive the RK4-weighted integrals of the
  /// dissipation rate and of the forcing power over the step.
  FluidState step(const FluidState& s, double dt, double* dissipation = nullptr,
                  double* forcing = nullptr);

  /// The same step on dealiased spectral coefficients (sigma, m1, m2, m3).
  void step_hat(WaveSpectrum& w, double dt, double* dissipation = nullptr,
                double* forcing = nullptr);

  /// Largest dt allowed by the advective and viscous limits at state s.
  double max_stable_dt(const FluidState& s) const;

  std::size_t steps_taken() const { return steps_; }

 private:
  WaveSpectrum remainder_hat(const WaveSpectrum& w, double* diss, double* force,
                             double* vmax) const;
  const WavePropagator::Exponential& exponential(double dt);

  SlabGrid grid_;
  NSParams params_;
  PressureLaw law_;
  std::optional<ScalarField> G_;
  VectorField gradG_;
  std::shared_ptr<const WavePropagator> prop_;
  double cached_dt_ = -1.0;
  std::optional<WavePropagator::Exponential> full_, half_;
  std::size_t steps_ = 0;
};

struct NSTrajectory {
  double eps = 0.0;
  double mu = 0.0;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> energy;
  /// Cumulative integrals from 0 to t.
  std::vector<double> dissipation;
  std::vector<double> forcing_work;
  /// energy(t) + dissipation(t) - energy(0) - forcing_work(t).
  std::vector<double> energy_residual;
  std::vector<double> mass;
  std::vector<double> min_density;
  /// || sqrt(rho) u ||_L2.
  std::vector<double> kinetic_l2;
  /// || [sigma]_ess ||_L2.
  std::vector<double> sigma_ess_l2;
  /// || [rho]_res ||^gamma_{L^gamma} + || [1]_res ||^gamma_{L^gamma}.
  std::vector<double> residual_mass;
  /// Cumulative mu * integral |grad u + grad^t u - (2/3) div u I|^2.
  std::vector<double> viscous_bound;
  /// max over the run of the odd part of sigma and the even part of m3.
  double symmetry_defect = 0.0;
  std::vector<double> snapshot_times;
  std::vector<FluidState> snapshots;
  bool aborted = false;
  std::string message;

  /// max over t of energy_residual(t) / (energy(0) * t), 0 if energy(0) = 0.
  double energy_residual_rate() const;
};

struct NSRunOptions {
  double T = 1.0;
  double dt = 0.01;
  int snapshot_stride = 10;
  /// Half-width a of the essential range [1 - a, 1 + a] for the monitors.
  double ess_a = 0.25;
};

/// Runs from s0 with a constant step no larger than dt that divides T.
/// Vacuum or non-finite values in s0 throw. Solver errors during the run other
/// than invalid arguments end it with aborted = true.
NSTrajectory run_ns(NSSolver& solver, const FluidState& s0, const NSRunOptions& opt);

}  // namespace rwl
