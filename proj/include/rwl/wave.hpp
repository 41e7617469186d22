#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "rwl/field.hpp"

namespace rwl {

/// Per-mode symbol of the acoustic-Rossby generator:
///   A = [[0, xi1, xi2, k], [xi1, 0, i, 0], [xi2, -i, 0, 0], [k, 0, 0, 0]],
/// acting on (s_hat, V1_hat, V2_hat, V3_hat). The system eps dw/dt + B w = 0
/// reads dw_hat/dt = -(i/eps) A w_hat.
struct ModeSymbol {
  double xi1 = 0.0;
  double xi2 = 0.0;
  double k = 0.0;
  Eigen::Matrix4cd A;
};

ModeSymbol assemble_symbol(double xi1, double xi2, double k);

/// (lambda1, lambda2, lambda3, lambda4) = (l1, -l1, l3, -l3) with
/// l1^2 + l3^2 = 1 + |xi|^2 + k^2 and l1 * l3 = |k|.
std::array<double, 4> eigenvalues_closed_form(double xi1, double xi2, double k);

/// Q has the eigenvectors as rows, so Q A Q^* = diag(lambda) and
/// exp(-i tau A) = Q^* exp(-i tau Lambda) Q. The first component of each row
/// with modulus > 1e-8 is real and positive.
struct EigenSystem {
  std::array<double, 4> lambda{};
  Eigen::Matrix4cd Q;
};

EigenSystem eigensystem(double xi1, double xi2, double k);

/// d lambda1 / d|xi| at (|xi|, k), by central differences on the closed form.
double group_speed_fast(double r, double k);

/// Scalar s (even in x3) and vector V (V1, V2 even, V3 odd).
struct WaveState {
  ScalarField s;
  VectorField V;

  double l2_norm() const;
};

/// Spectral coefficients (s, V1, V2, V3) of a WaveState.
struct WaveSpectrum {
  std::array<SpectralField, 4> c;

  const Shape& shape() const { return c[0].shape(); }
  double energy() const;
  /// sum over modes of (1 + |xi|^2 + kappa^2)^m |w_hat|^2, the squared
  /// W^{m,2} norm in its Fourier-weighted form.
  double sobolev_energy(int m) const;
};

WaveSpectrum to_spectrum(const WaveState& w);
WaveState to_state(const WaveSpectrum& w);

enum class Branch { All, Fast, Slow };

/// Exact propagator of eps dw/dt + B w = 0 on a fixed volume grid.
///
/// Eigensystems are cached per mode. For large grids the cache can be limited
/// to the support of a given spectrum; other modes are then diagonalized on
/// demand.
class WavePropagator {
 public:
  explicit WavePropagator(SlabGrid grid, int threads = 1);
  WavePropagator(SlabGrid grid, const WaveSpectrum& support, int threads = 1);

  const SlabGrid& grid() const { return grid_; }

  WaveSpectrum propagate(const WaveSpectrum& w0, double t, double eps) const;
  WaveState propagate(const WaveState& w0, double t, double eps) const;

  /// B applied in Fourier space: w_hat -> i A w_hat.
  WaveSpectrum apply_generator(const WaveSpectrum& w) const;

  /// Keeps only the eigencomponents of the requested branch: Fast = lambda1,2,
  /// Slow = lambda3,4.
  WaveSpectrum polarize(const WaveSpectrum& w, Branch b) const;

  /// Per-mode matrices exp(-i (tau/eps) A), precomputed for repeated use.
  class Exponential {
   public:
    void apply(WaveSpectrum& w) const;
    void apply(std::array<cplx*, 4> comps, std::size_t n) const;

   private:
    friend class WavePropagator;
    std::vector<Eigen::Matrix4cd> m_;
    int threads_ = 1;
  };
  Exponential exponential(double tau, double eps) const;

  std::size_t cached_modes() const { return systems_.size(); }

 private:
  void build(const WaveSpectrum* support);
  EigenSystem system_at(std::size_t mode) const;
  void mode_wavenumbers(std::size_t mode, double& xi1, double& xi2, double& k) const;

  SlabGrid grid_;
  int threads_;
  std::vector<double> xi1_, xi2_, kappa_;
  std::vector<std::int32_t> slot_;
  std::vector<EigenSystem> systems_;
};

struct DecayOptions {
  double eps = 1.0;
  double window_lo = 1.0;
  double window_hi = 50.0;
  int sobolev_m = 2;
  int threads = 1;
};

/// Sup, L2, L4 and W^{m,2} history of a propagated state plus a least-squares
/// fit of log sup-norm against log t over the window.
struct DecayReport {
  std::vector<double> times;
  std::vector<double> sup_s;
  std::vector<double> sup_V;
  std::vector<double> l2_total;
  std::vector<double> l4_total;
  std::vector<double> sobolev_total;
  std::vector<bool> beyond_recurrence;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double max_group_speed = 0.0;
  double recurrence_time = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double fit_residual = 0.0;
  std::size_t fitted_points = 0;
  bool window_empty = true;
  /// max relative deviation of l2_total from its first entry.
  double l2_drift = 0.0;
  double sobolev_drift = 0.0;
};

DecayReport measure_decay(const WavePropagator& prop, const WaveState& w0,
                          const std::vector<double>& times, const DecayOptions& opt);

}  // namespace rwl
