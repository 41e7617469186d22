#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rwl {

enum class Study { Propagate, Decay, Project, QGRun, NSRun, LimitStudy };

/// Subcommand spelling: propagate, decay-study, project, qg-run, ns-run, limit-study.
std::string_view study_name(Study s);
std::optional<Study> parse_study(std::string_view name);

struct GridConfig {
  double L = 0.0;
  int nx = 0;
  int ny = 0;
  int nz = 0;
};

struct PhysicsConfig {
  double gamma = 2.0;
  std::vector<double> eps{0.2};
  double mu0 = 1e-2;
  /// mu_eps = mu0 * eps^alpha.
  double alpha = 0.5;
  /// "none" or "gaussian-hill".
  std::string forcing = "none";
  double forcing_amplitude = 0.1;
  double forcing_width = 1.0;

  double mu(double eps) const;
};

struct DataConfig {
  /// monopole | dipole | pair | random | acoustic-pulse | random-wave
  std::string preset;
  double amplitude = 0.0;
  double width = 1.0;
  double separation = 2.0;
  std::uint64_t seed = 1;
  /// Cutoff scales for `project`.
  std::vector<double> delta;
  /// Band of the random presets.
  double kmin = 1.0;
  double kmax = 4.0;
  /// Band a < |xi| < b and vertical mode of the acoustic pulse.
  double band_lo = 0.4;
  double band_hi = 1.6;
  int vertical_mode = 1;
  /// fast | slow | all: eigen-branch kept in wave data.
  std::string branch = "fast";
  /// Amplitude of an x3-dependent density bump added to kernel data, making
  /// the compressible initial data ill-prepared.
  double wave_amplitude = 0.0;
  /// Directory holding input dumps (rho1, u1, u2, u3 or s, V1, V2, V3).
  std::string input;
};

struct RunConfig {
  double T = 1.0;
  double dt = 0.01;
  int snapshot_stride = 10;
  std::string output = "out";
  int threads = 1;
  double cfl = 0.5;
  int symmetry_every = 16;
  /// Half-width of the window [-W, W]^2 for limit errors.
  double window = 3.141592653589793;
  double ess_a = 0.25;
  bool qg_filter = false;
  /// Relative drift allowed for conserved quantities.
  double conservation_tol = 1e-6;
  /// Energy-inequality residual allowed per unit time, relative to E(0).
  double energy_tol = 1e-6;
  /// Uniform-bound monitors may grow by at most this factor across a sweep.
  double bound_factor = 10.0;
  /// Required finest / coarsest limit-error ratio in a sweep.
  double error_ratio = 1.0 / 3.0;
  double min_residual_exponent = 1.5;
};

struct DecayConfig {
  /// Explicit sample times; when empty, `samples` geometric times in [t_min, t_max].
  std::vector<double> times;
  double t_min = 1.0;
  double t_max = 50.0;
  int samples = 12;
  double window_lo = 1.0;
  double window_hi = 50.0;
  int sobolev_m = 2;
  double slope_min = -0.65;
  double slope_max = -0.35;
  double l2_tol = 1e-10;
};

struct ExperimentConfig {
  Study study = Study::Decay;
  GridConfig grid;
  PhysicsConfig physics;
  DataConfig data;
  RunConfig run;
  DecayConfig decay;
  /// Input text, echoed into the output directory.
  std::string source;
};

struct ConfigResult {
  std::optional<ExperimentConfig> config;
  /// Every problem found, each prefixed with "line N: " where a line applies.
  std::vector<std::string> errors;
};

/// Parses INI-style text: [section] headers, `key = value` lines, `#` or `;`
/// comments. The study comes from `[run] study` or from `study`; if both are
/// given they must agree. Keys that are not set take study-dependent
/// defaults; all ranges are checked before anything is allocated.
ConfigResult parse_config(std::string_view text, std::optional<Study> study = std::nullopt);

/// Renders the effective configuration (all keys, defaults filled in).
std::string describe(const ExperimentConfig& cfg);

}  // namespace rwl
