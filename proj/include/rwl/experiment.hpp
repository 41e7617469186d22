#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rwl/config.hpp"
#include "rwl/field.hpp"
#include "rwl/ns.hpp"
#include "rwl/wave.hpp"

namespace rwl {

// Initial data selected by a configuration. Shared by the runner and the
// self-test so both exercise the same inputs.

/// Planar stream function from the monopole, dipole, pair or random preset.
ScalarField stream_from_config(const DataConfig& d, const SlabGrid& g);

/// Wave data from the acoustic-pulse or random-wave preset, before any
/// polarization; apply WavePropagator::polarize with branch_from_config.
WaveSpectrum wave_from_config(const DataConfig& d, const SlabGrid& g);
Branch branch_from_config(const DataConfig& d);

/// Compressible data (rho1, u): the kernel pair of the stream preset, plus an
/// x3-dependent density bump of size wave_amplitude.
std::pair<ScalarField, VectorField> primitive_from_config(const DataConfig& d, const SlabGrid& g);

/// Optional forcing potential G.
std::optional<ScalarField> forcing_from_config(const PhysicsConfig& p, const SlabGrid& g);

/// QG time step: run.dt, or 0.8 of the CFL limit at q0 when run.dt is 0.
double qg_dt_from_config(const ExperimentConfig& cfg, const ScalarField& q0);

/// One compressible run at the given eps with the configured physics and
/// run settings. `prop` may be shared between runs on the same grid.
NSTrajectory ns_run_from_config(const ExperimentConfig& cfg, double eps, const ScalarField& rho1,
                                const VectorField& u, std::shared_ptr<const WavePropagator> prop,
                                int threads = 1);

struct RunControl {
  /// Progress lines.
  std::function<void(const std::string&)> log;
  /// Checked between stages; when set the run stops with Error(Interrupted)
  /// and the MANIFEST keeps its INCOMPLETE flag.
  const std::atomic<bool>* cancel = nullptr;
};

struct ExperimentResult {
  std::filesystem::path out_dir;
  /// Invariant violations; a non-empty list means a nonzero exit status.
  std::vector<std::string> failures;
  std::vector<std::string> notes;
  bool ok() const { return failures.empty(); }
};

/// Runs the configured study, writing every artifact under `out` together
/// with the verbatim config (config.ini), the effective config
/// (effective.ini) and a MANIFEST of SHA-256 hashes. Solver errors propagate
/// as rwl::Error with the study context prepended.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                const RunControl& control = {});

}  // namespace rwl
