#include "rwl/rwl.h"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rwl/config.hpp"
#include "rwl/error.hpp"
#include "rwl/experiment.hpp"
#include "rwl/kernel.hpp"
#include "rwl/selftest.hpp"
#include "rwl/spectral_ops.hpp"
#include "rwl/wave.hpp"

struct rwl_grid {
  rwl::SlabGrid g;
};

struct rwl_propagator {
  rwl::WavePropagator p;
};

struct rwl_config {
  rwl::ExperimentConfig cfg;
  std::string study;
  mutable std::string described;
};

struct rwl_report {
  rwl::ExperimentResult r;
  std::string out_dir;
};

namespace {

thread_local std::string last_error;
std::atomic<bool> cancel_flag{false};
static_assert(std::atomic<bool>::is_always_lock_free);

rwl_status fail_with(rwl_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

// Runs fn, mapping exceptions onto status codes.
template <class Fn>
rwl_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const rwl::Error& e) {
    return fail_with(static_cast<rwl_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail_with(RWL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail_with(RWL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail_with(RWL_ERR_INTERNAL, "unknown error");
  }
}

#define RWL_REQUIRE_ARG(cond, what) \
  if (!(cond)) return fail_with(RWL_ERR_INVALID_ARGUMENT, what)

rwl::ScalarField volume_from(const rwl::SlabGrid& g, const double* src, rwl::Parity p) {
  rwl::ScalarField f(g, rwl::Layout::Volume, p);
  std::copy(src, src + f.size(), f.values().begin());
  return f;
}

void copy_out(const rwl::ScalarField& f, double* dst) {
  std::copy(f.values().begin(), f.values().end(), dst);
}

rwl_status parse_into(const std::string& text, const char* study, rwl_config** out) {
  std::optional<rwl::Study> s;
  if (study) {
    s = rwl::parse_study(study);
    RWL_REQUIRE_ARG(s, std::string("unknown study '") + study + "'");
  }
  rwl::ConfigResult r = rwl::parse_config(text, s);
  if (!r.config) {
    std::string msg;
    for (const auto& e : r.errors) msg += (msg.empty() ? "" : "\n") + e;
    return fail_with(RWL_ERR_CONFIG, msg);
  }
  auto* c = new rwl_config{std::move(*r.config), "", ""};
  c->study = std::string(rwl::study_name(c->cfg.study));
  *out = c;
  return RWL_OK;
}

}  // namespace

extern "C" {

const char* rwl_version(void) { return "0.1.0"; }

const char* rwl_status_name(rwl_status status) {
  switch (status) {
    case RWL_OK: return "ok";
    case RWL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RWL_ERR_GRID_MISMATCH: return "grid mismatch";
    case RWL_ERR_NON_FINITE: return "non-finite value";
    case RWL_ERR_CFL: return "CFL violation";
    case RWL_ERR_VACUUM: return "vacuum";
    case RWL_ERR_IO: return "I/O error";
    case RWL_ERR_CONFIG: return "configuration error";
    case RWL_ERR_INVARIANT: return "invariant failure";
    case RWL_ERR_INTERRUPTED: return "interrupted";
    case RWL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* rwl_last_error(void) { return last_error.c_str(); }

rwl_status rwl_grid_create(double L, int nx, int ny, int nz, rwl_grid** out) {
  RWL_REQUIRE_ARG(out, "output handle is NULL");
  return guarded([&] {
    *out = new rwl_grid{rwl::SlabGrid::make(L, nx, ny, nz)};
    return RWL_OK;
  });
}

void rwl_grid_destroy(rwl_grid* grid) { delete grid; }

size_t rwl_grid_volume_size(const rwl_grid* grid) { return grid ? grid->g.volume_size() : 0; }

size_t rwl_grid_planar_size(const rwl_grid* grid) { return grid ? grid->g.horizontal_size() : 0; }

rwl_status rwl_eigenvalues(double xi1, double xi2, double k, double out[4]) {
  RWL_REQUIRE_ARG(out, "output array is NULL");
  return guarded([&] {
    const auto l = rwl::eigenvalues_closed_form(xi1, xi2, k);
    std::copy(l.begin(), l.end(), out);
    return RWL_OK;
  });
}

rwl_status rwl_propagator_create(const rwl_grid* grid, int threads, rwl_propagator** out) {
  RWL_REQUIRE_ARG(grid && out, "NULL grid or output handle");
  RWL_REQUIRE_ARG(threads >= 1, "threads must be at least 1");
  return guarded([&] {
    *out = new rwl_propagator{rwl::WavePropagator(grid->g, threads)};
    return RWL_OK;
  });
}

void rwl_propagator_destroy(rwl_propagator* prop) { delete prop; }

rwl_status rwl_propagate(const rwl_propagator* prop, double t, double eps, double* s, double* V1,
                         double* V2, double* V3) {
  RWL_REQUIRE_ARG(prop && s && V1 && V2 && V3, "NULL propagator or field");
  RWL_REQUIRE_ARG(eps > 0.0, "eps must be positive");
  return guarded([&] {
    const rwl::SlabGrid& g = prop->p.grid();
    rwl::VectorField V;
    V.c = {volume_from(g, V1, rwl::Parity::None), volume_from(g, V2, rwl::Parity::None),
           volume_from(g, V3, rwl::Parity::None)};
    auto [se, Ve] = rwl::enforce_symmetry_class(volume_from(g, s, rwl::Parity::None), V);
    const rwl::WaveState w = prop->p.propagate(rwl::WaveState{std::move(se), std::move(Ve)}, t, eps);
    copy_out(w.s, s);
    copy_out(w.V[0], V1);
    copy_out(w.V[1], V2);
    copy_out(w.V[2], V3);
    return RWL_OK;
  });
}

rwl_status rwl_project_to_kernel(const rwl_grid* grid, const double* r, const double* U1,
                                 const double* U2, const double* U3, double* q, double* v1,
                                 double* v2) {
  RWL_REQUIRE_ARG(grid && r && U1 && U2 && U3 && q && v1 && v2, "NULL grid or field");
  return guarded([&] {
    const rwl::SlabGrid& g = grid->g;
    rwl::VectorField U;
    U.c = {volume_from(g, U1, rwl::Parity::Even), volume_from(g, U2, rwl::Parity::Even),
           volume_from(g, U3, rwl::Parity::Odd)};
    const rwl::KernelPair k = rwl::project_to_kernel(volume_from(g, r, rwl::Parity::Even), U);
    copy_out(k.q, q);
    copy_out(k.v[0], v1);
    copy_out(k.v[1], v2);
    return RWL_OK;
  });
}

rwl_status rwl_config_parse(const char* text, const char* study, rwl_config** out) {
  RWL_REQUIRE_ARG(text && out, "NULL text or output handle");
  return guarded([&] { return parse_into(text, study, out); });
}

rwl_status rwl_config_load(const char* path, const char* study, rwl_config** out) {
  RWL_REQUIRE_ARG(path && out, "NULL path or output handle");
  return guarded([&] {
    std::ifstream is(path);
    if (!is) return fail_with(RWL_ERR_IO, std::string("cannot open ") + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_into(ss.str(), study, out);
  });
}

void rwl_config_destroy(rwl_config* cfg) { delete cfg; }

rwl_status rwl_config_set_seed(rwl_config* cfg, uint64_t seed) {
  RWL_REQUIRE_ARG(cfg, "NULL config");
  cfg->cfg.data.seed = seed;
  return RWL_OK;
}

rwl_status rwl_config_set_threads(rwl_config* cfg, int threads) {
  RWL_REQUIRE_ARG(cfg, "NULL config");
  RWL_REQUIRE_ARG(threads >= 1 && threads <= 256, "threads must lie in [1, 256]");
  cfg->cfg.run.threads = threads;
  return RWL_OK;
}

const char* rwl_config_study(const rwl_config* cfg) { return cfg ? cfg->study.c_str() : ""; }

const char* rwl_config_output(const rwl_config* cfg) {
  return cfg ? cfg->cfg.run.output.c_str() : "";
}

const char* rwl_config_describe(const rwl_config* cfg) {
  if (!cfg) return "";
  cfg->described = rwl::describe(cfg->cfg);
  return cfg->described.c_str();
}

rwl_status rwl_run_experiment(const rwl_config* cfg, const char* out_dir, rwl_log_fn log,
                              void* user, rwl_report** out) {
  RWL_REQUIRE_ARG(cfg && out, "NULL config or output handle");
  return guarded([&] {
    rwl::RunControl control;
    if (log) control.log = [log, user](const std::string& line) { log(line.c_str(), user); };
    control.cancel = &cancel_flag;
    const std::string dir = out_dir ? out_dir : cfg->cfg.run.output;
    auto report = std::make_unique<rwl_report>();
    report->r = rwl::run_experiment(cfg->cfg, dir, control);
    report->out_dir = dir;
    *out = report.release();
    return RWL_OK;
  });
}

int rwl_report_ok(const rwl_report* report) { return report && report->r.ok() ? 1 : 0; }

size_t rwl_report_failure_count(const rwl_report* report) {
  return report ? report->r.failures.size() : 0;
}

const char* rwl_report_failure(const rwl_report* report, size_t index) {
  return report && index < report->r.failures.size() ? report->r.failures[index].c_str() : "";
}

size_t rwl_report_note_count(const rwl_report* report) {
  return report ? report->r.notes.size() : 0;
}

const char* rwl_report_note(const rwl_report* report, size_t index) {
  return report && index < report->r.notes.size() ? report->r.notes[index].c_str() : "";
}

void rwl_report_destroy(rwl_report* report) { delete report; }

void rwl_request_cancel(void) { cancel_flag.store(true); }

void rwl_clear_cancel(void) { cancel_flag.store(false); }

int rwl_selftest_count(void) { return static_cast<int>(rwl::acceptance_ids().size()); }

rwl_status rwl_selftest_run(int id, int threads, int* passed, char* line, size_t line_size) {
  RWL_REQUIRE_ARG(id >= 1 && id <= rwl_selftest_count(), "no criterion with this number");
  RWL_REQUIRE_ARG(threads >= 1, "threads must be at least 1");
  return guarded([&] {
    const rwl::CriterionResult r = rwl::run_criterion(id, threads);
    if (passed) *passed = r.passed ? 1 : 0;
    if (line && line_size > 0) {
      const std::string s = r.line();
      const size_t n = std::min(s.size(), line_size - 1);
      std::memcpy(line, s.data(), n);
      line[n] = '\0';
    }
    return RWL_OK;
  });
}

}  // extern "C"
