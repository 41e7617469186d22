/* C interface to the rotating-wave-limit library.
 *
 * Every call returns an rwl_status; on failure a message is available from
 * rwl_last_error() on the calling thread. Handles are opaque and owned by the
 * caller, who releases them with the matching _destroy function (NULL is
 * accepted there).
 *
 * Field arrays are row-major with the vertical index fastest: sample (i, j, l)
 * sits at (i * ny + j) * nz + l. Planar fields use nz = 1.
 */
#ifndef RWL_RWL_H
#define RWL_RWL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(RWL_BUILDING)
#define RWL_API __declspec(dllexport)
#else
#define RWL_API __declspec(dllimport)
#endif
#else
#define RWL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rwl_status {
  RWL_OK = 0,
  RWL_ERR_INVALID_ARGUMENT = 1,
  RWL_ERR_GRID_MISMATCH = 2,
  RWL_ERR_NON_FINITE = 3,
  RWL_ERR_CFL = 4,
  RWL_ERR_VACUUM = 5,
  RWL_ERR_IO = 6,
  RWL_ERR_CONFIG = 7,
  RWL_ERR_INVARIANT = 8,
  RWL_ERR_INTERRUPTED = 9,
  RWL_ERR_INTERNAL = 99
} rwl_status;

typedef struct rwl_grid rwl_grid;
typedef struct rwl_propagator rwl_propagator;
typedef struct rwl_config rwl_config;
typedef struct rwl_report rwl_report;

typedef void (*rwl_log_fn)(const char* line, void* user);

RWL_API const char* rwl_version(void);
RWL_API const char* rwl_status_name(rwl_status status);
/* Message of the last failed call on this thread; "" if none. */
RWL_API const char* rwl_last_error(void);

/* Slab [-L, L)^2 x [-1, 1) with even sizes >= 4. */
RWL_API rwl_status rwl_grid_create(double L, int nx, int ny, int nz, rwl_grid** out);
RWL_API void rwl_grid_destroy(rwl_grid* grid);
RWL_API size_t rwl_grid_volume_size(const rwl_grid* grid);
RWL_API size_t rwl_grid_planar_size(const rwl_grid* grid);

/* Eigenvalues (l1, -l1, l3, -l3) of the acoustic-Rossby symbol at (xi1, xi2, k). */
RWL_API rwl_status rwl_eigenvalues(double xi1, double xi2, double k, double out[4]);

RWL_API rwl_status rwl_propagator_create(const rwl_grid* grid, int threads, rwl_propagator** out);
RWL_API void rwl_propagator_destroy(rwl_propagator* prop);
/* Advances the wave state (s, V1, V2, V3) by t in place. The state is first
 * projected onto its symmetry class: s, V1, V2 even in x3 and V3 odd. */
RWL_API rwl_status rwl_propagate(const rwl_propagator* prop, double t, double eps, double* s,
                                 double* V1, double* V2, double* V3);

/* Orthogonal projection of volume data (r, U) onto the null space of the wave
 * generator. Writes the planar stream function q and velocity (v1, v2). */
RWL_API rwl_status rwl_project_to_kernel(const rwl_grid* grid, const double* r, const double* U1,
                                         const double* U2, const double* U3, double* q, double* v1,
                                         double* v2);

/* Parses a configuration. `study` may be NULL when the text sets [run] study.
 * On RWL_ERR_CONFIG, rwl_last_error() lists every problem, one per line. */
RWL_API rwl_status rwl_config_parse(const char* text, const char* study, rwl_config** out);
RWL_API rwl_status rwl_config_load(const char* path, const char* study, rwl_config** out);
RWL_API void rwl_config_destroy(rwl_config* cfg);
RWL_API rwl_status rwl_config_set_seed(rwl_config* cfg, uint64_t seed);
RWL_API rwl_status rwl_config_set_threads(rwl_config* cfg, int threads);
RWL_API const char* rwl_config_study(const rwl_config* cfg);
RWL_API const char* rwl_config_output(const rwl_config* cfg);
/* The effective configuration with defaults filled in. */
RWL_API const char* rwl_config_describe(const rwl_config* cfg);

/* Runs the configured study into out_dir (NULL: the configured output).
 * Invariant violations do not make the call fail; they are listed in the
 * report. Solver and I/O errors return a nonzero status and leave the
 * directory's MANIFEST marked INCOMPLETE. */
RWL_API rwl_status rwl_run_experiment(const rwl_config* cfg, const char* out_dir, rwl_log_fn log,
                                      void* user, rwl_report** out);
RWL_API int rwl_report_ok(const rwl_report* report);
RWL_API size_t rwl_report_failure_count(const rwl_report* report);
RWL_API const char* rwl_report_failure(const rwl_report* report, size_t index);
RWL_API size_t rwl_report_note_count(const rwl_report* report);
RWL_API const char* rwl_report_note(const rwl_report* report, size_t index);
RWL_API void rwl_report_destroy(rwl_report* report);

/* Asks running experiments to stop at the next stage boundary. Only touches a
 * lock-free flag, so it may be called from a signal handler. */
RWL_API void rwl_request_cancel(void);
RWL_API void rwl_clear_cancel(void);

/* Acceptance criteria 1..rwl_selftest_count(). `line` receives the
 * PASS/FAIL summary, truncated to line_size. */
RWL_API int rwl_selftest_count(void);
RWL_API rwl_status rwl_selftest_run(int id, int threads, int* passed, char* line, size_t line_size);

#ifdef __cplusplus
}
#endif

#endif /* RWL_RWL_H */
