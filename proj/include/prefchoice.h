/*
 * C interface to the prefchoice simulator.
 *
 * Objects are opaque handles created by *_create / *_run functions and
 * released with the matching *_destroy. Every fallible call returns a
 * pc_status; on failure pc_last_error() describes the problem for the
 * calling thread. Vertex and type indices are 0-based here; files written
 * by the library use 1-based ids.
 */
#ifndef PREFCHOICE_H_
#define PREFCHOICE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PREFCHOICE_BUILDING)
#    define PC_API __declspec(dllexport)
#  else
#    define PC_API __declspec(dllimport)
#  endif
#else
#  define PC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pc_status {
  PC_OK = 0,
  PC_ERR_BETA_OUT_OF_RANGE = 1,
  PC_ERR_BAD_SAMPLE_SIZE = 2,
  PC_ERR_BAD_PROBS = 3,
  PC_ERR_BAD_COUNTS = 4,
  PC_ERR_BAD_SELF_LOOPS = 5,
  PC_ERR_NOT_SUPERCRITICAL = 6,
  PC_ERR_NOT_CRITICAL = 7,
  PC_ERR_DOMAIN = 8,
  PC_ERR_INSUFFICIENT_DATA = 9,
  PC_ERR_INVALID_ARGUMENT = 10,
  PC_ERR_IO = 11,
  PC_ERR_INTERNAL = 12
} pc_status;

typedef enum pc_edge_weighting {
  PC_EDGE_WEIGHTING_POST_VERTEX = 0,
  PC_EDGE_WEIGHTING_PRE_VERTEX = 1
} pc_edge_weighting;

typedef enum pc_regime {
  PC_REGIME_SUBCRITICAL = 0,
  PC_REGIME_CRITICAL = 1,
  PC_REGIME_SUPERCRITICAL = 2
} pc_regime;

typedef struct pc_params pc_params;
typedef struct pc_trajectory pc_trajectory;
typedef struct pc_sweep pc_sweep;

typedef struct pc_params_desc {
  int64_t m;
  int64_t k;
  int64_t d;
  int64_t num_types;
  double beta;
  const double* type_probs; /* num_type_probs entries */
  size_t num_type_probs;
  int64_t initial_self_loops; /* negative selects the default (m) */
  pc_edge_weighting edge_weighting;
} pc_params_desc;

/* Geometric schedule: start, start*factor, ... (rounded). List schedule:
 * `points` holds num_points values. The final n is always recorded. */
typedef struct pc_schedule_desc {
  int use_list;
  int64_t start;
  double factor;
  const int64_t* points;
  size_t num_points;
} pc_schedule_desc;

typedef struct pc_theory_summary {
  pc_regime regime;
  double rho;
  double x_star;               /* NaN unless supercritical */
  double subcritical_exponent; /* NaN unless subcritical */
} pc_theory_summary;

typedef struct pc_row_view {
  int64_t n;
  int64_t total_degree;
  int64_t max_degree;
  int64_t leader; /* -1 if the type has no vertex yet */
  double type_weight;
  int64_t type_count;
  int64_t leadership_changes;
} pc_row_view;

PC_API const char* pc_version(void);
PC_API const char* pc_status_name(pc_status status);
/* Message for the most recent failure on this thread. */
PC_API const char* pc_last_error(void);
/* Releases strings returned through char** out-parameters. */
PC_API void pc_string_free(char* s);

/* Parameters */
PC_API pc_status pc_params_create(const pc_params_desc* desc, pc_params** out);
PC_API void pc_params_destroy(pc_params* params);
PC_API int64_t pc_params_num_types(const pc_params* params);

/* Theory */
PC_API pc_status pc_theory_classify(const pc_params* params,
                                    pc_theory_summary* out);
PC_API pc_status pc_theory_f(const pc_params* params, double x, double* out);
PC_API pc_status pc_theory_fixed_point(const pc_params* params, double* out);
PC_API pc_status pc_theory_critical_constant(const pc_params* params,
                                             size_t type_index, double* out);
PC_API pc_status pc_theory_mean_field(const pc_params* params,
                                      size_t type_index, int64_t n0, double y0,
                                      int64_t n_max, double* y_out);
/* Full summary as a JSON document (rho, regime, x_star, per-type values). */
PC_API pc_status pc_theory_json(const pc_params* params, char** out_json);

/* Single runs */
PC_API uint64_t pc_derive_seed(uint64_t root, uint64_t cell, uint64_t replicate);
PC_API pc_status pc_simulate(const pc_params* params, int64_t n_steps,
                             uint64_t seed, const pc_schedule_desc* schedule,
                             pc_trajectory** out);
PC_API void pc_trajectory_destroy(pc_trajectory* trajectory);
PC_API size_t pc_trajectory_num_rows(const pc_trajectory* trajectory);
PC_API pc_status pc_trajectory_row(const pc_trajectory* trajectory, size_t row,
                                   size_t type_index, pc_row_view* out);
PC_API pc_status pc_trajectory_write_csv(const pc_trajectory* trajectory,
                                         const char* path);
/* Summary JSON for a run identified by (root_seed, cell, replicate). */
PC_API pc_status pc_trajectory_summary_json(const pc_trajectory* trajectory,
                                            uint64_t root_seed, uint64_t cell,
                                            uint64_t replicate, char** out_json);
PC_API pc_status pc_trajectory_write_summary(const pc_trajectory* trajectory,
                                             uint64_t root_seed, uint64_t cell,
                                             uint64_t replicate,
                                             const char* path);

/* Sweeps: every grid cell x seeds_per_cell replicates, run seeds derived
 * with pc_derive_seed(root_seed, cell, replicate). */
PC_API pc_status pc_sweep_run(const pc_params* const* grid, size_t grid_size,
                              int64_t seeds_per_cell, uint64_t root_seed,
                              int64_t n_steps, const pc_schedule_desc* schedule,
                              unsigned parallelism, pc_sweep** out);
PC_API void pc_sweep_destroy(pc_sweep* sweep);
PC_API size_t pc_sweep_num_runs(const pc_sweep* sweep);
/* Borrowed pointer, valid until pc_sweep_destroy; NULL if the run failed. */
PC_API const pc_trajectory* pc_sweep_trajectory(const pc_sweep* sweep,
                                                size_t run);
PC_API pc_status pc_sweep_summary_json(const pc_sweep* sweep, char** out_json);
/* Writes run_c<cell>_r<rep>.csv/.json per run and summary.json into dir. */
PC_API pc_status pc_sweep_write(const pc_sweep* sweep, const char* dir);

#ifdef __cplusplus
}
#endif

#endif /* PREFCHOICE_H_ */
