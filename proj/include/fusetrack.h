#ifndef FUSETRACK_H
#define FUSETRACK_H

/* C interface to the fusetrack library.
 *
 * All functions return ft_status; FT_OK means success. On failure,
 * ft_last_error() returns a message for the calling thread and every output
 * parameter is left untouched. Matrices are row-major flat arrays.
 */

#include <stdint.h>

#if defined(_WIN32)
#define FT_API __declspec(dllexport)
#else
#define FT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ft_status {
  FT_OK = 0,
  FT_ERR_INVALID_ARGUMENT = 1,
  FT_ERR_OUT_OF_ORDER = 2,
  FT_ERR_SINGULAR = 3,
  FT_ERR_PARSE = 4,
  FT_ERR_IO = 5,
  FT_ERR_UNKNOWN_TRACK = 6,
  FT_ERR_INTERNAL = 7
} ft_status;

/* Message for the most recent failure on this thread; never NULL. */
FT_API const char* ft_last_error(void);

FT_API const char* ft_status_name(ft_status status);

/* ---- constant-velocity filter over [px, py, vx, vy] ---- */

/* Advances state and covariance by dt seconds under the piecewise-white-noise
 * process model. Negative dt yields FT_ERR_OUT_OF_ORDER. */
FT_API ft_status ft_kalman_predict(const double x[4], const double P[16], double t, double dt,
                                   double q_pos, double q_vel, double x_out[4], double P_out[16],
                                   double* t_out);

/* Position-only Joseph-form update; z is [zx, zy], R a row-major 2x2. */
FT_API ft_status ft_kalman_update(const double x[4], const double P[16], const double z[2],
                                  const double R[4], double x_out[4], double P_out[16]);

/* sigma^2(p_vis) = sigma2_min + (sigma2_max - sigma2_min) * (1 - p_vis)^2. */
FT_API ft_status ft_remap_variance(double p_vis, double sigma2_min, double sigma2_max,
                                   double* sigma2_out);

/* ---- single-track fusion ---- */

typedef enum ft_mode {
  FT_MODE_EVENT_ONLY = 0,
  FT_MODE_FRAME_ONLY = 1,
  FT_MODE_NAIVE_COMBO = 2,
  FT_MODE_KALMAN_FUSED = 3
} ft_mode;

typedef enum ft_source { FT_SOURCE_EVENT = 0, FT_SOURCE_FRAME = 1 } ft_source;
typedef enum ft_kind { FT_KIND_ABSOLUTE = 0, FT_KIND_RELATIVE = 1 } ft_kind;
typedef enum ft_ooo_policy { FT_OOO_REJECT = 0, FT_OOO_BUFFER = 1 } ft_ooo_policy;

typedef struct ft_tracker_params {
  double p_ref[2]; /* initial position; also the first event anchor */
  double t0;
  double init_pos_var;
  double init_vel_var;
  int mode;       /* ft_mode */
  int ooo_policy; /* ft_ooo_policy */
  double ooo_window;
  double q_pos;
  double q_vel;
  double event_sigma2_min;
  double event_sigma2_max;
  double frame_sigma2_min;
  double frame_sigma2_max;
} ft_tracker_params;

/* Defaults: kalman_fused, reject policy, unit/100 initial variances, and the
 * benchmark-tuned process model and per-source noise maps. */
FT_API void ft_tracker_params_init(ft_tracker_params* params);

typedef struct ft_measurement {
  double t;
  int64_t track_id; /* informational; a tracker handles one track */
  int source;       /* ft_source */
  int kind;         /* ft_kind; relative only for the event source */
  double z[2];
  double p_vis;
} ft_measurement;

typedef struct ft_output {
  double t;
  double pos[2];
  double cov_pos[4];
  double p_vis_used;
  int emitted; /* 0 when the measurement was ignored or dropped */
} ft_output;

typedef struct ft_tracker ft_tracker;

FT_API ft_status ft_tracker_create(const ft_tracker_params* params, ft_tracker** out);
FT_API void ft_tracker_destroy(ft_tracker* tracker);

/* Feeds one measurement. out->emitted says whether an output was produced;
 * a wrong-source measurement in a single-source mode and a rejected late
 * measurement both return FT_OK with emitted = 0. */
FT_API ft_status ft_tracker_ingest(ft_tracker* tracker, const ft_measurement* measurement,
                                   ft_output* out);

/* Output at t0, before any measurement. */
FT_API ft_status ft_tracker_initial_output(const ft_tracker* tracker, ft_output* out);

FT_API ft_status ft_tracker_state(const ft_tracker* tracker, double x_out[4], double P_out[16],
                                  double* t_out);

FT_API ft_status ft_tracker_rejected_count(const ft_tracker* tracker, uint64_t* count_out);

/* ---- file pipeline ----
 *
 * config_path may be NULL (defaults only). overrides is a newline-separated
 * key=value list applied on top of the config, or NULL. */

typedef struct ft_generate_result {
  uint64_t n_tracks;
  uint64_t n_measurements;
} ft_generate_result;

/* Synthesizes a scenario into out_dir: gt.jsonl, measurements.jsonl and
 * spec.echo (the canonical spec; regenerating from it reproduces the other
 * two files byte for byte). */
FT_API ft_status ft_generate(const char* config_path, const char* overrides, const char* out_dir,
                             ft_generate_result* result);

typedef struct ft_track_result {
  uint64_t n_outputs;
  uint64_t n_rejected;
} ft_track_result;

/* Runs the configured fusion mode over a measurement file; the config must
 * name the ground-truth file (paths.gt) that defines the track set and the
 * initial positions. */
FT_API ft_status ft_track(const char* config_path, const char* overrides,
                          const char* measurements_path, const char* predictions_path,
                          ft_track_result* result);

typedef struct ft_eval_result {
  double fa_mean;
  double expected_fa;
  double delta_vis; /* NaN when the split has no points */
  double delta_occ;
  double delta_all;
  uint64_t n_vis;
  uint64_t n_occ;
  uint64_t n_excluded;
  uint64_t n_tracks_evaluated;
} ft_eval_result;

/* gt_path may be NULL to use the config's paths.gt; csv_path may be NULL to
 * skip the per-track table. */
FT_API ft_status ft_eval(const char* config_path, const char* overrides,
                         const char* predictions_path, const char* gt_path,
                         const char* report_path, const char* csv_path, ft_eval_result* result);

typedef struct ft_gradcheck_result {
  uint64_t cases;
  uint64_t kinks_skipped;
  double max_rel_err_jacobian;
  double max_rel_err_loss;
  int pass;
} ft_gradcheck_result;

/* Compares analytic update Jacobians and chained loss gradients against
 * central finite differences on seeded random problems. */
FT_API ft_status ft_gradcheck(uint64_t seed, uint64_t cases, ft_gradcheck_result* result);

typedef struct ft_bench_result {
  uint64_t iterations;
  double mean_step_ns;
  double checksum;
} ft_bench_result;

/* Times one predict + update cycle. */
FT_API ft_status ft_bench(uint64_t iterations, ft_bench_result* result);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FUSETRACK_H */
