/*
 * modgraph C API.
 *
 * Every function returns an mg_status. On failure, mg_last_error() holds a
 * message for the calling thread that names the offending file, layer or
 * parameter; it stays valid until the next failing call on that thread.
 * Handles are opaque; each *_free accepts NULL. Objects are immutable once
 * returned and may be shared read-only across threads.
 */
#ifndef MODGRAPH_H_
#define MODGRAPH_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MODGRAPH_BUILDING_LIBRARY)
#    define MG_API __declspec(dllexport)
#  else
#    define MG_API __declspec(dllimport)
#  endif
#else
#  define MG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mg_status {
  MG_OK = 0,
  MG_ERR_PARAMETER = 1,
  MG_ERR_FORMAT = 2,
  MG_ERR_DATA = 3,
  MG_ERR_SHAPE = 4,
  MG_ERR_DEGENERATE_VECTOR = 5,
  MG_ERR_EMPTY_GRAPH = 6,
  MG_ERR_IO = 7,
  MG_ERR_INTERNAL = 8
} mg_status;

typedef enum mg_metric {
  MG_METRIC_COSINE = 0,
  MG_METRIC_PEARSON = 1,
  MG_METRIC_INVALID_ = 0x7fffffff
} mg_metric;

typedef enum mg_dtype {
  MG_DTYPE_F32 = 0,
  MG_DTYPE_F64 = 1,
  MG_DTYPE_INVALID_ = 0x7fffffff
} mg_dtype;

typedef enum mg_prune_reason { MG_REASON_PLATEAU = 0, MG_REASON_DESCENT = 1 } mg_prune_reason;

/* Process exit code for a status: 0 ok, 2 parameter, 3 data/format, 4 I/O. */
MG_API int mg_exit_code(mg_status status);
MG_API const char* mg_status_name(mg_status status);
MG_API const char* mg_last_error(void);
MG_API const char* mg_version(void);

/* ---- runs (manifest + labels + per-layer features) ---------------------- */

typedef struct mg_run mg_run;

MG_API mg_status mg_run_load(const char* manifest_path, mg_run** out);
MG_API void mg_run_free(mg_run* run);
MG_API size_t mg_run_num_samples(const mg_run* run);
MG_API size_t mg_run_num_layers(const mg_run* run);
MG_API size_t mg_run_num_classes(const mg_run* run);
MG_API const char* mg_run_layer_name(const mg_run* run, size_t layer);
MG_API int mg_run_layer_repeatable(const mg_run* run, size_t layer);
/* First rows of each class in file order; n == N keeps all rows. */
MG_API mg_status mg_run_subsample(const mg_run* run, size_t n, mg_run** out);

/* ---- dense tensors ------------------------------------------------------ */

/* Reads a feature tensor flattened to rows x cols. Copies up to `capacity`
 * doubles into `values` when non-NULL. */
MG_API mg_status mg_feature_read(const char* path, size_t* rows, size_t* cols, double* values,
                                 size_t capacity);
MG_API mg_status mg_feature_write(const char* path, const double* values, size_t rows,
                                  size_t cols, mg_dtype dtype);

/* ---- synthetic runs ----------------------------------------------------- */

typedef struct mg_synth_spec {
  size_t n_samples;
  size_t n_classes;
  size_t n_features;
  size_t n_layers;
  const double* schedule; /* n_layers separation values */
  double noise_sigma;
  uint64_t seed;
  /* Plateau fixture when plateau_end > plateau_start: the schedule is held
   * across [plateau_start, plateau_end] and rises linearly from schedule[0]
   * to schedule[n_layers-1] elsewhere. */
  size_t plateau_start;
  size_t plateau_end;
  /* Optional n_layers flags overriding the generated repeatable flags. */
  const int* repeatable;
  mg_dtype dtype;
} mg_synth_spec;

/* Fills defaults: N=500, K=10, M=256, L=10, sigma=0.5, seed 0, no plateau,
 * f64. The schedule pointer is left NULL (linear 0..4 is used). */
MG_API void mg_synth_spec_init(mg_synth_spec* spec);
MG_API mg_status mg_synth_write(const mg_synth_spec* spec, const char* out_dir);

/* ---- analysis ----------------------------------------------------------- */

typedef struct mg_analyze_options {
  size_t k;          /* default 3 */
  mg_metric metric;  /* default cosine */
  double epsilon;    /* default 0.005 */
  size_t min_run;    /* default 2 */
  size_t threads;    /* 0: MODGRAPH_THREADS or hardware concurrency */
} mg_analyze_options;

MG_API void mg_analyze_options_init(mg_analyze_options* options);

typedef struct mg_analysis mg_analysis;

MG_API mg_status mg_analyze(const mg_run* run, const mg_analyze_options* options,
                            mg_analysis** out);
MG_API void mg_analysis_free(mg_analysis* analysis);

MG_API size_t mg_analysis_num_layers(const mg_analysis* analysis);
MG_API double mg_analysis_modularity(const mg_analysis* analysis, size_t layer);
MG_API size_t mg_analysis_clamped_edges(const mg_analysis* analysis, size_t layer);
MG_API size_t mg_analysis_num_plateaus(const mg_analysis* analysis);
MG_API size_t mg_analysis_num_descents(const mg_analysis* analysis);
MG_API mg_status mg_analysis_plateau(const mg_analysis* analysis, size_t index, size_t* start,
                                     size_t* end);
MG_API mg_status mg_analysis_descent(const mg_analysis* analysis, size_t index, size_t* start,
                                     size_t* end);
MG_API size_t mg_analysis_num_candidates(const mg_analysis* analysis);
MG_API mg_status mg_analysis_candidate(const mg_analysis* analysis, size_t index, size_t* layer,
                                       mg_prune_reason* reason, int* eligible);

MG_API mg_status mg_analysis_write_report(const mg_analysis* analysis, const char* path);
MG_API mg_status mg_analysis_write_prune_plan(const mg_analysis* analysis, const char* path);
/* Edge list `src,dst,weight` of one snapshot. */
MG_API mg_status mg_analysis_write_edges(const mg_analysis* analysis, size_t layer,
                                         const char* path);
/* Human-readable prune table. Writes at most `capacity` bytes including the
 * terminator; `needed` receives the full length plus one. */
MG_API mg_status mg_analysis_prune_summary(const mg_analysis* analysis, char* buffer,
                                           size_t capacity, size_t* needed);
/* Copies the modularity curve out of an analysis. */
typedef struct mg_curve mg_curve;
MG_API mg_status mg_analysis_curve(const mg_analysis* analysis, mg_curve** out);

/* Similarity matrix of one layer as N x N CSV. */
MG_API mg_status mg_run_write_similarity(const mg_run* run, size_t layer, mg_metric metric,
                                         size_t threads, const char* path);

/* ---- curves ------------------------------------------------------------- */

MG_API mg_status mg_curve_create(const double* values, const char* const* names, size_t length,
                                 mg_curve** out);
MG_API mg_status mg_curve_read_csv(const char* path, mg_curve** out);
MG_API void mg_curve_free(mg_curve* curve);
MG_API size_t mg_curve_length(const mg_curve* curve);
MG_API double mg_curve_value(const mg_curve* curve, size_t layer);
MG_API const char* mg_curve_layer_name(const mg_curve* curve, size_t layer);

MG_API mg_status mg_curve_write_csv(const mg_curve* curve, const char* path);
MG_API mg_status mg_curve_render_svg(const mg_curve* curve, const char* path);
/* Difference matrix D[i][j] = |M_i - M_j|; `values` receives L*L doubles. */
MG_API mg_status mg_curve_difference(const mg_curve* curve, double* values, size_t capacity);
MG_API mg_status mg_curve_write_difference_csv(const mg_curve* curve, const char* path);
MG_API mg_status mg_curve_render_heatmap_svg(const mg_curve* curve, const char* path);

/* Peak comparison across curves, written as JSON. */
MG_API mg_status mg_curves_compare(const mg_curve* const* curves, size_t count, double tolerance,
                                   const char* json_path, double* max_peak_difference,
                                   int* peaks_agree);

/* ---- sweeps ------------------------------------------------------------- */

typedef struct mg_sweep mg_sweep;

MG_API mg_status mg_sweep_run(const mg_run* run, const size_t* k_list, size_t k_count,
                              const size_t* n_list, size_t n_count, mg_metric metric,
                              size_t threads, mg_sweep** out);
MG_API void mg_sweep_free(mg_sweep* sweep);
MG_API size_t mg_sweep_num_curves(const mg_sweep* sweep);
MG_API double mg_sweep_max_gap(const mg_sweep* sweep);
MG_API double mg_sweep_layer_gap(const mg_sweep* sweep, size_t layer);
MG_API mg_status mg_sweep_curve(const mg_sweep* sweep, size_t index, size_t* k, size_t* n,
                                mg_curve** out);
MG_API mg_status mg_sweep_write_csv(const mg_sweep* sweep, const char* path);
MG_API mg_status mg_sweep_render_svg(const mg_sweep* sweep, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* MODGRAPH_H_ */
