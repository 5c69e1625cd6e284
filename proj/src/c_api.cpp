#include "modgraph/modgraph.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "modgraph/analysis.hpp"
#include "modgraph/errors.hpp"
#include "modgraph/graph_builder.hpp"
#include "modgraph/pipeline.hpp"
#include "modgraph/render.hpp"
#include "modgraph/report.hpp"
#include "modgraph/synth.hpp"
#include "modgraph/tensor_io.hpp"

struct mg_run {
  modgraph::LayerFeatureSet run;
};

struct mg_analysis {
  modgraph::AnalysisResult result;
};

struct mg_curve {
  modgraph::ModularityCurve curve;
};

struct mg_sweep {
  modgraph::SweepResult result;
};

namespace {

thread_local std::string last_error;

mg_status status_of(modgraph::ErrorKind kind) {
  using modgraph::ErrorKind;
  switch (kind) {
    case ErrorKind::Parameter: return MG_ERR_PARAMETER;
    case ErrorKind::Format: return MG_ERR_FORMAT;
    case ErrorKind::Data: return MG_ERR_DATA;
    case ErrorKind::Shape: return MG_ERR_SHAPE;
    case ErrorKind::DegenerateVector: return MG_ERR_DEGENERATE_VECTOR;
    case ErrorKind::EmptyGraph: return MG_ERR_EMPTY_GRAPH;
    case ErrorKind::Io: return MG_ERR_IO;
  }
  return MG_ERR_INTERNAL;
}

mg_status fail(mg_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs `fn`, translating exceptions into status codes and last_error.
template <typename Fn>
mg_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return MG_OK;
  } catch (const modgraph::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MG_ERR_INTERNAL, "unknown error");
  }
}

#define MG_REQUIRE(cond, what)                                        \
  do {                                                                \
    if (!(cond)) return fail(MG_ERR_PARAMETER, std::string(what));    \
  } while (0)

modgraph::Metric to_metric(mg_metric m) {
  if (m == MG_METRIC_COSINE) return modgraph::Metric::Cosine;
  if (m == MG_METRIC_PEARSON) return modgraph::Metric::Pearson;
  throw modgraph::ParameterError("unknown metric value " + std::to_string(static_cast<int>(m)));
}

modgraph::ElementType to_element(mg_dtype d) {
  if (d == MG_DTYPE_F32) return modgraph::ElementType::Float32;
  if (d == MG_DTYPE_F64) return modgraph::ElementType::Float64;
  throw modgraph::ParameterError("unknown dtype value " + std::to_string(static_cast<int>(d)));
}

}  // namespace

extern "C" {

int mg_exit_code(mg_status status) {
  switch (status) {
    case MG_OK: return 0;
    case MG_ERR_PARAMETER: return 2;
    case MG_ERR_FORMAT:
    case MG_ERR_DATA:
    case MG_ERR_SHAPE:
    case MG_ERR_DEGENERATE_VECTOR:
    case MG_ERR_EMPTY_GRAPH: return 3;
    case MG_ERR_IO: return 4;
    case MG_ERR_INTERNAL: return 1;
  }
  return 1;
}

const char* mg_status_name(mg_status status) {
  switch (status) {
    case MG_OK: return "ok";
    case MG_ERR_PARAMETER: return "ParameterError";
    case MG_ERR_FORMAT: return "FormatError";
    case MG_ERR_DATA: return "DataError";
    case MG_ERR_SHAPE: return "ShapeError";
    case MG_ERR_DEGENERATE_VECTOR: return "DegenerateVectorError";
    case MG_ERR_EMPTY_GRAPH: return "EmptyGraphError";
    case MG_ERR_IO: return "IoError";
    case MG_ERR_INTERNAL: return "InternalError";
  }
  return "unknown";
}

const char* mg_last_error(void) { return last_error.c_str(); }

const char* mg_version(void) { return "0.1.0"; }

/* runs */

mg_status mg_run_load(const char* manifest_path, mg_run** out) {
  MG_REQUIRE(manifest_path && out, "mg_run_load: manifest path and output handle are required");
  *out = nullptr;
  return guarded([&] { *out = new mg_run{modgraph::load_run(manifest_path)}; });
}

void mg_run_free(mg_run* run) { delete run; }

size_t mg_run_num_samples(const mg_run* run) { return run ? run->run.n_samples() : 0; }
size_t mg_run_num_layers(const mg_run* run) { return run ? run->run.n_layers() : 0; }
size_t mg_run_num_classes(const mg_run* run) { return run ? run->run.labels.n_classes() : 0; }

const char* mg_run_layer_name(const mg_run* run, size_t layer) {
  if (!run || layer >= run->run.n_layers()) return nullptr;
  return run->run.manifest.layers[layer].name.c_str();
}

int mg_run_layer_repeatable(const mg_run* run, size_t layer) {
  if (!run || layer >= run->run.n_layers()) return 0;
  return run->run.manifest.layers[layer].repeatable ? 1 : 0;
}

mg_status mg_run_subsample(const mg_run* run, size_t n, mg_run** out) {
  MG_REQUIRE(run && out, "mg_run_subsample: run and output handle are required");
  *out = nullptr;
  return guarded([&] { *out = new mg_run{modgraph::subsample(run->run, n)}; });
}

/* tensors */

mg_status mg_feature_read(const char* path, size_t* rows, size_t* cols, double* values,
                          size_t capacity) {
  MG_REQUIRE(path && rows && cols, "mg_feature_read: path, rows and cols are required");
  return guarded([&] {
    const auto f = modgraph::read_feature_matrix(path);
    *rows = f.n_samples();
    *cols = f.n_features();
    if (values) {
      const auto data = f.data();
      std::memcpy(values, data.data(), std::min(capacity, data.size()) * sizeof(double));
    }
  });
}

mg_status mg_feature_write(const char* path, const double* values, size_t rows, size_t cols,
                           mg_dtype dtype) {
  MG_REQUIRE(path && values, "mg_feature_write: path and values are required");
  return guarded([&] {
    modgraph::FeatureMatrix f(rows, cols, std::vector<double>(values, values + rows * cols));
    modgraph::write_feature_matrix(f, path, to_element(dtype));
  });
}

/* synth */

void mg_synth_spec_init(mg_synth_spec* spec) {
  if (!spec) return;
  const modgraph::SynthSpec defaults;
  spec->n_samples = defaults.n_samples;
  spec->n_classes = defaults.n_classes;
  spec->n_features = defaults.n_features;
  spec->n_layers = defaults.n_layers;
  spec->schedule = nullptr;
  spec->noise_sigma = defaults.noise_sigma;
  spec->seed = defaults.seed;
  spec->plateau_start = 0;
  spec->plateau_end = 0;
  spec->repeatable = nullptr;
  spec->dtype = MG_DTYPE_F64;
}

mg_status mg_synth_write(const mg_synth_spec* spec, const char* out_dir) {
  MG_REQUIRE(spec && out_dir, "mg_synth_write: spec and output directory are required");
  return guarded([&] {
    modgraph::SynthSpec s;
    s.n_samples = spec->n_samples;
    s.n_classes = spec->n_classes;
    s.n_features = spec->n_features;
    s.n_layers = spec->n_layers;
    s.noise_sigma = spec->noise_sigma;
    s.seed = spec->seed;
    if (spec->schedule) {
      s.separation_schedule.assign(spec->schedule, spec->schedule + spec->n_layers);
    } else {
      s.separation_schedule = modgraph::linear_schedule(spec->n_layers, 0.0, 4.0);
    }
    const auto type = to_element(spec->dtype);
    modgraph::LayerFeatureSet run =
        spec->plateau_end > spec->plateau_start
            ? modgraph::generate_plateau_fixture(
                  s, modgraph::Interval{spec->plateau_start, spec->plateau_end})
            : modgraph::generate(s);
    if (spec->repeatable) {
      for (std::size_t l = 0; l < run.n_layers(); ++l) {
        run.manifest.layers[l].repeatable = spec->repeatable[l] != 0;
      }
    }
    modgraph::write_run(run, out_dir, type);
  });
}

/* analysis */

void mg_analyze_options_init(mg_analyze_options* options) {
  if (!options) return;
  const modgraph::AnalyzeOptions defaults;
  options->k = defaults.k;
  options->metric = MG_METRIC_COSINE;
  options->epsilon = defaults.epsilon;
  options->min_run = defaults.min_run;
  options->threads = defaults.threads;
}

mg_status mg_analyze(const mg_run* run, const mg_analyze_options* options, mg_analysis** out) {
  MG_REQUIRE(run && out, "mg_analyze: run and output handle are required");
  *out = nullptr;
  return guarded([&] {
    modgraph::AnalyzeOptions o;
    if (options) {
      o.k = options->k;
      o.metric = to_metric(options->metric);
      o.epsilon = options->epsilon;
      o.min_run = options->min_run;
      o.threads = options->threads;
    }
    *out = new mg_analysis{modgraph::analyze(run->run, o)};
  });
}

void mg_analysis_free(mg_analysis* analysis) { delete analysis; }

size_t mg_analysis_num_layers(const mg_analysis* a) { return a ? a->result.curve.size() : 0; }

double mg_analysis_modularity(const mg_analysis* a, size_t layer) {
  if (!a || layer >= a->result.curve.size()) return 0.0;
  return a->result.curve.values[layer];
}

size_t mg_analysis_clamped_edges(const mg_analysis* a, size_t layer) {
  if (!a || layer >= a->result.clamped_edges.size()) return 0;
  return a->result.clamped_edges[layer];
}

size_t mg_analysis_num_plateaus(const mg_analysis* a) {
  return a ? a->result.segments.plateaus.size() : 0;
}

size_t mg_analysis_num_descents(const mg_analysis* a) {
  return a ? a->result.segments.descents.size() : 0;
}

static mg_status interval_at(const std::vector<modgraph::Interval>& v, size_t index, size_t* start,
                             size_t* end) {
  MG_REQUIRE(start && end, "interval accessors need start and end pointers");
  MG_REQUIRE(index < v.size(), "interval index " + std::to_string(index) + " out of range");
  *start = v[index].start;
  *end = v[index].end;
  return MG_OK;
}

mg_status mg_analysis_plateau(const mg_analysis* a, size_t index, size_t* start, size_t* end) {
  MG_REQUIRE(a, "mg_analysis_plateau: analysis is required");
  return interval_at(a->result.segments.plateaus, index, start, end);
}

mg_status mg_analysis_descent(const mg_analysis* a, size_t index, size_t* start, size_t* end) {
  MG_REQUIRE(a, "mg_analysis_descent: analysis is required");
  return interval_at(a->result.segments.descents, index, start, end);
}

size_t mg_analysis_num_candidates(const mg_analysis* a) {
  return a ? a->result.plan.candidates.size() : 0;
}

mg_status mg_analysis_candidate(const mg_analysis* a, size_t index, size_t* layer,
                                mg_prune_reason* reason, int* eligible) {
  MG_REQUIRE(a && layer && reason && eligible, "mg_analysis_candidate: null argument");
  MG_REQUIRE(index < a->result.plan.candidates.size(),
             "candidate index " + std::to_string(index) + " out of range");
  const auto& c = a->result.plan.candidates[index];
  *layer = c.layer;
  *reason = c.reason == modgraph::PruneReason::Plateau ? MG_REASON_PLATEAU : MG_REASON_DESCENT;
  *eligible = c.eligible ? 1 : 0;
  return MG_OK;
}

mg_status mg_analysis_write_report(const mg_analysis* a, const char* path) {
  MG_REQUIRE(a && path, "mg_analysis_write_report: analysis and path are required");
  return guarded([&] { modgraph::write_report(a->result, path); });
}

mg_status mg_analysis_write_prune_plan(const mg_analysis* a, const char* path) {
  MG_REQUIRE(a && path, "mg_analysis_write_prune_plan: analysis and path are required");
  return guarded([&] { modgraph::write_text_file(path, modgraph::prune_plan_json(a->result.plan)); });
}

mg_status mg_analysis_write_edges(const mg_analysis* a, size_t layer, const char* path) {
  MG_REQUIRE(a && path, "mg_analysis_write_edges: analysis and path are required");
  MG_REQUIRE(layer < a->result.graph.snapshots.size(),
             "layer " + std::to_string(layer) + " out of range");
  return guarded([&] { modgraph::write_edge_list(a->result.graph.snapshots[layer], path); });
}

mg_status mg_analysis_prune_summary(const mg_analysis* a, char* buffer, size_t capacity,
                                    size_t* needed) {
  MG_REQUIRE(a, "mg_analysis_prune_summary: analysis is required");
  return guarded([&] {
    const std::string text = modgraph::prune_plan_summary(a->result.plan);
    if (needed) *needed = text.size() + 1;
    if (buffer && capacity > 0) {
      const std::size_t n = std::min(capacity - 1, text.size());
      std::memcpy(buffer, text.data(), n);
      buffer[n] = '\0';
    }
  });
}

mg_status mg_analysis_curve(const mg_analysis* a, mg_curve** out) {
  MG_REQUIRE(a && out, "mg_analysis_curve: analysis and output handle are required");
  *out = nullptr;
  return guarded([&] { *out = new mg_curve{a->result.curve}; });
}

mg_status mg_run_write_similarity(const mg_run* run, size_t layer, mg_metric metric,
                                  size_t threads, const char* path) {
  MG_REQUIRE(run && path, "mg_run_write_similarity: run and path are required");
  MG_REQUIRE(layer < run->run.n_layers(), "layer " + std::to_string(layer) + " out of range");
  return guarded([&] {
    const auto s = modgraph::similarity(run->run.layers[layer], to_metric(metric), threads);
    modgraph::write_similarity_csv(s, path);
  });
}

/* curves */

mg_status mg_curve_create(const double* values, const char* const* names, size_t length,
                          mg_curve** out) {
  MG_REQUIRE(out && (values || length == 0), "mg_curve_create: values and output are required");
  *out = nullptr;
  return guarded([&] {
    modgraph::ModularityCurve c;
    c.values.assign(values, values + length);
    for (std::size_t i = 0; i < length; ++i) {
      c.layer_names.push_back(names && names[i] ? names[i] : std::to_string(i));
    }
    *out = new mg_curve{std::move(c)};
  });
}

mg_status mg_curve_read_csv(const char* path, mg_curve** out) {
  MG_REQUIRE(path && out, "mg_curve_read_csv: path and output handle are required");
  *out = nullptr;
  return guarded([&] { *out = new mg_curve{modgraph::read_curve_csv(path)}; });
}

void mg_curve_free(mg_curve* curve) { delete curve; }

size_t mg_curve_length(const mg_curve* c) { return c ? c->curve.size() : 0; }

double mg_curve_value(const mg_curve* c, size_t layer) {
  return c && layer < c->curve.size() ? c->curve.values[layer] : 0.0;
}

const char* mg_curve_layer_name(const mg_curve* c, size_t layer) {
  return c && layer < c->curve.layer_names.size() ? c->curve.layer_names[layer].c_str() : nullptr;
}

mg_status mg_curve_write_csv(const mg_curve* c, const char* path) {
  MG_REQUIRE(c && path, "mg_curve_write_csv: curve and path are required");
  return guarded([&] { modgraph::write_curve_csv(c->curve, path); });
}

mg_status mg_curve_render_svg(const mg_curve* c, const char* path) {
  MG_REQUIRE(c && path, "mg_curve_render_svg: curve and path are required");
  return guarded([&] { modgraph::render_curve(c->curve, path); });
}

mg_status mg_curve_difference(const mg_curve* c, double* values, size_t capacity) {
  MG_REQUIRE(c && values, "mg_curve_difference: curve and output buffer are required");
  return guarded([&] {
    const auto d = modgraph::difference_matrix(c->curve);
    if (capacity < d.values.size()) {
      throw modgraph::ParameterError("difference buffer holds " + std::to_string(capacity) +
                                     " values, needs " + std::to_string(d.values.size()));
    }
    std::memcpy(values, d.values.data(), d.values.size() * sizeof(double));
  });
}

mg_status mg_curve_write_difference_csv(const mg_curve* c, const char* path) {
  MG_REQUIRE(c && path, "mg_curve_write_difference_csv: curve and path are required");
  return guarded([&] {
    modgraph::write_difference_csv(modgraph::difference_matrix(c->curve), c->curve, path);
  });
}

mg_status mg_curve_render_heatmap_svg(const mg_curve* c, const char* path) {
  MG_REQUIRE(c && path, "mg_curve_render_heatmap_svg: curve and path are required");
  return guarded([&] { modgraph::render_heatmap(modgraph::difference_matrix(c->curve), path); });
}

mg_status mg_curves_compare(const mg_curve* const* curves, size_t count, double tolerance,
                            const char* json_path, double* max_peak_difference,
                            int* peaks_agree) {
  MG_REQUIRE(curves || count == 0, "mg_curves_compare: curves are required");
  return guarded([&] {
    std::vector<modgraph::ModularityCurve> list;
    for (std::size_t i = 0; i < count; ++i) {
      if (!curves[i]) throw modgraph::ParameterError("curve " + std::to_string(i) + " is null");
      list.push_back(curves[i]->curve);
    }
    const auto report = modgraph::compare_runs(list, tolerance);
    if (max_peak_difference) *max_peak_difference = report.max_peak_difference;
    if (peaks_agree) *peaks_agree = report.peaks_agree ? 1 : 0;
    if (json_path) modgraph::write_text_file(json_path, modgraph::alignment_json(report));
  });
}

/* sweeps */

mg_status mg_sweep_run(const mg_run* run, const size_t* k_list, size_t k_count,
                       const size_t* n_list, size_t n_count, mg_metric metric, size_t threads,
                       mg_sweep** out) {
  MG_REQUIRE(run && out, "mg_sweep_run: run and output handle are required");
  *out = nullptr;
  return guarded([&] {
    std::vector<std::size_t> ks(k_list, k_list + (k_list ? k_count : 0));
    std::vector<std::size_t> ns;
    if (n_list && n_count > 0) {
      ns.assign(n_list, n_list + n_count);
    } else {
      ns.push_back(run->run.n_samples());
    }
    *out = new mg_sweep{modgraph::sweep(run->run, ks, ns, to_metric(metric), threads)};
  });
}

void mg_sweep_free(mg_sweep* sweep) { delete sweep; }

size_t mg_sweep_num_curves(const mg_sweep* s) { return s ? s->result.points.size() : 0; }

double mg_sweep_max_gap(const mg_sweep* s) { return s ? s->result.max_gap : 0.0; }

double mg_sweep_layer_gap(const mg_sweep* s, size_t layer) {
  return s && layer < s->result.max_gap_per_layer.size() ? s->result.max_gap_per_layer[layer] : 0.0;
}

mg_status mg_sweep_curve(const mg_sweep* s, size_t index, size_t* k, size_t* n, mg_curve** out) {
  MG_REQUIRE(s && k && n && out, "mg_sweep_curve: null argument");
  MG_REQUIRE(index < s->result.points.size(), "sweep index " + std::to_string(index) + " out of range");
  *out = nullptr;
  const auto& p = s->result.points[index];
  *k = p.k;
  *n = p.n;
  return guarded([&] { *out = new mg_curve{p.curve}; });
}

mg_status mg_sweep_write_csv(const mg_sweep* s, const char* path) {
  MG_REQUIRE(s && path, "mg_sweep_write_csv: sweep and path are required");
  return guarded([&] { modgraph::write_text_file(path, modgraph::sweep_csv(s->result)); });
}

mg_status mg_sweep_render_svg(const mg_sweep* s, const char* path) {
  MG_REQUIRE(s && path, "mg_sweep_render_svg: sweep and path are required");
  return guarded([&] {
    std::vector<modgraph::ModularityCurve> curves;
    std::vector<std::string> labels;
    for (const auto& p : s->result.points) {
      curves.push_back(p.curve);
      labels.push_back("k=" + std::to_string(p.k) + " n=" + std::to_string(p.n));
    }
    modgraph::write_text_file(path, modgraph::render_curves_svg(curves, labels));
  });
}

}  // extern "C"
