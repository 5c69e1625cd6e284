// modgraph: command-line front end over the modgraph C API.

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "modgraph/modgraph.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 4;

struct Failure {
  int code;
};

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using RunPtr = std::unique_ptr<mg_run, Deleter<mg_run, mg_run_free>>;
using AnalysisPtr = std::unique_ptr<mg_analysis, Deleter<mg_analysis, mg_analysis_free>>;
using CurvePtr = std::unique_ptr<mg_curve, Deleter<mg_curve, mg_curve_free>>;
using SweepPtr = std::unique_ptr<mg_sweep, Deleter<mg_sweep, mg_sweep_free>>;

void check(mg_status status) {
  if (status == MG_OK) return;
  std::fprintf(stderr, "modgraph: %s: %s\n", mg_status_name(status), mg_last_error());
  throw Failure{mg_exit_code(status)};
}

[[noreturn]] void usage_error(const std::string& message) {
  std::fprintf(stderr, "modgraph: ParameterError: %s\n", message.c_str());
  throw Failure{kExitUsage};
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const char* flag) {
  std::vector<std::size_t> out;
  for (const auto& item : split(text)) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      usage_error(std::string(flag) + ": '" + item + "' is not a non-negative integer");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  for (const auto& item : split(text)) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      usage_error(std::string(flag) + ": '" + item + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

std::set<std::string> parse_formats(const std::string& text, const std::set<std::string>& allowed) {
  std::set<std::string> out;
  for (const auto& f : split(text)) {
    if (!allowed.contains(f)) usage_error("--format: unknown format '" + f + "'");
    out.insert(f);
  }
  return out;
}

mg_metric parse_metric(const std::string& name) {
  if (name == "cosine") return MG_METRIC_COSINE;
  if (name == "pearson") return MG_METRIC_PEARSON;
  usage_error("--metric must be cosine or pearson, got '" + name + "'");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::fprintf(stderr, "modgraph: IoError: cannot create '%s': %s\n", dir.c_str(),
                 ec.message().c_str());
    throw Failure{kExitIo};
  }
}

std::string out_file(const fs::path& dir, const char* name) { return (dir / name).string(); }

// Options shared by the commands that build graphs from a manifest.
struct GraphOptions {
  std::string manifest;
  std::size_t k = 3;
  std::string metric = "cosine";
  double epsilon = 0.005;
  std::size_t min_run = 2;
  std::size_t threads = 0;
};

void add_graph_options(CLI::App* cmd, GraphOptions& o, bool manifest_required) {
  auto* m = cmd->add_option("--manifest", o.manifest, "Run manifest (JSON)");
  if (manifest_required) m->required();
  cmd->add_option("--k", o.k, "Neighbours per node")->capture_default_str();
  cmd->add_option("--metric", o.metric, "cosine or pearson")->capture_default_str();
  cmd->add_option("--epsilon", o.epsilon, "Plateau/descent threshold")->capture_default_str();
  cmd->add_option("--min-run", o.min_run, "Minimum plateau length in steps")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads (0: MODGRAPH_THREADS or all cores)");
}

AnalysisPtr run_analysis(const GraphOptions& o, RunPtr& run) {
  mg_run* raw = nullptr;
  check(mg_run_load(o.manifest.c_str(), &raw));
  run.reset(raw);
  mg_analyze_options opts;
  mg_analyze_options_init(&opts);
  opts.k = o.k;
  opts.metric = parse_metric(o.metric);
  opts.epsilon = o.epsilon;
  opts.min_run = o.min_run;
  opts.threads = o.threads;
  mg_analysis* analysis = nullptr;
  check(mg_analyze(run.get(), &opts, &analysis));
  return AnalysisPtr(analysis);
}

CurvePtr analysis_curve(const mg_analysis* analysis) {
  mg_curve* c = nullptr;
  check(mg_analysis_curve(analysis, &c));
  return CurvePtr(c);
}

void print_summary(const mg_analysis* analysis) {
  size_t needed = 0;
  check(mg_analysis_prune_summary(analysis, nullptr, 0, &needed));
  std::string text(needed, '\0');
  check(mg_analysis_prune_summary(analysis, text.data(), text.size(), &needed));
  std::fputs(text.c_str(), stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layer-wise k-NN graph modularity of neural network feature representations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mg_version()));

  // analyze
  GraphOptions analyze_opts;
  std::string analyze_out = ".";
  std::string analyze_formats = "json,csv";
  bool analyze_edges = false;
  bool analyze_similarity = false;
  auto* analyze = app.add_subcommand("analyze", "Modularity curve, segments and prune plan of a run");
  add_graph_options(analyze, analyze_opts, true);
  analyze->add_option("--out", analyze_out, "Output directory")->capture_default_str();
  analyze->add_option("--format", analyze_formats, "Any of json,csv,svg")->capture_default_str();
  analyze->add_flag("--edges", analyze_edges, "Also write edges_<layer>.csv per snapshot");
  analyze->add_flag("--dump-similarity", analyze_similarity,
                    "Also write similarity_<layer>.csv per layer");

  // diff
  GraphOptions diff_opts;
  std::string diff_curve;
  std::string diff_out = ".";
  std::string diff_formats = "csv";
  auto* diff = app.add_subcommand("diff", "Layer difference matrix |M_i - M_j|");
  add_graph_options(diff, diff_opts, false);
  diff->add_option("--curve", diff_curve, "Precomputed curve CSV (instead of --manifest)");
  diff->add_option("--out", diff_out, "Output directory")->capture_default_str();
  diff->add_option("--format", diff_formats, "Any of csv,svg")->capture_default_str();

  // prune-plan
  GraphOptions prune_opts;
  std::string prune_out = ".";
  auto* prune = app.add_subcommand("prune-plan", "Recommend plateau/descent layers for removal");
  add_graph_options(prune, prune_opts, true);
  prune->add_option("--out", prune_out, "Output directory")->capture_default_str();

  // sweep
  GraphOptions sweep_opts;
  std::string k_list = "3,5,7,9,11";
  std::string n_list;
  std::string sweep_out = ".";
  std::string sweep_formats = "csv";
  auto* sweep = app.add_subcommand("sweep", "Modularity curves over several k and N");
  add_graph_options(sweep, sweep_opts, true);
  sweep->add_option("--k-list", k_list, "Comma-separated k values")->capture_default_str();
  sweep->add_option("--n-list", n_list, "Comma-separated sample counts (default: all samples)");
  sweep->add_option("--out", sweep_out, "Output directory")->capture_default_str();
  sweep->add_option("--format", sweep_formats, "Any of csv,svg")->capture_default_str();

  // synth
  mg_synth_spec spec;
  mg_synth_spec_init(&spec);
  std::string synth_out;
  std::string schedule;
  double sep_min = 0.0, sep_max = 4.0;
  std::string plateau;
  std::string repeatable;
  std::string dtype = "f8";
  auto* synth = app.add_subcommand("synth", "Write a synthetic run of Gaussian class blobs");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--n", spec.n_samples, "Samples")->capture_default_str();
  synth->add_option("--classes", spec.n_classes, "Classes")->capture_default_str();
  synth->add_option("--features", spec.n_features, "Features per layer")->capture_default_str();
  synth->add_option("--layers", spec.n_layers, "Layers")->capture_default_str();
  synth->add_option("--schedule", schedule, "Comma-separated separation per layer");
  synth->add_option("--separation-min", sep_min, "First separation of the linear schedule")
      ->capture_default_str();
  synth->add_option("--separation-max", sep_max, "Last separation of the linear schedule")
      ->capture_default_str();
  synth->add_option("--noise", spec.noise_sigma, "Noise standard deviation")->capture_default_str();
  synth->add_option("--seed", spec.seed, "Generator seed")->capture_default_str();
  synth->add_option("--plateau", plateau, "start,end layers held at constant separation");
  synth->add_option("--repeatable", repeatable, "Comma-separated layer indices marked repeatable");
  synth->add_option("--dtype", dtype, "f4 or f8")->capture_default_str();

  // render
  std::string render_curve;
  std::string render_out;
  bool render_heatmap = false;
  auto* render = app.add_subcommand("render", "Render a curve CSV as an SVG line chart or heatmap");
  render->add_option("--curve", render_curve, "Curve CSV")->required();
  render->add_option("--out", render_out, "Output SVG path")->required();
  render->add_flag("--heatmap", render_heatmap, "Render the difference-matrix heatmap instead");

  // compare
  std::vector<std::string> compare_curves;
  double compare_tol = 0.01;
  std::string compare_out;
  auto* compare = app.add_subcommand("compare", "Compare peak modularity across curve CSVs");
  compare->add_option("--curve", compare_curves, "Curve CSV (repeat for each curve)")->required();
  compare->add_option("--tolerance", compare_tol, "Peak agreement tolerance")->capture_default_str();
  compare->add_option("--out", compare_out, "Alignment report JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*analyze) {
      const auto formats = parse_formats(analyze_formats, {"json", "csv", "svg"});
      RunPtr run;
      auto analysis = run_analysis(analyze_opts, run);
      const fs::path out(analyze_out);
      ensure_dir(out);
      auto curve = analysis_curve(analysis.get());
      if (formats.contains("json")) {
        check(mg_analysis_write_report(analysis.get(), out_file(out, "report.json").c_str()));
      }
      if (formats.contains("csv")) {
        check(mg_curve_write_csv(curve.get(), out_file(out, "curve.csv").c_str()));
      }
      if (formats.contains("svg")) {
        check(mg_curve_render_svg(curve.get(), out_file(out, "curve.svg").c_str()));
      }
      for (size_t l = 0; l < mg_analysis_num_layers(analysis.get()); ++l) {
        if (analyze_edges) {
          const auto path = out / ("edges_" + std::to_string(l) + ".csv");
          check(mg_analysis_write_edges(analysis.get(), l, path.c_str()));
        }
        if (analyze_similarity) {
          const auto path = out / ("similarity_" + std::to_string(l) + ".csv");
          check(mg_run_write_similarity(run.get(), l, parse_metric(analyze_opts.metric),
                                        analyze_opts.threads, path.c_str()));
        }
      }
      for (size_t l = 0; l < mg_analysis_num_layers(analysis.get()); ++l) {
        std::printf("%zu\t%s\t%.6f\n", l, mg_curve_layer_name(curve.get(), l),
                    mg_curve_value(curve.get(), l));
      }
    } else if (*diff) {
      const auto formats = parse_formats(diff_formats, {"csv", "svg"});
      if (diff_curve.empty() == diff_opts.manifest.empty()) {
        usage_error("diff needs exactly one of --manifest or --curve");
      }
      CurvePtr curve;
      if (!diff_curve.empty()) {
        mg_curve* c = nullptr;
        check(mg_curve_read_csv(diff_curve.c_str(), &c));
        curve.reset(c);
      } else {
        RunPtr run;
        auto analysis = run_analysis(diff_opts, run);
        curve = analysis_curve(analysis.get());
      }
      const fs::path out(diff_out);
      ensure_dir(out);
      if (formats.contains("csv")) {
        check(mg_curve_write_difference_csv(curve.get(), out_file(out, "diff.csv").c_str()));
      }
      if (formats.contains("svg")) {
        check(mg_curve_render_heatmap_svg(curve.get(), out_file(out, "heatmap.svg").c_str()));
      }
    } else if (*prune) {
      RunPtr run;
      auto analysis = run_analysis(prune_opts, run);
      const fs::path out(prune_out);
      ensure_dir(out);
      check(mg_analysis_write_prune_plan(analysis.get(), out_file(out, "prune_plan.json").c_str()));
      print_summary(analysis.get());
    } else if (*sweep) {
      const auto formats = parse_formats(sweep_formats, {"csv", "svg"});
      const auto ks = parse_size_list(k_list, "--k-list");
      const auto ns = parse_size_list(n_list, "--n-list");
      if (ks.empty()) usage_error("--k-list is empty");
      mg_run* raw = nullptr;
      check(mg_run_load(sweep_opts.manifest.c_str(), &raw));
      RunPtr run(raw);
      mg_sweep* s = nullptr;
      check(mg_sweep_run(run.get(), ks.data(), ks.size(), ns.empty() ? nullptr : ns.data(),
                         ns.size(), parse_metric(sweep_opts.metric), sweep_opts.threads, &s));
      SweepPtr result(s);
      const fs::path out(sweep_out);
      ensure_dir(out);
      if (formats.contains("csv")) {
        check(mg_sweep_write_csv(result.get(), out_file(out, "sweep.csv").c_str()));
      }
      if (formats.contains("svg")) {
        check(mg_sweep_render_svg(result.get(), out_file(out, "sweep.svg").c_str()));
      }
      std::printf("curves: %zu\n", mg_sweep_num_curves(result.get()));
      for (size_t l = 0; l < mg_run_num_layers(run.get()); ++l) {
        std::printf("layer %zu\tmax gap %.6f\n", l, mg_sweep_layer_gap(result.get(), l));
      }
      std::printf("max pairwise gap: %.6f\n", mg_sweep_max_gap(result.get()));
    } else if (*synth) {
      std::vector<double> sched;
      if (!schedule.empty()) {
        sched = parse_double_list(schedule, "--schedule");
        if (sched.size() != spec.n_layers) {
          usage_error("--schedule has " + std::to_string(sched.size()) + " values for --layers " +
                      std::to_string(spec.n_layers));
        }
      } else {
        for (size_t i = 0; i < spec.n_layers; ++i) {
          sched.push_back(spec.n_layers == 1 ? sep_max
                                             : sep_min + (sep_max - sep_min) * static_cast<double>(i) /
                                                             static_cast<double>(spec.n_layers - 1));
        }
      }
      spec.schedule = sched.data();
      if (!plateau.empty()) {
        const auto range = parse_size_list(plateau, "--plateau");
        if (range.size() != 2 || range[0] >= range[1]) {
          usage_error("--plateau expects start,end with start < end");
        }
        spec.plateau_start = range[0];
        spec.plateau_end = range[1];
      }
      std::vector<int> flags;
      if (!repeatable.empty()) {
        flags.assign(spec.n_layers, 0);
        for (size_t idx : parse_size_list(repeatable, "--repeatable")) {
          if (idx >= spec.n_layers) usage_error("--repeatable: layer " + std::to_string(idx) + " out of range");
          flags[idx] = 1;
        }
        spec.repeatable = flags.data();
      }
      if (dtype == "f4") {
        spec.dtype = MG_DTYPE_F32;
      } else if (dtype == "f8") {
        spec.dtype = MG_DTYPE_F64;
      } else {
        usage_error("--dtype must be f4 or f8");
      }
      check(mg_synth_write(&spec, synth_out.c_str()));
    } else if (*render) {
      mg_curve* c = nullptr;
      check(mg_curve_read_csv(render_curve.c_str(), &c));
      CurvePtr curve(c);
      if (render_heatmap) {
        check(mg_curve_render_heatmap_svg(curve.get(), render_out.c_str()));
      } else {
        check(mg_curve_render_svg(curve.get(), render_out.c_str()));
      }
    } else if (*compare) {
      std::vector<CurvePtr> owned;
      std::vector<const mg_curve*> curves;
      for (const auto& path : compare_curves) {
        mg_curve* c = nullptr;
        check(mg_curve_read_csv(path.c_str(), &c));
        owned.emplace_back(c);
        curves.push_back(c);
      }
      double gap = 0.0;
      int agree = 0;
      check(mg_curves_compare(curves.data(), curves.size(), compare_tol,
                              compare_out.empty() ? nullptr : compare_out.c_str(), &gap, &agree));
      for (size_t i = 0; i < curves.size(); ++i) {
        std::printf("%s\tlayers %zu\n", compare_curves[i].c_str(), mg_curve_length(curves[i]));
      }
      std::printf("max peak difference: %.6f (%s within %.4g)\n", gap, agree ? "agree" : "differ",
                  compare_tol);
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return 0;
}
