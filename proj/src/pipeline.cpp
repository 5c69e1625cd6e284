#include "modgraph/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "modgraph/errors.hpp"

namespace modgraph {

AnalysisResult analyze(const LayerFeatureSet& run, const AnalyzeOptions& options) {
  if (options.k < 1 || options.k + 1 > run.n_samples()) {
    throw ParameterError("k must satisfy 1 <= k <= N-1 = " + std::to_string(run.n_samples() - 1) +
                         ", got k=" + std::to_string(options.k));
  }
  // Validates epsilon before the expensive part.
  detect_segments(ModularityCurve{}, options.epsilon, options.min_run);

  DynamicGraph graph = build_dynamic_graph(run, options.metric, options.k, options.threads);
  ModularityCurve curve = modularity_curve(graph);
  std::vector<std::size_t> clamped;
  for (const auto& g : graph.snapshots) clamped.push_back(g.clamped_edges);
  CurveSegments segments = detect_segments(curve, options.epsilon, options.min_run);
  PrunePlan plan = prune_plan(curve, segments, run.manifest);
  return AnalysisResult{std::move(graph), std::move(curve), std::move(segments), std::move(plan),
                        std::move(clamped), options, run.n_samples()};
}

std::vector<std::size_t> subsample_indices(const LabelVector& labels, std::size_t n) {
  const std::size_t total = labels.size();
  if (n < 2 || n > total) {
    throw ParameterError("subsample size n=" + std::to_string(n) + " must lie in [2, " +
                         std::to_string(total) + "]");
  }
  std::vector<std::size_t> all(total);
  for (std::size_t i = 0; i < total; ++i) all[i] = i;
  if (n == total) return all;

  std::map<std::int64_t, std::size_t> available;
  for (std::size_t i = 0; i < total; ++i) ++available[labels[i]];
  const std::size_t classes = available.size();
  std::map<std::int64_t, std::size_t> quota;
  std::size_t rank = 0;
  for (const auto& [label, count] : available) {
    const std::size_t q = n / classes + (rank++ < n % classes ? 1 : 0);
    if (q > count) {
      throw ParameterError("n=" + std::to_string(n) + " needs " + std::to_string(q) +
                           " samples of class " + std::to_string(label) + " but only " +
                           std::to_string(count) + " are available");
    }
    quota[label] = q;
  }
  std::vector<std::size_t> keep;
  keep.reserve(n);
  for (std::size_t i = 0; i < total; ++i) {
    auto& q = quota[labels[i]];
    if (q > 0) {
      keep.push_back(i);
      --q;
    }
  }
  return keep;
}

LayerFeatureSet subsample(const LayerFeatureSet& run, std::size_t n) {
  const auto keep = subsample_indices(run.labels, n);
  std::vector<FeatureMatrix> layers;
  layers.reserve(run.n_layers());
  for (const auto& f : run.layers) layers.push_back(f.select_rows(keep));
  return LayerFeatureSet{run.manifest, run.labels.select(keep), std::move(layers)};
}

SweepResult sweep(const LayerFeatureSet& run, std::span<const std::size_t> k_list,
                  std::span<const std::size_t> n_list, Metric metric, std::size_t threads) {
  if (k_list.empty()) throw ParameterError("k list is empty");
  if (n_list.empty()) throw ParameterError("n list is empty");
  for (std::size_t n : n_list) {
    if (n > run.n_samples()) {
      throw ParameterError("n=" + std::to_string(n) + " exceeds the " +
                           std::to_string(run.n_samples()) + " available samples");
    }
    for (std::size_t k : k_list) {
      if (k < 1 || k + 1 > n) {
        throw ParameterError("k=" + std::to_string(k) + " is out of bounds [1, " +
                             std::to_string(n - 1) + "] for n=" + std::to_string(n));
      }
    }
  }

  SweepResult result;
  for (std::size_t n : n_list) {
    const LayerFeatureSet sub = subsample(run, n);
    const Partition partition = Partition::from_labels(sub.labels);
    const std::size_t first = result.points.size();
    for (std::size_t k : k_list) result.points.push_back({k, n, {}});
    for (std::size_t l = 0; l < sub.n_layers(); ++l) {
      const auto& name = sub.manifest.layers[l].name;
      try {
        const SimilarityMatrix s = similarity(sub.layers[l], metric, threads);
        for (std::size_t ki = 0; ki < k_list.size(); ++ki) {
          auto& curve = result.points[first + ki].curve;
          curve.values.push_back(modularity(build_knn(s, k_list[ki], l), partition).q);
          curve.layer_names.push_back(name);
        }
      } catch (const Error& e) {
        rethrow_with_context(e, "layer '" + name + "'");
      }
    }
  }

  result.max_gap_per_layer.assign(run.n_layers(), 0.0);
  for (std::size_t a = 0; a < result.points.size(); ++a) {
    for (std::size_t b = a + 1; b < result.points.size(); ++b) {
      for (std::size_t l = 0; l < run.n_layers(); ++l) {
        const double gap =
            std::abs(result.points[a].curve.values[l] - result.points[b].curve.values[l]);
        result.max_gap_per_layer[l] = std::max(result.max_gap_per_layer[l], gap);
      }
    }
  }
  for (double g : result.max_gap_per_layer) result.max_gap = std::max(result.max_gap, g);
  return result;
}

}  // namespace modgraph
