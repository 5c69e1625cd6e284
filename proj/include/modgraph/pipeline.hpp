#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "modgraph/analysis.hpp"
#include "modgraph/graph_builder.hpp"
#include "modgraph/modularity.hpp"
#include "modgraph/similarity.hpp"
#include "modgraph/tensor_io.hpp"

namespace modgraph {

inline constexpr std::size_t kDefaultK = 3;

struct AnalyzeOptions {
  std::size_t k = kDefaultK;
  Metric metric = Metric::Cosine;
  double epsilon = kDefaultEpsilon;
  std::size_t min_run = kDefaultMinPlateauRun;
  std::size_t threads = 0;  // 0: default worker count
};

struct AnalysisResult {
  DynamicGraph graph;
  ModularityCurve curve;
  CurveSegments segments;
  PrunePlan plan;
  std::vector<std::size_t> clamped_edges;  // per layer
  AnalyzeOptions options;
  std::size_t n_samples = 0;
};

// Similarity, k-NN snapshots, modularity curve, segments and prune plan.
AnalysisResult analyze(const LayerFeatureSet& run, const AnalyzeOptions& options);

// Rows kept when subsampling to n: the first rows of each present class in
// file order, n / P per class (P = classes present) with the remainder going
// one each to the lowest class ids. n == N keeps every row.
std::vector<std::size_t> subsample_indices(const LabelVector& labels, std::size_t n);
LayerFeatureSet subsample(const LayerFeatureSet& run, std::size_t n);

struct SweepPoint {
  std::size_t k;
  std::size_t n;
  ModularityCurve curve;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // n-major, then k, in input order
  // Largest |M_a[l] - M_b[l]| over all curve pairs, per layer and overall.
  std::vector<double> max_gap_per_layer;
  double max_gap = 0.0;
};

SweepResult sweep(const LayerFeatureSet& run, std::span<const std::size_t> k_list,
                  std::span<const std::size_t> n_list, Metric metric, std::size_t threads = 0);

}  // namespace modgraph
