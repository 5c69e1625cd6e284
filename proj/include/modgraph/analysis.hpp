#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modgraph/modularity.hpp"
#include "modgraph/tensor_io.hpp"

namespace modgraph {

/// L x L matrix of absolute modularity differences between layers.
struct DifferenceMatrix {
  std::size_t size = 0;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j) const noexcept { return values[i * size + j]; }
};

DifferenceMatrix difference_matrix(const ModularityCurve& curve);

// Closed layer-index interval [start, end], start < end.
struct Interval {
  std::size_t start;
  std::size_t end;

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline constexpr double kDefaultEpsilon = 0.005;
inline constexpr std::size_t kDefaultMinPlateauRun = 2;

struct CurveSegments {
  std::vector<Interval> plateaus;
  std::vector<Interval> descents;
  double epsilon = kDefaultEpsilon;
  std::size_t min_run = kDefaultMinPlateauRun;
};

// Scans consecutive deltas d_i = M[i+1] - M[i]. Maximal runs with d_i <= -eps
// are descents; maximal runs with |d_i| < eps spanning at least `min_run`
// deltas are plateaus. A single-layer curve has no segments.
CurveSegments detect_segments(const ModularityCurve& curve, double epsilon = kDefaultEpsilon,
                              std::size_t min_run = kDefaultMinPlateauRun);

enum class PruneReason { Plateau, Descent };
std::string_view to_string(PruneReason reason) noexcept;

struct PruneCandidate {
  std::size_t layer;
  std::string name;
  PruneReason reason;
  bool eligible;  // only repeatable layers are eligible
};

struct PrunePlan {
  std::vector<PruneCandidate> candidates;
  double epsilon = kDefaultEpsilon;
};

// Every plateau layer after the plateau's first, and every layer entered by a
// drop of at least epsilon, becomes a candidate.
PrunePlan prune_plan(const ModularityCurve& curve, const CurveSegments& segments,
                     const RunManifest& manifest);
PrunePlan prune_plan(const ModularityCurve& curve, const CurveSegments& segments,
                     const std::vector<bool>& repeatable);

// Layer name with its trailing index removed: "layer3.1" -> "layer3",
// "conv_12" -> "conv".
std::string layer_group(std::string_view name);

struct CurveSummary {
  std::size_t length = 0;
  double peak = 0.0;
  std::size_t peak_layer = 0;
};

struct AlignmentReport {
  std::vector<CurveSummary> curves;
  double max_peak_difference = 0.0;
  double tolerance = 0.0;
  bool peaks_agree = true;
  // Rows grouped by layer-name prefix; each row holds one value per curve,
  // empty where a curve has fewer layers in that group.
  std::vector<std::string> row_groups;
  std::vector<std::vector<std::optional<double>>> aligned;
};

inline constexpr double kDefaultPeakTolerance = 0.01;

AlignmentReport compare_runs(std::span<const ModularityCurve> curves,
                             double tolerance = kDefaultPeakTolerance);

}  // namespace modgraph
