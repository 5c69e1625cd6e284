#pragma once

#include <filesystem>
#include <string>

#include "modgraph/analysis.hpp"
#include "modgraph/pipeline.hpp"

namespace modgraph {

// Report JSON: curve, layers, epsilon, plateaus, descents, prune_candidates,
// clamped_edges_per_layer and params {k, n, metric}.
std::string report_json(const AnalysisResult& result);
void write_report(const AnalysisResult& result, const std::filesystem::path& path);

// {"epsilon": .., "prune_candidates": [...]}.
std::string prune_plan_json(const PrunePlan& plan);
// Fixed-width table for terminals.
std::string prune_plan_summary(const PrunePlan& plan);

// `layer,name,modularity` with exact (round-trip) values.
std::string curve_csv(const ModularityCurve& curve);
void write_curve_csv(const ModularityCurve& curve, const std::filesystem::path& path);
ModularityCurve read_curve_csv(const std::filesystem::path& path);

// Header row of layer names, then L rows of L values (12 significant digits).
std::string difference_csv(const DifferenceMatrix& matrix, const ModularityCurve& curve);
void write_difference_csv(const DifferenceMatrix& matrix, const ModularityCurve& curve,
                          const std::filesystem::path& path);

// `k,n,layer,modularity`.
std::string sweep_csv(const SweepResult& sweep);

std::string alignment_json(const AlignmentReport& report);

}  // namespace modgraph
