#include "modgraph/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "modgraph/errors.hpp"

namespace modgraph {

DifferenceMatrix difference_matrix(const ModularityCurve& curve) {
  const std::size_t n = curve.size();
  if (n == 0) throw ShapeError("difference matrix of an empty curve");
  DifferenceMatrix d{n, std::vector<double>(n * n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::abs(curve.values[i] - curve.values[j]);
      d.values[i * n + j] = v;
      d.values[j * n + i] = v;
    }
  }
  return d;
}

CurveSegments detect_segments(const ModularityCurve& curve, double epsilon, std::size_t min_run) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ParameterError("epsilon must be a positive number, got " + std::to_string(epsilon));
  }
  if (min_run < 1) throw ParameterError("min_run must be at least 1");

  CurveSegments seg;
  seg.epsilon = epsilon;
  seg.min_run = min_run;
  const auto& m = curve.values;
  if (m.size() < 2) return seg;

  enum class Kind { Flat, Drop, Other };
  auto classify = [&](std::size_t i) {
    const double d = m[i + 1] - m[i];
    if (d <= -epsilon) return Kind::Drop;
    if (std::abs(d) < epsilon) return Kind::Flat;
    return Kind::Other;
  };

  const std::size_t deltas = m.size() - 1;
  for (std::size_t i = 0; i < deltas;) {
    const Kind kind = classify(i);
    std::size_t j = i + 1;
    while (j < deltas && classify(j) == kind) ++j;
    // deltas [i, j) cover layers [i, j]
    if (kind == Kind::Drop) {
      seg.descents.push_back({i, j});
    } else if (kind == Kind::Flat && j - i >= min_run) {
      seg.plateaus.push_back({i, j});
    }
    i = j;
  }
  return seg;
}

std::string_view to_string(PruneReason reason) noexcept {
  return reason == PruneReason::Plateau ? "plateau" : "descent";
}

PrunePlan prune_plan(const ModularityCurve& curve, const CurveSegments& segments,
                     const std::vector<bool>& repeatable) {
  const std::size_t n = curve.size();
  if (repeatable.size() != n) {
    throw ShapeError("manifest lists " + std::to_string(repeatable.size()) +
                     " layers but the curve has " + std::to_string(n));
  }
  auto name_of = [&](std::size_t i) {
    return i < curve.layer_names.size() ? curve.layer_names[i] : std::to_string(i);
  };

  std::map<std::size_t, PruneReason> picked;
  for (const auto& p : segments.plateaus) {
    if (p.end >= n || p.start >= p.end) throw ShapeError("plateau interval outside the curve");
    for (std::size_t l = p.start + 1; l <= p.end; ++l) picked.emplace(l, PruneReason::Plateau);
  }
  for (const auto& d : segments.descents) {
    if (d.end >= n || d.start >= d.end) throw ShapeError("descent interval outside the curve");
    for (std::size_t l = d.start + 1; l <= d.end; ++l) {
      if (curve.values[l] - curve.values[l - 1] <= -segments.epsilon) {
        picked.insert_or_assign(l, PruneReason::Descent);
      }
    }
  }

  PrunePlan plan;
  plan.epsilon = segments.epsilon;
  for (const auto& [layer, reason] : picked) {
    plan.candidates.push_back({layer, name_of(layer), reason, repeatable[layer]});
  }
  return plan;
}

PrunePlan prune_plan(const ModularityCurve& curve, const CurveSegments& segments,
                     const RunManifest& manifest) {
  std::vector<bool> repeatable;
  for (const auto& layer : manifest.layers) repeatable.push_back(layer.repeatable);
  return prune_plan(curve, segments, repeatable);
}

std::string layer_group(std::string_view name) {
  std::size_t end = name.size();
  while (end > 0 && std::isdigit(static_cast<unsigned char>(name[end - 1]))) --end;
  if (end == name.size()) return std::string(name);
  while (end > 0 && (name[end - 1] == '.' || name[end - 1] == '_' || name[end - 1] == '-')) --end;
  return std::string(name.substr(0, end));
}

AlignmentReport compare_runs(std::span<const ModularityCurve> curves, double tolerance) {
  if (curves.size() < 2) {
    throw ParameterError("compare_runs needs at least 2 curves, got " +
                         std::to_string(curves.size()));
  }
  if (!(tolerance >= 0.0)) throw ParameterError("tolerance must be non-negative");

  AlignmentReport report;
  report.tolerance = tolerance;
  for (const auto& c : curves) {
    if (c.size() == 0) throw ShapeError("cannot compare an empty curve");
    const auto it = std::max_element(c.values.begin(), c.values.end());
    report.curves.push_back(
        {c.size(), *it, static_cast<std::size_t>(std::distance(c.values.begin(), it))});
  }
  for (std::size_t a = 0; a < report.curves.size(); ++a) {
    for (std::size_t b = a + 1; b < report.curves.size(); ++b) {
      report.max_peak_difference = std::max(
          report.max_peak_difference, std::abs(report.curves[a].peak - report.curves[b].peak));
    }
  }
  report.peaks_agree = report.max_peak_difference <= tolerance;

  // Group layers by name prefix, in order of first appearance.
  auto group_of = [](const ModularityCurve& c, std::size_t i) {
    return i < c.layer_names.size() ? layer_group(c.layer_names[i]) : std::string();
  };
  std::vector<std::string> groups;
  std::map<std::string, std::size_t> rows_per_group;
  for (const auto& c : curves) {
    std::map<std::string, std::size_t> counts;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::string g = group_of(c, i);
      if (!rows_per_group.contains(g)) {
        groups.push_back(g);
        rows_per_group[g] = 0;
      }
      rows_per_group[g] = std::max(rows_per_group[g], ++counts[g]);
    }
  }
  std::map<std::string, std::size_t> offset;
  for (const auto& g : groups) {
    offset[g] = report.row_groups.size();
    report.row_groups.insert(report.row_groups.end(), rows_per_group[g], g);
  }
  report.aligned.assign(report.row_groups.size(),
                        std::vector<std::optional<double>>(curves.size()));
  for (std::size_t ci = 0; ci < curves.size(); ++ci) {
    std::map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < curves[ci].size(); ++i) {
      const std::string g = group_of(curves[ci], i);
      report.aligned[offset[g] + seen[g]++][ci] = curves[ci].values[i];
    }
  }
  return report;
}

}  // namespace modgraph
