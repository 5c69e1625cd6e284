#include "modgraph/report.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "modgraph/errors.hpp"
#include "modgraph/render.hpp"
#include "text_format.hpp"

namespace modgraph {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

ordered_json candidates_json(const PrunePlan& plan) {
  ordered_json out = ordered_json::array();
  for (const auto& c : plan.candidates) {
    out.push_back({{"layer", c.layer},
                   {"name", c.name},
                   {"reason", std::string(to_string(c.reason))},
                   {"eligible", c.eligible}});
  }
  return out;
}

ordered_json intervals_json(const std::vector<Interval>& intervals) {
  ordered_json out = ordered_json::array();
  for (const auto& iv : intervals) out.push_back({iv.start, iv.end});
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::string report_json(const AnalysisResult& result) {
  ordered_json doc;
  doc["curve"] = result.curve.values;
  doc["layers"] = result.curve.layer_names;
  doc["epsilon"] = result.segments.epsilon;
  doc["plateaus"] = intervals_json(result.segments.plateaus);
  doc["descents"] = intervals_json(result.segments.descents);
  doc["prune_candidates"] = candidates_json(result.plan);
  doc["clamped_edges_per_layer"] = result.clamped_edges;
  doc["params"] = {{"k", result.options.k},
                   {"n", result.n_samples},
                   {"metric", std::string(to_string(result.options.metric))}};
  return doc.dump(2) + "\n";
}

void write_report(const AnalysisResult& result, const fs::path& path) {
  write_text_file(path, report_json(result));
}

std::string prune_plan_json(const PrunePlan& plan) {
  ordered_json doc;
  doc["epsilon"] = plan.epsilon;
  doc["prune_candidates"] = candidates_json(plan);
  return doc.dump(2) + "\n";
}

std::string prune_plan_summary(const PrunePlan& plan) {
  std::ostringstream out;
  if (plan.candidates.empty()) {
    out << "no prune candidates (epsilon " << detail::format_sig(plan.epsilon) << ")\n";
    return out.str();
  }
  std::size_t width = 4;
  for (const auto& c : plan.candidates) width = std::max(width, c.name.size());
  out << std::left << std::setw(6) << "layer" << std::setw(static_cast<int>(width + 2)) << "name"
      << std::setw(9) << "reason" << "eligible\n";
  for (const auto& c : plan.candidates) {
    out << std::left << std::setw(6) << c.layer << std::setw(static_cast<int>(width + 2)) << c.name
        << std::setw(9) << to_string(c.reason) << (c.eligible ? "yes" : "no") << '\n';
  }
  return out.str();
}

std::string curve_csv(const ModularityCurve& curve) {
  std::ostringstream out;
  out << "layer,name,modularity\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << i << ',' << (i < curve.layer_names.size() ? curve.layer_names[i] : std::to_string(i))
        << ',' << detail::format_exact(curve.values[i]) << '\n';
  }
  return out.str();
}

void write_curve_csv(const ModularityCurve& curve, const fs::path& path) {
  write_text_file(path, curve_csv(curve));
}

ModularityCurve read_curve_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open curve file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("layer,name,modularity", 0) != 0) {
    throw FormatError("'" + path.string() + "' lacks the header 'layer,name,modularity'");
  }
  ModularityCurve curve;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const auto where = "'" + path.string() + "' row " + std::to_string(row + 1);
    if (fields.size() != 3) throw FormatError(where + ": expected 3 fields");
    std::size_t index = 0;
    double value = 0.0;
    auto r1 = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), index);
    auto r2 = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), value);
    if (r1.ec != std::errc() || r2.ec != std::errc() ||
        r2.ptr != fields[2].data() + fields[2].size()) {
      throw FormatError(where + ": unparsable number");
    }
    if (index != row) throw FormatError(where + ": layer indices must be 0, 1, 2, ...");
    if (!(value >= -1.0 && value <= 1.0)) throw DataError(where + ": modularity outside [-1, 1]");
    curve.layer_names.push_back(fields[1]);
    curve.values.push_back(value);
    ++row;
  }
  if (curve.size() == 0) throw ShapeError("'" + path.string() + "' holds no layers");
  return curve;
}

std::string difference_csv(const DifferenceMatrix& matrix, const ModularityCurve& curve) {
  std::ostringstream out;
  for (std::size_t i = 0; i < matrix.size; ++i) {
    if (i) out << ',';
    out << (i < curve.layer_names.size() ? curve.layer_names[i] : std::to_string(i));
  }
  out << '\n';
  for (std::size_t i = 0; i < matrix.size; ++i) {
    for (std::size_t j = 0; j < matrix.size; ++j) {
      if (j) out << ',';
      out << detail::format_sig(matrix(i, j));
    }
    out << '\n';
  }
  return out.str();
}

void write_difference_csv(const DifferenceMatrix& matrix, const ModularityCurve& curve,
                          const fs::path& path) {
  write_text_file(path, difference_csv(matrix, curve));
}

std::string sweep_csv(const SweepResult& sweep) {
  std::ostringstream out;
  out << "k,n,layer,modularity\n";
  for (const auto& p : sweep.points) {
    for (std::size_t l = 0; l < p.curve.size(); ++l) {
      out << p.k << ',' << p.n << ',' << l << ',' << detail::format_exact(p.curve.values[l])
          << '\n';
    }
  }
  return out.str();
}

std::string alignment_json(const AlignmentReport& report) {
  ordered_json doc;
  ordered_json curves = ordered_json::array();
  for (const auto& c : report.curves) {
    curves.push_back({{"length", c.length}, {"peak", c.peak}, {"peak_layer", c.peak_layer}});
  }
  doc["curves"] = curves;
  doc["max_peak_difference"] = report.max_peak_difference;
  doc["tolerance"] = report.tolerance;
  doc["peaks_agree"] = report.peaks_agree;
  ordered_json rows = ordered_json::array();
  for (std::size_t r = 0; r < report.aligned.size(); ++r) {
    ordered_json values = ordered_json::array();
    for (const auto& v : report.aligned[r]) values.push_back(v ? ordered_json(*v) : ordered_json());
    rows.push_back({{"group", report.row_groups[r]}, {"values", values}});
  }
  doc["aligned"] = rows;
  return doc.dump(2) + "\n";
}

}  // namespace modgraph
