#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "modgraph/analysis.hpp"
#include "modgraph/modularity.hpp"

namespace modgraph {

// Standalone SVG documents. Output depends only on the inputs.

// Line chart: layer index on x, modularity on y; one polyline.
std::string render_curve_svg(const ModularityCurve& curve);
// One polyline per curve with a legend entry from `labels`.
std::string render_curves_svg(std::span<const ModularityCurve> curves,
                              std::span<const std::string> labels);
// Colour-mapped grid, one rect per cell, layer-indexed axes.
std::string render_heatmap_svg(const DifferenceMatrix& matrix);

void render_curve(const ModularityCurve& curve, const std::filesystem::path& path);
void render_heatmap(const DifferenceMatrix& matrix, const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace modgraph
