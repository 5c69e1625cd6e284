#include "modgraph/render.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "modgraph/errors.hpp"

namespace modgraph {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 50.0;

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fixed(double v, int digits = 2) {
  if (std::abs(v) < 0.5 * std::pow(10.0, -digits)) v = 0.0;  // no "-0.00"
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, digits);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("0");
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Viridis-like ramp sampled at five stops, linear in between.
std::string colour(double t) {
  static constexpr std::array<std::array<double, 3>, 5> stops = {{{68, 1, 84},
                                                                  {59, 82, 139},
                                                                  {33, 145, 140},
                                                                  {94, 201, 98},
                                                                  {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
  const double f = t - static_cast<double>(i);
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c) {
    rgb[c] = static_cast<int>(std::lround(stops[i][c] + (stops[i + 1][c] - stops[i][c]) * f));
  }
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

struct Axes {
  std::size_t layers;
  double lo, hi;

  double x(std::size_t i) const {
    const double span = kWidth - kLeft - kRight;
    return layers <= 1 ? kLeft + span / 2 : kLeft + span * static_cast<double>(i) / static_cast<double>(layers - 1);
  }
  double y(double v) const {
    return kTop + (kHeight - kTop - kBottom) * (hi - v) / (hi - lo);
  }
};

Axes make_axes(std::span<const ModularityCurve> curves) {
  std::size_t layers = 0;
  double lo = 0.0, hi = 0.0;
  for (const auto& c : curves) {
    layers = std::max(layers, c.size());
    for (double v : c.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  lo = std::floor(lo * 10.0) / 10.0;
  hi = std::max(std::ceil(hi * 10.0) / 10.0, lo + 0.1);
  return {layers, lo, hi};
}

void draw_frame(std::ostringstream& out, const Axes& ax) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom;
  out << "<line x1=\"" << fixed(x0) << "\" y1=\"" << fixed(y0) << "\" x2=\"" << fixed(x1)
      << "\" y2=\"" << fixed(y0) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << fixed(x0) << "\" y1=\"" << fixed(kTop) << "\" x2=\"" << fixed(x0)
      << "\" y2=\"" << fixed(y0) << "\" stroke=\"black\"/>\n";
  const std::size_t step = std::max<std::size_t>(1, (ax.layers + 19) / 20);
  for (std::size_t i = 0; i < ax.layers; i += step) {
    out << "<text x=\"" << fixed(ax.x(i)) << "\" y=\"" << fixed(y0 + 16)
        << "\" font-size=\"10\" text-anchor=\"middle\">" << i << "</text>\n";
  }
  for (int t = 0; t <= 4; ++t) {
    const double v = ax.lo + (ax.hi - ax.lo) * t / 4.0;
    out << "<text x=\"" << fixed(x0 - 6) << "\" y=\"" << fixed(ax.y(v) + 3)
        << "\" font-size=\"10\" text-anchor=\"end\">" << fixed(v) << "</text>\n";
  }
  out << "<text x=\"" << fixed((x0 + x1) / 2) << "\" y=\"" << fixed(kHeight - 10)
      << "\" font-size=\"12\" text-anchor=\"middle\">layer</text>\n";
  out << "<text x=\"14\" y=\"" << fixed((kTop + y0) / 2) << "\" font-size=\"12\" "
      << "text-anchor=\"middle\" transform=\"rotate(-90 14 " << fixed((kTop + y0) / 2)
      << ")\">modularity</text>\n";
}

void draw_polyline(std::ostringstream& out, const Axes& ax, const ModularityCurve& c,
                   const char* stroke) {
  out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out << ' ';
    out << fixed(ax.x(i)) << ',' << fixed(ax.y(c.values[i]));
  }
  out << "\"/>\n";
}

std::string header(double w, double h) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(w, 0) << "\" height=\""
      << fixed(h, 0) << "\" viewBox=\"0 0 " << fixed(w, 0) << ' ' << fixed(h, 0) << "\">\n";
  return out.str();
}

}  // namespace

std::string render_curve_svg(const ModularityCurve& curve) {
  if (curve.size() == 0) throw ShapeError("cannot render an empty curve");
  std::span<const ModularityCurve> one(&curve, 1);
  const Axes ax = make_axes(one);
  std::ostringstream out;
  out << header(kWidth, kHeight);
  draw_frame(out, ax);
  draw_polyline(out, ax, curve, kPalette[0]);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << "<circle cx=\"" << fixed(ax.x(i)) << "\" cy=\"" << fixed(ax.y(curve.values[i]))
        << "\" r=\"3\" fill=\"" << kPalette[0] << "\"><title>"
        << escape(i < curve.layer_names.size() ? curve.layer_names[i] : std::to_string(i))
        << ": " << fixed(curve.values[i], 4) << "</title></circle>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_curves_svg(std::span<const ModularityCurve> curves,
                              std::span<const std::string> labels) {
  if (curves.empty()) throw ShapeError("no curves to render");
  if (labels.size() != curves.size()) throw ShapeError("one label per curve is required");
  for (const auto& c : curves) {
    if (c.size() == 0) throw ShapeError("cannot render an empty curve");
  }
  const Axes ax = make_axes(curves);
  std::ostringstream out;
  out << header(kWidth + 120, kHeight);
  draw_frame(out, ax);
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* stroke = kPalette[c % kPalette.size()];
    draw_polyline(out, ax, curves[c], stroke);
    const double y = kTop + 14.0 * static_cast<double>(c);
    out << "<line x1=\"" << fixed(kWidth) << "\" y1=\"" << fixed(y) << "\" x2=\""
        << fixed(kWidth + 16) << "\" y2=\"" << fixed(y) << "\" stroke=\"" << stroke
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fixed(kWidth + 20) << "\" y=\"" << fixed(y + 3)
        << "\" font-size=\"10\">" << escape(labels[c]) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_heatmap_svg(const DifferenceMatrix& matrix) {
  const std::size_t n = matrix.size;
  if (n == 0) throw ShapeError("cannot render an empty matrix");
  const double cell = std::max(4.0, std::min(24.0, 480.0 / static_cast<double>(n)));
  const double margin = 40.0;
  const double side = margin + cell * static_cast<double>(n) + 10.0;
  double max_v = 0.0;
  for (double v : matrix.values) max_v = std::max(max_v, v);

  std::ostringstream out;
  out << header(side, side);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = matrix(i, j);
      out << "<rect x=\"" << fixed(margin + cell * static_cast<double>(j)) << "\" y=\""
          << fixed(margin + cell * static_cast<double>(i)) << "\" width=\"" << fixed(cell)
          << "\" height=\"" << fixed(cell) << "\" fill=\""
          << colour(max_v > 0.0 ? v / max_v : 0.0) << "\"><title>" << i << ',' << j << ": "
          << fixed(v, 4) << "</title></rect>\n";
    }
  }
  const std::size_t step = std::max<std::size_t>(1, (n + 19) / 20);
  for (std::size_t i = 0; i < n; i += step) {
    const double c = margin + cell * (static_cast<double>(i) + 0.5);
    out << "<text x=\"" << fixed(c) << "\" y=\"" << fixed(margin - 6)
        << "\" font-size=\"9\" text-anchor=\"middle\">" << i << "</text>\n";
    out << "<text x=\"" << fixed(margin - 6) << "\" y=\"" << fixed(c + 3)
        << "\" font-size=\"9\" text-anchor=\"end\">" << i << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void render_curve(const ModularityCurve& curve, const fs::path& path) {
  write_text_file(path, render_curve_svg(curve));
}

void render_heatmap(const DifferenceMatrix& matrix, const fs::path& path) {
  write_text_file(path, render_heatmap_svg(matrix));
}

}  // namespace modgraph
