#include "modgraph/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "modgraph/errors.hpp"
#include "modgraph/parallel.hpp"

namespace modgraph {

namespace {

constexpr std::size_t kTile = 32;

// Four interleaved partial sums combined in a fixed order, so every pair is
// reduced identically no matter which worker computes it.
double dot(const double* a, const double* b, std::size_t m) noexcept {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t j = 0;
  for (; j + 4 <= m; j += 4) {
    s0 += a[j] * b[j];
    s1 += a[j + 1] * b[j + 1];
    s2 += a[j + 2] * b[j + 2];
    s3 += a[j + 3] * b[j + 3];
  }
  for (; j < m; ++j) s0 += a[j] * b[j];
  return (s0 + s1) + (s2 + s3);
}

// Cosine of every row pair in a row-major n x m buffer. Rows are assumed
// non-degenerate; callers validate first.
SimilarityMatrix cosine_rows(const std::vector<double>& rows, std::size_t n, std::size_t m,
                             Metric metric, std::size_t threads) {
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = rows.data() + i * m;
    norms[i] = std::sqrt(dot(r, r, m));
  }

  std::vector<double> s(n * n, 0.0);
  const std::size_t tiles = (n + kTile - 1) / kTile;
  // Each task owns row-tile ti and fills pairs (i, j) with j >= i, mirroring
  // into the lower triangle. Tasks write disjoint cells.
  parallel_for(tiles, resolve_threads(threads), [&](std::size_t ti) {
    const std::size_t i0 = ti * kTile;
    const std::size_t i1 = std::min(n, i0 + kTile);
    for (std::size_t j0 = i0; j0 < n; j0 += kTile) {
      const std::size_t j1 = std::min(n, j0 + kTile);
      for (std::size_t i = i0; i < i1; ++i) {
        const double* a = rows.data() + i * m;
        for (std::size_t j = std::max(j0, i + 1); j < j1; ++j) {
          const double* b = rows.data() + j * m;
          double v = dot(a, b, m) / (norms[i] * norms[j]);
          v = std::clamp(v, -1.0, 1.0);
          s[i * n + j] = v;
          s[j * n + i] = v;
        }
      }
    }
  });
  for (std::size_t i = 0; i < n; ++i) s[i * n + i] = 1.0;
  return SimilarityMatrix(n, metric, std::move(s));
}

}  // namespace

std::string_view to_string(Metric metric) noexcept {
  return metric == Metric::Cosine ? "cosine" : "pearson";
}

Metric parse_metric(std::string_view name) {
  if (name == "cosine") return Metric::Cosine;
  if (name == "pearson") return Metric::Pearson;
  throw ParameterError("metric must be 'cosine' or 'pearson', got '" + std::string(name) + "'");
}

SimilarityMatrix::SimilarityMatrix(std::size_t n, Metric metric, std::vector<double> values)
    : n_(n), metric_(metric), values_(std::move(values)) {
  if (values_.size() != n_ * n_) throw ShapeError("similarity matrix must be N x N");
}

SimilarityMatrix cosine_similarity(const FeatureMatrix& features, std::size_t threads) {
  const std::size_t n = features.n_samples();
  const std::size_t m = features.n_features();
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = features.row(i);
    if (std::sqrt(dot(r.data(), r.data(), m)) < kDegenerateNorm) {
      throw DegenerateVectorError("sample " + std::to_string(i) + " has a zero feature vector", i);
    }
  }
  const auto data = features.data();
  return cosine_rows(std::vector<double>(data.begin(), data.end()), n, m, Metric::Cosine, threads);
}

SimilarityMatrix pearson_similarity(const FeatureMatrix& features, std::size_t threads) {
  const std::size_t n = features.n_samples();
  const std::size_t m = features.n_features();
  std::vector<double> centered(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = features.row(i);
    double sum = 0.0;
    for (double v : r) sum += v;
    const double mean = sum / static_cast<double>(m);
    double ss = 0.0;
    bool constant = true;
    for (std::size_t j = 0; j < m; ++j) {
      const double d = r[j] - mean;
      centered[i * m + j] = d;
      ss += d * d;
      constant = constant && r[j] == r[0];
    }
    if (constant || ss / static_cast<double>(m) < kDegenerateNorm) {
      throw DegenerateVectorError("sample " + std::to_string(i) + " has a constant feature vector",
                                  i);
    }
  }
  return cosine_rows(centered, n, m, Metric::Pearson, threads);
}

SimilarityMatrix similarity(const FeatureMatrix& features, Metric metric, std::size_t threads) {
  return metric == Metric::Cosine ? cosine_similarity(features, threads)
                                  : pearson_similarity(features, threads);
}

}  // namespace modgraph
