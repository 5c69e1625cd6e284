#include "modgraph/graph_builder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "modgraph/errors.hpp"
#include "text_format.hpp"

namespace modgraph {

namespace fs = std::filesystem;

SnapshotGraph SnapshotGraph::from_edges(std::size_t n, std::vector<Edge> edges) {
  for (auto& e : edges) {
    if (e.u >= n || e.v >= n) throw ShapeError("edge endpoint out of range");
    if (e.u == e.v) throw DataError("self-loops are not allowed");
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw DataError("edge weights must be finite and non-negative");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i].u == edges[i - 1].u && edges[i].v == edges[i - 1].v) {
      throw DataError("duplicate edge " + std::to_string(edges[i].u) + "-" +
                      std::to_string(edges[i].v));
    }
  }

  SnapshotGraph g;
  g.n_ = n;
  std::vector<std::size_t> degree(n, 0);
  for (const auto& e : edges) {
    ++degree[e.u];
    ++degree[e.v];
  }
  g.row_ptr_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.row_ptr_[i + 1] = g.row_ptr_[i] + degree[i];
  g.adj_.resize(g.row_ptr_[n]);
  std::vector<std::size_t> fill(g.row_ptr_.begin(), g.row_ptr_.end() - 1);
  for (const auto& e : edges) g.adj_[fill[e.v]++] = {e.u, e.weight};
  for (const auto& e : edges) g.adj_[fill[e.u]++] = {e.v, e.weight};
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(g.adj_.begin() + static_cast<std::ptrdiff_t>(g.row_ptr_[i]),
              g.adj_.begin() + static_cast<std::ptrdiff_t>(g.row_ptr_[i + 1]),
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }
  return g;
}

SnapshotGraph SnapshotGraph::from_dense(std::size_t n, std::span<const double> adjacency) {
  if (adjacency.size() != n * n) throw ShapeError("dense adjacency must be N x N");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    if (adjacency[i * n + i] != 0.0) throw DataError("adjacency diagonal must be zero");
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = adjacency[i * n + j];
      if (w != adjacency[j * n + i]) throw DataError("adjacency is not symmetric");
      if (w != 0.0) edges.push_back({i, j, w});
    }
  }
  return from_edges(n, std::move(edges));
}

double SnapshotGraph::weight(std::size_t i, std::size_t j) const noexcept {
  const auto row = neighbors(i);
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const Neighbor& nb, std::size_t id) { return nb.node < id; });
  return (it != row.end() && it->node == j) ? it->weight : 0.0;
}

double SnapshotGraph::strength(std::size_t i) const noexcept {
  double s = 0.0;
  for (const auto& nb : neighbors(i)) s += nb.weight;
  return s;
}

double SnapshotGraph::total_weight() const noexcept {
  double total = 0.0;
  for (std::size_t i = 0; i < n_; ++i) total += strength(i);
  return total;
}

std::vector<Edge> SnapshotGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (std::size_t i = 0; i < n_; ++i) {
    for (const auto& nb : neighbors(i)) {
      if (nb.node > i) out.push_back({i, nb.node, nb.weight});
    }
  }
  return out;
}

std::vector<double> SnapshotGraph::to_dense() const {
  std::vector<double> dense(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (const auto& nb : neighbors(i)) dense[i * n_ + nb.node] = nb.weight;
  }
  return dense;
}

SnapshotGraph build_knn(const SimilarityMatrix& similarity, std::size_t k,
                        std::size_t layer_index) {
  const std::size_t n = similarity.size();
  if (n < 2 || k < 1 || k > n - 1) {
    throw ParameterError("k must satisfy 1 <= k <= N-1 = " + std::to_string(n == 0 ? 0 : n - 1) +
                         ", got k=" + std::to_string(k));
  }

  std::vector<std::size_t> selected(n * k);
  std::vector<std::size_t> candidates(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = similarity.row(i);
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) candidates[c++] = j;
    }
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                      candidates.end(), [&](std::size_t a, std::size_t b) {
                        return row[a] != row[b] ? row[a] > row[b] : a < b;
                      });
    std::copy_n(candidates.begin(), k, selected.begin() + static_cast<std::ptrdiff_t>(i * k));
  }

  // Directed selections keyed by unordered pair; a pair chosen from both
  // ends appears twice and is merged into one symmetric weight.
  struct Directed {
    std::size_t lo, hi;
    bool from_lo;
  };
  std::vector<Directed> directed;
  directed.reserve(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t j = selected[i * k + r];
      directed.push_back({std::min(i, j), std::max(i, j), i < j});
    }
  }
  std::sort(directed.begin(), directed.end(), [](const Directed& a, const Directed& b) {
    return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
  });

  std::vector<Edge> edges;
  edges.reserve(directed.size());
  std::size_t clamped = 0;
  for (std::size_t p = 0; p < directed.size();) {
    const std::size_t lo = directed[p].lo, hi = directed[p].hi;
    double a_lo_hi = 0.0, a_hi_lo = 0.0;
    for (; p < directed.size() && directed[p].lo == lo && directed[p].hi == hi; ++p) {
      if (directed[p].from_lo) {
        a_lo_hi = similarity(lo, hi);
      } else {
        a_hi_lo = similarity(hi, lo);
      }
    }
    double w = (a_lo_hi + a_hi_lo) / 2.0;
    if (w < 0.0) {
      w = 0.0;
      ++clamped;
    }
    edges.push_back({lo, hi, w});
  }

  SnapshotGraph g = SnapshotGraph::from_edges(n, std::move(edges));
  g.layer_index = layer_index;
  g.k = k;
  g.clamped_edges = clamped;
  g.selected = std::move(selected);
  return g;
}

DynamicGraph build_dynamic_graph(const LayerFeatureSet& run, Metric metric, std::size_t k,
                                 std::size_t threads) {
  DynamicGraph dg{{}, {}, run.labels, metric, k};
  dg.snapshots.reserve(run.n_layers());
  for (std::size_t i = 0; i < run.n_layers(); ++i) {
    const auto& name = run.manifest.layers.at(i).name;
    try {
      const SimilarityMatrix s = similarity(run.layers[i], metric, threads);
      dg.snapshots.push_back(build_knn(s, k, i));
    } catch (const Error& e) {
      rethrow_with_context(e, "layer '" + name + "'");
    }
    dg.layer_names.push_back(name);
  }
  return dg;
}

void write_edge_list(const SnapshotGraph& graph, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "src,dst,weight\n";
  for (const auto& e : graph.edges()) {
    out << e.u << ',' << e.v << ',' << detail::format_exact(e.weight) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_similarity_csv(const SimilarityMatrix& similarity, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const std::size_t n = similarity.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) out << ',';
      out << detail::format_exact(similarity(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace modgraph
