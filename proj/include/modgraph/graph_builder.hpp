#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "modgraph/similarity.hpp"
#include "modgraph/tensor_io.hpp"

namespace modgraph {

struct Edge {
  std::size_t u;
  std::size_t v;
  double weight;
};

struct Neighbor {
  std::size_t node;
  double weight;
};

/// Weighted undirected graph over N samples, stored as symmetric CSR.
///
/// Both directions of every edge hold the same double, so a(i, j) == a(j, i)
/// holds exactly. Edges may carry weight zero (negative similarities clamped
/// during k-NN construction stay in the edge set).
class SnapshotGraph {
 public:
  SnapshotGraph() = default;

  // Undirected edges with u != v and weight >= 0; each unordered pair at most once.
  static SnapshotGraph from_edges(std::size_t n, std::vector<Edge> edges);
  // Row-major N x N adjacency; must be symmetric with zero diagonal. Zero
  // entries are not edges.
  static SnapshotGraph from_dense(std::size_t n, std::span<const double> adjacency);

  std::size_t size() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return adj_.size() / 2; }
  std::span<const Neighbor> neighbors(std::size_t i) const noexcept {
    return {adj_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  double weight(std::size_t i, std::size_t j) const noexcept;
  double strength(std::size_t i) const noexcept;
  double total_weight() const noexcept;  // sum over i, j of a(i, j)

  // Unordered edges with u < v, sorted lexicographically.
  std::vector<Edge> edges() const;
  std::vector<double> to_dense() const;

  // k-NN construction metadata; zero/empty for graphs built directly.
  std::size_t layer_index = 0;
  std::size_t k = 0;
  std::size_t clamped_edges = 0;
  // Out-neighbours chosen per node before symmetrization, row-major N x k,
  // in rank order.
  std::vector<std::size_t> selected;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Neighbor> adj_;
};

struct DynamicGraph {
  std::vector<SnapshotGraph> snapshots;
  std::vector<std::string> layer_names;
  LabelVector labels;
  Metric metric = Metric::Cosine;
  std::size_t k = 0;
};

// Top-k neighbours per node (self excluded, ties to the smaller index), then
// (A + A^T) / 2 with negative weights clamped to zero.
SnapshotGraph build_knn(const SimilarityMatrix& similarity, std::size_t k,
                        std::size_t layer_index = 0);

DynamicGraph build_dynamic_graph(const LayerFeatureSet& run, Metric metric, std::size_t k,
                                 std::size_t threads = 1);

// CSV `src,dst,weight`, src < dst, sorted.
void write_edge_list(const SnapshotGraph& graph, const std::filesystem::path& path);
// N x N CSV of similarity values, no header.
void write_similarity_csv(const SimilarityMatrix& similarity, const std::filesystem::path& path);

}  // namespace modgraph
