#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "modgraph/graph_builder.hpp"
#include "modgraph/tensor_io.hpp"

namespace modgraph {

/// Node -> community assignment. Ground-truth partitions come straight from
/// the label vector.
class Partition {
 public:
  // Community ids in [0, n_communities). A single community is allowed here;
  // label-derived partitions always have at least two.
  Partition(std::vector<std::size_t> community_of, std::size_t n_communities);
  static Partition from_labels(const LabelVector& labels);

  std::size_t size() const noexcept { return community_of_.size(); }
  std::size_t n_communities() const noexcept { return n_communities_; }
  std::size_t operator[](std::size_t i) const noexcept { return community_of_[i]; }
  std::span<const std::size_t> assignment() const noexcept { return community_of_; }

 private:
  std::vector<std::size_t> community_of_;
  std::size_t n_communities_;
};

struct ModularityValue {
  double q = 0.0;
  double total_weight_2w = 0.0;                 // sum over i, j of a_ij
  std::vector<double> per_community_internal;   // sum of a_ij with both ends in c
  std::vector<double> per_community_strength;   // sum of s_i over i in c
};

// Community-aggregated evaluation, O(E + N).
ModularityValue modularity(const SnapshotGraph& graph, const Partition& partition);

inline constexpr std::size_t kBruteForceMaxNodes = 512;

// Literal double loop over all ordered node pairs. Reference only.
ModularityValue modularity_bruteforce(const SnapshotGraph& graph, const Partition& partition);

/// Per-layer modularity values, shallow to deep.
struct ModularityCurve {
  std::vector<double> values;
  std::vector<std::string> layer_names;

  std::size_t size() const noexcept { return values.size(); }
};

ModularityCurve modularity_curve(const DynamicGraph& dg);

}  // namespace modgraph
