#include "modgraph/modularity.hpp"

#include <algorithm>

#include "modgraph/errors.hpp"

namespace modgraph {

namespace {

void check_inputs(const SnapshotGraph& graph, const Partition& partition) {
  if (partition.size() != graph.size()) {
    throw ShapeError("partition covers " + std::to_string(partition.size()) +
                     " nodes but the graph has " + std::to_string(graph.size()));
  }
}

}  // namespace

Partition::Partition(std::vector<std::size_t> community_of, std::size_t n_communities)
    : community_of_(std::move(community_of)), n_communities_(n_communities) {
  if (n_communities_ == 0) throw ParameterError("a partition needs at least one community");
  for (std::size_t c : community_of_) {
    if (c >= n_communities_) {
      throw DataError("community id " + std::to_string(c) + " out of range for " +
                      std::to_string(n_communities_) + " communities");
    }
  }
}

Partition Partition::from_labels(const LabelVector& labels) {
  std::vector<std::size_t> ids(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) ids[i] = static_cast<std::size_t>(labels[i]);
  return Partition(std::move(ids), labels.n_classes());
}

ModularityValue modularity(const SnapshotGraph& graph, const Partition& partition) {
  check_inputs(graph, partition);
  ModularityValue r;
  r.per_community_internal.assign(partition.n_communities(), 0.0);
  r.per_community_strength.assign(partition.n_communities(), 0.0);
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const std::size_t ci = partition[i];
    double s = 0.0;
    double internal = 0.0;
    for (const auto& nb : graph.neighbors(i)) {
      s += nb.weight;
      if (partition[nb.node] == ci) internal += nb.weight;
    }
    r.per_community_strength[ci] += s;
    r.per_community_internal[ci] += internal;
    r.total_weight_2w += s;
  }
  if (!(r.total_weight_2w > 0.0)) throw EmptyGraphError("graph has no positive edge weight");

  const double two_w = r.total_weight_2w;
  for (std::size_t c = 0; c < partition.n_communities(); ++c) {
    const double a = r.per_community_strength[c] / two_w;
    r.q += r.per_community_internal[c] / two_w - a * a;
  }
  return r;
}

ModularityValue modularity_bruteforce(const SnapshotGraph& graph, const Partition& partition) {
  const std::size_t n = graph.size();
  if (n > kBruteForceMaxNodes) {
    throw ParameterError("brute-force modularity is limited to N <= " +
                         std::to_string(kBruteForceMaxNodes) + ", got N=" + std::to_string(n));
  }
  check_inputs(graph, partition);
  const std::vector<double> a = graph.to_dense();

  std::vector<double> s(n, 0.0);
  double two_w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      s[i] += a[i * n + j];
      two_w += a[i * n + j];
    }
  }
  if (!(two_w > 0.0)) throw EmptyGraphError("graph has no positive edge weight");

  ModularityValue r;
  r.total_weight_2w = two_w;
  r.per_community_internal.assign(partition.n_communities(), 0.0);
  r.per_community_strength.assign(partition.n_communities(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r.per_community_strength[partition[i]] += s[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (partition[i] != partition[j]) continue;
      sum += a[i * n + j] - s[i] * s[j] / two_w;
      r.per_community_internal[partition[i]] += a[i * n + j];
    }
  }
  r.q = sum / two_w;
  return r;
}

ModularityCurve modularity_curve(const DynamicGraph& dg) {
  const Partition partition = Partition::from_labels(dg.labels);
  ModularityCurve curve;
  curve.values.reserve(dg.snapshots.size());
  for (std::size_t i = 0; i < dg.snapshots.size(); ++i) {
    const std::string name = i < dg.layer_names.size() ? dg.layer_names[i] : std::to_string(i);
    try {
      curve.values.push_back(modularity(dg.snapshots[i], partition).q);
    } catch (const Error& e) {
      rethrow_with_context(e, "layer '" + name + "'");
    }
    curve.layer_names.push_back(name);
  }
  return curve;
}

}  // namespace modgraph
