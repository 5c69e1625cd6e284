#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "modgraph/tensor_io.hpp"

namespace modgraph {

enum class Metric { Cosine, Pearson };

std::string_view to_string(Metric metric) noexcept;
// Accepts "cosine" or "pearson"; anything else is a ParameterError.
Metric parse_metric(std::string_view name);

/// Symmetric N x N matrix of pairwise sample similarities.
class SimilarityMatrix {
 public:
  SimilarityMatrix(std::size_t n, Metric metric, std::vector<double> values);

  std::size_t size() const noexcept { return n_; }
  Metric metric() const noexcept { return metric_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const noexcept { return {values_.data() + i * n_, n_}; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::size_t n_;
  Metric metric_;
  std::vector<double> values_;
};

// Rows with l2 norm below this are rejected as degenerate.
inline constexpr double kDegenerateNorm = 1e-30;

// threads == 0 picks the default worker count. Results are bitwise identical
// for every thread count.
SimilarityMatrix cosine_similarity(const FeatureMatrix& features, std::size_t threads = 1);
SimilarityMatrix pearson_similarity(const FeatureMatrix& features, std::size_t threads = 1);
SimilarityMatrix similarity(const FeatureMatrix& features, Metric metric, std::size_t threads = 1);

}  // namespace modgraph
