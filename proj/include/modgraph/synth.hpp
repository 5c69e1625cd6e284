#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "modgraph/analysis.hpp"
#include "modgraph/tensor_io.hpp"

namespace modgraph {

/// Parameters of a synthetic run of Gaussian class blobs.
///
/// Generation is fully determined by the spec:
///   * one std::mt19937_64 stream seeded with `seed`;
///   * standard normals via Box-Muller on 53-bit uniforms, both outputs used;
///   * K class centres (K x M normals, each row scaled to unit length) are
///     drawn first, then one N x M noise matrix scaled by `noise_sigma`;
///   * sample n has label n mod K;
///   * layer i is centre[label] * separation_schedule[i] + noise.
/// The same noise matrix is reused at every layer, so layers with equal
/// separation are identical.
struct SynthSpec {
  std::size_t n_samples = 500;
  std::size_t n_classes = 10;
  std::size_t n_features = 256;
  std::size_t n_layers = 10;
  std::vector<double> separation_schedule;
  double noise_sigma = 0.5;
  std::uint64_t seed = 0;
};

// `layers` evenly spaced values from `first` to `last` inclusive.
std::vector<double> linear_schedule(std::size_t layers, double first, double last);

void validate(const SynthSpec& spec);

LayerFeatureSet generate(const SynthSpec& spec);

// Schedule held at one value across `plateau` and strictly increasing
// elsewhere, from the spec schedule's first value to its last. Layers inside
// the plateau are flagged repeatable.
LayerFeatureSet generate_plateau_fixture(const SynthSpec& spec, std::optional<Interval> plateau);
std::vector<double> plateau_schedule(std::size_t layers, double first, double last,
                                     std::optional<Interval> plateau);

// Manifest, labels and one tensor file per layer, named as in the manifest.
void write_run(const LayerFeatureSet& run, const std::filesystem::path& dir,
               ElementType type = ElementType::Float64);

}  // namespace modgraph
