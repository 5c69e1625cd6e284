#include "modgraph/synth.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "modgraph/errors.hpp"

namespace modgraph {

namespace fs = std::filesystem;

namespace {

class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    return r * std::cos(theta);
  }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

std::string layer_name(std::size_t i, std::size_t layers) {
  const std::size_t width = std::max<std::size_t>(2, std::to_string(layers - 1).size());
  std::string digits = std::to_string(i);
  return "layer_" + std::string(width - digits.size(), '0') + digits;
}

}  // namespace

std::vector<double> linear_schedule(std::size_t layers, double first, double last) {
  std::vector<double> s(layers);
  for (std::size_t i = 0; i < layers; ++i) {
    s[i] = layers == 1 ? last
                       : first + (last - first) * static_cast<double>(i) /
                                     static_cast<double>(layers - 1);
  }
  return s;
}

void validate(const SynthSpec& spec) {
  if (spec.n_classes < 2) throw ParameterError("synthetic runs need at least 2 classes");
  if (spec.n_samples < spec.n_classes) {
    throw ParameterError("n_samples (" + std::to_string(spec.n_samples) +
                         ") must be at least n_classes (" + std::to_string(spec.n_classes) + ")");
  }
  if (spec.n_features < 1) throw ParameterError("n_features must be positive");
  if (spec.n_layers < 1) throw ParameterError("n_layers must be positive");
  if (spec.separation_schedule.size() != spec.n_layers) {
    throw ParameterError("separation schedule has " +
                         std::to_string(spec.separation_schedule.size()) + " entries for " +
                         std::to_string(spec.n_layers) + " layers");
  }
  for (double s : spec.separation_schedule) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw ParameterError("separation values must be finite and non-negative");
    }
  }
  if (!(spec.noise_sigma > 0.0) || !std::isfinite(spec.noise_sigma)) {
    throw ParameterError("noise_sigma must be positive");
  }
}

LayerFeatureSet generate(const SynthSpec& spec) {
  validate(spec);
  const std::size_t n = spec.n_samples, m = spec.n_features, k = spec.n_classes;
  NormalStream rng(spec.seed);

  std::vector<double> centers(k * m);
  for (std::size_t c = 0; c < k; ++c) {
    double norm2 = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double v = rng.next();
      centers[c * m + j] = v;
      norm2 += v * v;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t j = 0; j < m; ++j) centers[c * m + j] *= inv;
  }
  std::vector<double> noise(n * m);
  for (double& v : noise) v = spec.noise_sigma * rng.next();

  std::vector<std::int64_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::int64_t>(i % k);

  RunManifest manifest;
  manifest.model_name = "synthetic";
  manifest.dataset_name = "gaussian-blobs";
  manifest.n_classes = k;
  manifest.labels_file = "labels.npy";

  std::vector<FeatureMatrix> layers;
  layers.reserve(spec.n_layers);
  for (std::size_t l = 0; l < spec.n_layers; ++l) {
    const double s = spec.separation_schedule[l];
    std::vector<double> data(n * m);
    for (std::size_t i = 0; i < n; ++i) {
      const double* center = centers.data() + (i % k) * m;
      for (std::size_t j = 0; j < m; ++j) data[i * m + j] = center[j] * s + noise[i * m + j];
    }
    layers.emplace_back(n, m, std::move(data));
    const std::string name = layer_name(l, spec.n_layers);
    manifest.layers.push_back({name, name + ".npy", false, std::nullopt});
  }
  return LayerFeatureSet{std::move(manifest), LabelVector(std::move(labels), k), std::move(layers)};
}

std::vector<double> plateau_schedule(std::size_t layers, double first, double last,
                                     std::optional<Interval> plateau) {
  if (layers < 1) throw ParameterError("n_layers must be positive");
  std::size_t held = 0;
  if (plateau) {
    if (plateau->start >= plateau->end || plateau->end >= layers) {
      throw ParameterError("plateau range [" + std::to_string(plateau->start) + ", " +
                           std::to_string(plateau->end) + "] must satisfy start < end <= " +
                           std::to_string(layers - 1));
    }
    held = plateau->end - plateau->start;
  }
  const std::size_t steps = layers - 1 - held;
  if (steps > 0 && !(last > first)) {
    throw ParameterError("plateau fixtures need an increasing schedule (last > first)");
  }
  std::vector<double> s(layers);
  std::size_t rank = 0;
  for (std::size_t i = 0; i < layers; ++i) {
    if (i > 0 && !(plateau && i > plateau->start && i <= plateau->end)) ++rank;
    s[i] = steps == 0 ? last
                      : first + (last - first) * static_cast<double>(rank) /
                                    static_cast<double>(steps);
  }
  return s;
}

LayerFeatureSet generate_plateau_fixture(const SynthSpec& spec, std::optional<Interval> plateau) {
  if (spec.separation_schedule.empty()) throw ParameterError("separation schedule is empty");
  SynthSpec fixture = spec;
  fixture.separation_schedule =
      plateau_schedule(spec.n_layers, spec.separation_schedule.front(),
                       spec.separation_schedule.back(), plateau);
  LayerFeatureSet run = generate(fixture);
  if (plateau) {
    for (std::size_t l = plateau->start; l <= plateau->end; ++l) {
      run.manifest.layers[l].repeatable = true;
    }
  }
  return run;
}

void write_run(const LayerFeatureSet& run, const fs::path& dir, ElementType type) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
  write_labels(run.labels, dir / run.manifest.labels_file);
  for (std::size_t l = 0; l < run.n_layers(); ++l) {
    write_feature_matrix(run.layers[l], dir / run.manifest.layers[l].file, type);
  }
  write_manifest(run.manifest, dir / "manifest.json");
}

}  // namespace modgraph
