#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace modgraph {

// Element types understood by the .npy reader/writer.
enum class ElementType { Float32, Float64, Int64 };

std::size_t element_size(ElementType type) noexcept;
const char* npy_descr(ElementType type) noexcept;

/// Dense row-major N x M matrix of activations, one row per sample.
///
/// Values are held in double precision whatever the width of the file they
/// came from; `source_type()` remembers that width so a write-back reproduces
/// the original file bit for bit.
class FeatureMatrix {
 public:
  FeatureMatrix(std::size_t n_samples, std::size_t n_features, std::vector<double> data,
                ElementType source_type = ElementType::Float64);

  std::size_t n_samples() const noexcept { return n_samples_; }
  std::size_t n_features() const noexcept { return n_features_; }
  ElementType source_type() const noexcept { return source_type_; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * n_features_, n_features_};
  }
  double at(std::size_t i, std::size_t j) const noexcept { return data_[i * n_features_ + j]; }

  // Rows `indices` in the given order; same source type.
  FeatureMatrix select_rows(std::span<const std::size_t> indices) const;

 private:
  std::size_t n_samples_;
  std::size_t n_features_;
  std::vector<double> data_;
  ElementType source_type_;
};

/// Ground-truth class per sample.
class LabelVector {
 public:
  // n_classes defaults to 1 + max(label); a larger value allows empty classes.
  explicit LabelVector(std::vector<std::int64_t> labels,
                       std::optional<std::size_t> n_classes = std::nullopt);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t n_classes() const noexcept { return n_classes_; }
  std::span<const std::int64_t> labels() const noexcept { return labels_; }
  std::int64_t operator[](std::size_t i) const noexcept { return labels_[i]; }

  LabelVector select(std::span<const std::size_t> indices) const;

 private:
  std::vector<std::int64_t> labels_;
  std::size_t n_classes_;
};

struct LayerEntry {
  std::string name;
  std::string file;  // as written in the manifest (relative to its directory)
  bool repeatable = false;
  std::optional<std::string> stage;
};

struct RunManifest {
  std::string model_name;
  std::string dataset_name;
  std::size_t n_classes = 0;
  std::string labels_file;
  std::vector<LayerEntry> layers;
  std::filesystem::path base_dir;  // directory relative paths resolve against

  std::filesystem::path resolve(const std::string& relative) const;
};

/// One batch of samples pushed through a network: per-layer features sharing
/// one label vector, ordered shallow to deep.
struct LayerFeatureSet {
  RunManifest manifest;
  LabelVector labels;
  std::vector<FeatureMatrix> layers;

  std::size_t n_samples() const noexcept { return labels.size(); }
  std::size_t n_layers() const noexcept { return layers.size(); }
};

// Raw .npy array: dtype, shape and the little-endian C-order payload.
struct NpyArray {
  ElementType dtype = ElementType::Float64;
  std::vector<std::size_t> shape;
  std::vector<std::byte> payload;

  std::size_t element_count() const noexcept;
};

NpyArray read_npy(const std::filesystem::path& path);
void write_npy(const std::filesystem::path& path, const NpyArray& array);

// Rank >= 2 arrays are flattened to (shape[0], prod(shape[1:])) in C order.
FeatureMatrix read_feature_matrix(const std::filesystem::path& path);
void write_feature_matrix(const FeatureMatrix& matrix, const std::filesystem::path& path);
void write_feature_matrix(const FeatureMatrix& matrix, const std::filesystem::path& path,
                          ElementType type);

LabelVector read_labels(const std::filesystem::path& path);
LabelVector read_labels(const std::filesystem::path& path, std::size_t expected_n);
void write_labels(const LabelVector& labels, const std::filesystem::path& path);

RunManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

LayerFeatureSet load_run(const std::filesystem::path& manifest_path);

}  // namespace modgraph
