#include "modgraph/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "modgraph/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "npy payloads are read in place; big-endian hosts need byte swapping");

namespace modgraph {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;
constexpr std::size_t kAlignment = 64;

// Minimal reader for the Python dict literal that forms an npy header.
class HeaderParser {
 public:
  explicit HeaderParser(std::string_view text) : text_(text) {}

  struct Result {
    std::optional<std::string> descr;
    std::optional<bool> fortran_order;
    std::optional<std::vector<std::size_t>> shape;
  };

  Result parse() {
    Result r;
    expect('{');
    while (true) {
      skip_ws();
      if (peek() == '}') {
        ++pos_;
        break;
      }
      std::string key = parse_string();
      expect(':');
      skip_ws();
      if (key == "descr") {
        r.descr = parse_string();
      } else if (key == "fortran_order") {
        r.fortran_order = parse_bool();
      } else if (key == "shape") {
        r.shape = parse_tuple();
      } else {
        fail("unknown header key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != '}') {
        fail("expected ',' or '}'");
      }
    }
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("malformed npy header (" + what + ") in: " + std::string(text_));
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string parse_string() {
    skip_ws();
    const char quote = peek();
    if (quote != '\'' && quote != '"') fail("expected string");
    const auto end = text_.find(quote, pos_ + 1);
    if (end == std::string_view::npos) fail("unterminated string");
    std::string s(text_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end + 1;
    return s;
  }
  bool parse_bool() {
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    fail("expected True or False");
  }
  std::vector<std::size_t> parse_tuple() {
    expect('(');
    std::vector<std::size_t> dims;
    while (true) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        return dims;
      }
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected dimension");
      std::size_t v = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        v = v * 10 + static_cast<std::size_t>(peek() - '0');
        ++pos_;
      }
      dims.push_back(v);
      skip_ws();
      if (peek() == ',') ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

ElementType parse_descr(const std::string& descr) {
  if (descr == "<f4") return ElementType::Float32;
  if (descr == "<f8") return ElementType::Float64;
  if (descr == "<i8") return ElementType::Int64;
  throw FormatError("unsupported npy dtype '" + descr + "' (expected <f4, <f8 or <i8)");
}

std::string format_header(const NpyArray& array) {
  std::string dict = "{'descr': '";
  dict += npy_descr(array.dtype);
  dict += "', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < array.shape.size(); ++i) {
    if (i) dict += ", ";
    dict += std::to_string(array.shape[i]);
  }
  if (array.shape.size() == 1) dict += ",";
  dict += "), }";
  return dict;
}

template <typename T>
void copy_out(const std::vector<std::byte>& payload, std::vector<double>& out) {
  const std::size_t n = payload.size() / sizeof(T);
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    T v;
    std::memcpy(&v, payload.data() + i * sizeof(T), sizeof(T));
    out[i] = static_cast<double>(v);
  }
}

}  // namespace

std::size_t element_size(ElementType type) noexcept {
  return type == ElementType::Float32 ? 4 : 8;
}

const char* npy_descr(ElementType type) noexcept {
  switch (type) {
    case ElementType::Float32: return "<f4";
    case ElementType::Float64: return "<f8";
    case ElementType::Int64: return "<i8";
  }
  return "<f8";
}

std::size_t NpyArray::element_count() const noexcept {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

FeatureMatrix::FeatureMatrix(std::size_t n_samples, std::size_t n_features,
                             std::vector<double> data, ElementType source_type)
    : n_samples_(n_samples),
      n_features_(n_features),
      data_(std::move(data)),
      source_type_(source_type) {
  if (n_samples_ < 2) {
    throw ShapeError("feature matrix needs at least 2 samples, got " + std::to_string(n_samples_));
  }
  if (n_features_ < 1) throw ShapeError("feature matrix needs at least 1 feature");
  if (data_.size() != n_samples_ * n_features_) {
    throw ShapeError("feature data has " + std::to_string(data_.size()) + " values, expected " +
                     std::to_string(n_samples_) + " x " + std::to_string(n_features_));
  }
  if (source_type_ == ElementType::Int64) {
    throw FormatError("feature matrices must be floating point");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw DataError("non-finite feature value at sample " + std::to_string(i / n_features_) +
                      ", feature " + std::to_string(i % n_features_));
    }
  }
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
  std::vector<double> out;
  out.reserve(indices.size() * n_features_);
  for (std::size_t idx : indices) {
    if (idx >= n_samples_) throw ShapeError("row index " + std::to_string(idx) + " out of range");
    auto r = row(idx);
    out.insert(out.end(), r.begin(), r.end());
  }
  return FeatureMatrix(indices.size(), n_features_, std::move(out), source_type_);
}

LabelVector::LabelVector(std::vector<std::int64_t> labels, std::optional<std::size_t> n_classes)
    : labels_(std::move(labels)) {
  if (labels_.empty()) throw ShapeError("label vector is empty");
  std::int64_t max_label = 0;
  std::set<std::int64_t> distinct;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0) {
      throw DataError("negative label " + std::to_string(labels_[i]) + " at sample " +
                      std::to_string(i));
    }
    max_label = std::max(max_label, labels_[i]);
    distinct.insert(labels_[i]);
  }
  if (distinct.size() < 2) {
    throw DataError("labels must contain at least 2 distinct classes, found " +
                    std::to_string(distinct.size()));
  }
  const auto implied = static_cast<std::size_t>(max_label) + 1;
  n_classes_ = n_classes.value_or(implied);
  if (n_classes_ < implied) {
    throw DataError("label " + std::to_string(max_label) + " is out of range for " +
                    std::to_string(n_classes_) + " classes");
  }
}

LabelVector LabelVector::select(std::span<const std::size_t> indices) const {
  std::vector<std::int64_t> out;
  out.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= labels_.size()) throw ShapeError("label index out of range");
    out.push_back(labels_[idx]);
  }
  return LabelVector(std::move(out), n_classes_);
}

fs::path RunManifest::resolve(const std::string& relative) const {
  fs::path p(relative);
  return p.is_absolute() ? p : base_dir / p;
}

NpyArray read_npy(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  const auto where = " in '" + path.string() + "'";
  if (bytes.size() < kMagicLen + 4 || std::memcmp(bytes.data(), kMagic, kMagicLen) != 0) {
    throw FormatError("missing npy magic" + where);
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t offset = 0;
  auto byte_at = [&](std::size_t i) { return static_cast<std::size_t>(static_cast<unsigned char>(bytes[i])); };
  if (major == 1) {
    header_len = byte_at(8) | (byte_at(9) << 8);
    offset = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) throw FormatError("truncated npy header" + where);
    header_len = byte_at(8) | (byte_at(9) << 8) | (byte_at(10) << 16) | (byte_at(11) << 24);
    offset = 12;
  } else {
    throw FormatError("unsupported npy version " + std::to_string(major) + where);
  }
  if (bytes.size() < offset + header_len) throw FormatError("truncated npy header" + where);

  std::string_view header(bytes.data() + offset, header_len);
  HeaderParser::Result h;
  try {
    h = HeaderParser(header).parse();
  } catch (const FormatError& e) {
    throw FormatError(std::string(e.what()) + where);
  }
  if (!h.descr || !h.fortran_order || !h.shape) {
    throw FormatError("npy header lacks descr, fortran_order or shape" + where);
  }
  if (*h.fortran_order) throw FormatError("fortran_order arrays are not supported" + where);

  NpyArray array;
  try {
    array.dtype = parse_descr(*h.descr);
  } catch (const FormatError& e) {
    throw FormatError(std::string(e.what()) + where);
  }
  array.shape = std::move(*h.shape);
  const std::size_t expected = array.element_count() * element_size(array.dtype);
  const std::size_t available = bytes.size() - offset - header_len;
  if (available != expected) {
    throw FormatError("payload holds " + std::to_string(available) + " bytes, shape needs " +
                      std::to_string(expected) + where);
  }
  array.payload.resize(expected);
  std::memcpy(array.payload.data(), bytes.data() + offset + header_len, expected);
  return array;
}

void write_npy(const fs::path& path, const NpyArray& array) {
  std::string header = format_header(array);
  // magic + version + 2-byte length, then header padded so the payload is aligned.
  std::size_t prefix = kMagicLen + 2 + 2;
  std::size_t total = prefix + header.size() + 1;
  bool v2 = false;
  std::size_t padded = (total + kAlignment - 1) / kAlignment * kAlignment;
  if (padded - prefix > 0xFFFF) {
    v2 = true;
    prefix += 2;
    total = prefix + header.size() + 1;
    padded = (total + kAlignment - 1) / kAlignment * kAlignment;
  }
  header.append(padded - total, ' ');
  header.push_back('\n');

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(kMagic, kMagicLen);
  const char version[2] = {static_cast<char>(v2 ? 2 : 1), 0};
  out.write(version, 2);
  const std::size_t len = header.size();
  if (v2) {
    const char l[4] = {static_cast<char>(len & 0xFF), static_cast<char>((len >> 8) & 0xFF),
                       static_cast<char>((len >> 16) & 0xFF), static_cast<char>((len >> 24) & 0xFF)};
    out.write(l, 4);
  } else {
    const char l[2] = {static_cast<char>(len & 0xFF), static_cast<char>((len >> 8) & 0xFF)};
    out.write(l, 2);
  }
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(array.payload.data()),
            static_cast<std::streamsize>(array.payload.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

FeatureMatrix read_feature_matrix(const fs::path& path) {
  NpyArray array = read_npy(path);
  const auto where = " in '" + path.string() + "'";
  if (array.shape.size() < 2) {
    throw ShapeError("feature tensor must have rank >= 2, got rank " +
                     std::to_string(array.shape.size()) + where);
  }
  if (array.dtype == ElementType::Int64) {
    throw FormatError("feature tensor must be <f4 or <f8" + where);
  }
  const std::size_t n = array.shape[0];
  const std::size_t m = array.element_count() / std::max<std::size_t>(n, 1);
  std::vector<double> values;
  if (array.dtype == ElementType::Float32) {
    copy_out<float>(array.payload, values);
  } else {
    copy_out<double>(array.payload, values);
  }
  try {
    return FeatureMatrix(n, n == 0 ? 0 : m, std::move(values), array.dtype);
  } catch (const Error& e) {
    rethrow_with_context(e, path.string());
  }
}

void write_feature_matrix(const FeatureMatrix& matrix, const fs::path& path) {
  write_feature_matrix(matrix, path, matrix.source_type());
}

void write_feature_matrix(const FeatureMatrix& matrix, const fs::path& path, ElementType type) {
  if (type == ElementType::Int64) throw ParameterError("features cannot be written as <i8");
  NpyArray array;
  array.dtype = type;
  array.shape = {matrix.n_samples(), matrix.n_features()};
  const auto values = matrix.data();
  array.payload.resize(values.size() * element_size(type));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (type == ElementType::Float32) {
      const auto v = static_cast<float>(values[i]);
      std::memcpy(array.payload.data() + i * 4, &v, 4);
    } else {
      std::memcpy(array.payload.data() + i * 8, &values[i], 8);
    }
  }
  write_npy(path, array);
}

LabelVector read_labels(const fs::path& path) {
  NpyArray array = read_npy(path);
  const auto where = " in '" + path.string() + "'";
  if (array.dtype != ElementType::Int64) throw FormatError("labels must be stored as <i8" + where);
  if (array.shape.size() != 1) throw ShapeError("labels must be a rank-1 array" + where);
  std::vector<std::int64_t> labels(array.shape[0]);
  std::memcpy(labels.data(), array.payload.data(), array.payload.size());
  try {
    return LabelVector(std::move(labels));
  } catch (const Error& e) {
    rethrow_with_context(e, path.string());
  }
}

LabelVector read_labels(const fs::path& path, std::size_t expected_n) {
  if (expected_n == 0) throw ParameterError("expected_n must be positive");
  LabelVector labels = read_labels(path);
  if (labels.size() != expected_n) {
    throw ShapeError("'" + path.string() + "' holds " + std::to_string(labels.size()) +
                     " labels, expected " + std::to_string(expected_n));
  }
  return labels;
}

void write_labels(const LabelVector& labels, const fs::path& path) {
  NpyArray array;
  array.dtype = ElementType::Int64;
  array.shape = {labels.size()};
  array.payload.resize(labels.size() * 8);
  std::memcpy(array.payload.data(), labels.labels().data(), array.payload.size());
  write_npy(path, array);
}

RunManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest '" + path.string() + "' is not valid JSON: " + e.what());
  }

  RunManifest m;
  m.base_dir = fs::absolute(path).parent_path();
  try {
    m.model_name = doc.at("model").get<std::string>();
    m.dataset_name = doc.at("dataset").get<std::string>();
    const auto k = doc.at("num_classes").get<std::int64_t>();
    if (k < 2) throw FormatError("num_classes must be at least 2");
    m.n_classes = static_cast<std::size_t>(k);
    m.labels_file = doc.at("labels_file").get<std::string>();
    std::unordered_set<std::string> names;
    for (const auto& entry : doc.at("layers")) {
      LayerEntry layer;
      layer.name = entry.at("name").get<std::string>();
      layer.file = entry.at("file").get<std::string>();
      layer.repeatable = entry.value("repeatable", false);
      if (entry.contains("stage") && !entry["stage"].is_null()) {
        layer.stage = entry["stage"].get<std::string>();
      }
      if (!names.insert(layer.name).second) {
        throw FormatError("duplicate layer name '" + layer.name + "'");
      }
      m.layers.push_back(std::move(layer));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest '" + path.string() + "': " + e.what());
  } catch (const FormatError& e) {
    throw FormatError("manifest '" + path.string() + "': " + e.what());
  }
  if (m.layers.empty()) throw FormatError("manifest '" + path.string() + "' lists no layers");
  return m;
}

void write_manifest(const RunManifest& manifest, const fs::path& path) {
  nlohmann::ordered_json doc;
  doc["model"] = manifest.model_name;
  doc["dataset"] = manifest.dataset_name;
  doc["num_classes"] = manifest.n_classes;
  doc["labels_file"] = manifest.labels_file;
  doc["layers"] = nlohmann::ordered_json::array();
  for (const auto& layer : manifest.layers) {
    nlohmann::ordered_json e;
    e["name"] = layer.name;
    e["file"] = layer.file;
    e["repeatable"] = layer.repeatable;
    if (layer.stage) e["stage"] = *layer.stage;
    doc["layers"].push_back(std::move(e));
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

LayerFeatureSet load_run(const fs::path& manifest_path) {
  RunManifest manifest = read_manifest(manifest_path);
  LabelVector raw = read_labels(manifest.resolve(manifest.labels_file));
  std::vector<std::int64_t> copy(raw.labels().begin(), raw.labels().end());
  LabelVector labels = [&] {
    try {
      return LabelVector(std::move(copy), manifest.n_classes);
    } catch (const Error& e) {
      rethrow_with_context(e, "labels '" + manifest.labels_file + "'");
    }
  }();

  std::vector<FeatureMatrix> layers;
  layers.reserve(manifest.layers.size());
  for (const auto& entry : manifest.layers) {
    try {
      FeatureMatrix f = read_feature_matrix(manifest.resolve(entry.file));
      if (f.n_samples() != labels.size()) {
        throw ShapeError("has " + std::to_string(f.n_samples()) + " samples but the run has " +
                         std::to_string(labels.size()) + " labels");
      }
      layers.push_back(std::move(f));
    } catch (const Error& e) {
      rethrow_with_context(e, "layer '" + entry.name + "'");
    }
  }
  return LayerFeatureSet{std::move(manifest), std::move(labels), std::move(layers)};
}

}  // namespace modgraph
