#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "catch_amalgamated.hpp"
#include "modgraph/errors.hpp"
#include "modgraph/tensor_io.hpp"
#include "test_support.hpp"

using namespace modgraph;
namespace fs = std::filesystem;

namespace {

// Hand-built .npy v1.0 file: magic, version, header padded so the payload
// starts on a 64-byte boundary.
std::string npy_bytes(const std::string& dict, const std::string& payload) {
  std::string header = dict;
  const std::size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header += '\n';
  std::string out("\x93NUMPY\x01\x00", 8);
  out += static_cast<char>(header.size() & 0xff);
  out += static_cast<char>(header.size() >> 8);
  return out + header + payload;
}

template <typename T>
std::string raw(const std::vector<T>& values) {
  std::string out(values.size() * sizeof(T), '\0');
  std::memcpy(out.data(), values.data(), out.size());
  return out;
}

FeatureMatrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::normal_distribution<double> dist(0.0, 3.0);
  std::vector<double> v(n * m);
  for (auto& x : v) x = dist(rng);
  return FeatureMatrix(n, m, std::move(v));
}

}  // namespace

TEST_CASE("npy header layout matches the reference writer", "[tensor_io]") {
  const auto dir = testsupport::scratch_dir("npy_header");
  write_feature_matrix(FeatureMatrix(2, 3, {1, 2, 3, 4, 5, 6}), dir / "a.npy");
  const std::string expected =
      npy_bytes("{'descr': '<f8', 'fortran_order': False, 'shape': (2, 3), }",
                raw(std::vector<double>{1, 2, 3, 4, 5, 6}));
  const std::string got = testsupport::slurp(dir / "a.npy");
  CHECK(got.size() == 128 + 48);
  CHECK(got == expected);

  write_labels(LabelVector({0, 1, 0, 1}), dir / "l.npy");
  CHECK(testsupport::slurp(dir / "l.npy") ==
        npy_bytes("{'descr': '<i8', 'fortran_order': False, 'shape': (4,), }",
                  raw(std::vector<std::int64_t>{0, 1, 0, 1})));
}

TEST_CASE("read_feature_matrix returns exact values", "[tensor_io]") {
  const auto dir = testsupport::scratch_dir("npy_read");
  testsupport::spit(dir / "m.npy",
                    npy_bytes("{'descr': '<f8', 'fortran_order': False, 'shape': (2, 3), }",
                              raw(std::vector<double>{1, 2, 3, 4, 5, 6})));
  const FeatureMatrix m = read_feature_matrix(dir / "m.npy");
  REQUIRE(m.n_samples() == 2);
  REQUIRE(m.n_features() == 3);
  CHECK(m.at(0, 0) == 1.0);
  CHECK(m.at(0, 2) == 3.0);
  CHECK(m.at(1, 0) == 4.0);
  CHECK(m.at(1, 2) == 6.0);
  CHECK(m.source_type() == ElementType::Float64);
}

TEST_CASE("rank-4 tensors flatten channel-major", "[tensor_io]") {
  const auto dir = testsupport::scratch_dir("npy_rank4");
  const std::size_t N = 2, C = 3, W = 2, H = 2;
  std::vector<float> values(N * C * W * H);
  auto encode = [](std::size_t n, std::size_t c, std::size_t w, std::size_t h) {
    return static_cast<float>(1000 * n + 100 * c + 10 * w + h);
  };
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t w = 0; w < W; ++w)
        for (std::size_t h = 0; h < H; ++h)
          values[((n * C + c) * W + w) * H + h] = encode(n, c, w, h);
  testsupport::spit(dir / "t.npy",
                    npy_bytes("{'descr': '<f4', 'fortran_order': False, 'shape': (2, 3, 2, 2), }",
                              raw(values)));
  const FeatureMatrix m = read_feature_matrix(dir / "t.npy");
  REQUIRE(m.n_samples() == 2);
  REQUIRE(m.n_features() == 12);
  CHECK(m.source_type() == ElementType::Float32);
  std::vector<bool> seen(12, false);
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t w = 0; w < W; ++w)
        for (std::size_t h = 0; h < H; ++h) {
          const std::size_t col = c * W * H + w * H + h;
          REQUIRE(col < 12);
          if (n == 0) {
            CHECK_FALSE(seen[col]);
            seen[col] = true;
          }
          CHECK(m.at(n, col) == encode(n, c, w, h));
        }
}

TEST_CASE("feature matrix errors", "[tensor_io]") {
  const auto dir = testsupport::scratch_dir("npy_errors");
  const std::string f8 = "{'descr': '<f8', 'fortran_order': False, 'shape': (2, 2), }";

  SECTION("NaN entry is a DataError") {
    testsupport::spit(dir / "nan.npy",
                      npy_bytes(f8, raw(std::vector<double>{1, std::nan(""), 3, 4})));
    CHECK_THROWS_AS(read_feature_matrix(dir / "nan.npy"), DataError);
  }
  SECTION("infinity is a DataError") {
    testsupport::spit(dir / "inf.npy",
                      npy_bytes(f8, raw(std::vector<double>{
                                        1, std::numeric_limits<double>::infinity(), 3, 4})));
    CHECK_THROWS_AS(read_feature_matrix(dir / "inf.npy"), DataError);
  }
  SECTION("rank 1 is a ShapeError") {
    testsupport::spit(dir / "r1.npy",
                      npy_bytes("{'descr': '<f8', 'fortran_order': False, 'shape': (4,), }",
                                raw(std::vector<double>{1, 2, 3, 4})));
    CHECK_THROWS_AS(read_feature_matrix(dir / "r1.npy"), ShapeError);
  }
  SECTION("bad magic is a FormatError") {
    testsupport::spit(dir / "magic.npy", "not an npy file at all, just text padding it out");
    CHECK_THROWS_AS(read_feature_matrix(dir / "magic.npy"), FormatError);
  }
  SECTION("malformed header is a FormatError") {
    testsupport::spit(dir / "hdr.npy",
                      npy_bytes("{'descr': '<f8', 'fortran_order': False, 'shape': (2, 2 }",
                                raw(std::vector<double>{1, 2, 3, 4})));
    CHECK_THROWS_AS(read_feature_matrix(dir / "hdr.npy"), FormatError);
  }
  SECTION("fortran order is a FormatError") {
    testsupport::spit(dir / "f.npy",
                      npy_bytes("{'descr': '<f8', 'fortran_order': True, 'shape': (2, 2), }",
                                raw(std::vector<double>{1, 2, 3, 4})));
    CHECK_THROWS_AS(read_feature_matrix(dir / "f.npy"), FormatError);
  }
  SECTION("unsupported dtype is a FormatError") {
    testsupport::spit(dir / "i4.npy",
                      npy_bytes("{'descr': '<i4', 'fortran_order': False, 'shape': (2, 2), }",
                                raw(std::vector<std::int32_t>{1, 2, 3, 4})));
    CHECK_THROWS_AS(read_feature_matrix(dir / "i4.npy"), FormatError);
  }
  SECTION("truncated payload is a FormatError") {
    testsupport::spit(dir / "short.npy", npy_bytes(f8, raw(std::vector<double>{1, 2, 3})));
    CHECK_THROWS_AS(read_feature_matrix(dir / "short.npy"), FormatError);
  }
  SECTION("missing file is an IoError naming the path") {
    try {
      read_feature_matrix(dir / "missing.npy");
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("missing.npy"));
    }
  }
  SECTION("one sample is a ShapeError") {
    CHECK_THROWS_AS(FeatureMatrix(1, 3, {1, 2, 3}), ShapeError);
  }
}

TEST_CASE("feature round trips are bit-exact", "[tensor_io]") {
  const auto dir = testsupport::scratch_dir("npy_roundtrip");
  std::mt19937_64 rng(7);

  SECTION("random 500 x 1024 float64") {
    const FeatureMatrix m = random_matrix(rng, 500, 1024);
    write_feature_matrix(m, dir / "big.npy");
    const FeatureMatrix back = read_feature_matrix(dir / "big.npy");
    REQUIRE(back.n_samples() == 500);
    REQUIRE(back.n_features() == 1024);
    CHECK(std::memcmp(back.data().data(), m.data().data(), m.data().size_bytes()) == 0);
  }
  SECTION("denormals survive") {
    const double tiny = std::numeric_limits<double>::denorm_min();
    const FeatureMatrix m(2, 3, {tiny, -tiny, 3 * tiny, 1e-310, -2.5e-320, 1.0});
    write_feature_matrix(m, dir / "den.npy");
    const FeatureMatrix back = read_feature_matrix(dir / "den.npy");
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(std::bit_cast<std::uint64_t>(back.data()[i]) ==
            std::bit_cast<std::uint64_t>(m.data()[i]));
    }
  }
  SECTION("float32 files are rewritten unchanged") {
    std::vector<float> values(40 * 7);
    std::normal_distribution<float> dist(0.0f, 1.0f);
    for (auto& v : values) v = dist(rng);
    values[3] = std::numeric_limits<float>::denorm_min();
    const std::string bytes =
        npy_bytes("{'descr': '<f4', 'fortran_order': False, 'shape': (40, 7), }", raw(values));
    testsupport::spit(dir / "in.npy", bytes);
    const FeatureMatrix m = read_feature_matrix(dir / "in.npy");
    write_feature_matrix(m, dir / "out.npy");
    CHECK(testsupport::slurp(dir / "out.npy") == bytes);
  }
  SECTION("explicit float32 write keeps float32 values") {
    std::vector<double> v{0.5, -1.25, 3.0, 1e-3};
    FeatureMatrix m(2, 2, v);
    write_feature_matrix(m, dir / "w.npy", ElementType::Float32);
    const FeatureMatrix back = read_feature_matrix(dir / "w.npy");
    CHECK(back.source_type() == ElementType::Float32);
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(back.data()[i] == static_cast<double>(static_cast<float>(v[i])));
    }
  }
}

TEST_CASE("write to an unwritable path is an IoError", "[tensor_io]") {
  const FeatureMatrix m(2, 1, {1.0, 2.0});
  CHECK_THROWS_AS(write_feature_matrix(m, "/nonexistent-dir/sub/x.npy"), IoError);
}

TEST_CASE("npy versions 2 and 3 are readable", "[tensor_io]") {
  const auto dir = testsupport::scratch_dir("npy_v2");
  std::string header = "{'descr': '<f8', 'fortran_order': False, 'shape': (2, 1), }";
  const std::size_t unpadded = 12 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header += '\n';
  for (char version : {'\x02', '\x03'}) {
    std::string bytes("\x93NUMPY", 6);
    bytes += version;
    bytes += '\0';
    const auto len = static_cast<std::uint32_t>(header.size());
    for (int b = 0; b < 4; ++b) bytes += static_cast<char>((len >> (8 * b)) & 0xff);
    bytes += header + raw(std::vector<double>{1.5, -2.5});
    testsupport::spit(dir / "v.npy", bytes);
    const FeatureMatrix m = read_feature_matrix(dir / "v.npy");
    CHECK(m.at(0, 0) == 1.5);
    CHECK(m.at(1, 0) == -2.5);
  }
}

TEST_CASE("read_labels", "[tensor_io]") {
  const auto dir = testsupport::scratch_dir("labels");
  auto write_raw = [&](const fs::path& p, const std::vector<std::int64_t>& v) {
    testsupport::spit(p, npy_bytes("{'descr': '<i8', 'fortran_order': False, 'shape': (" +
                                       std::to_string(v.size()) + ",), }",
                                   raw(v)));
  };

  SECTION("[0,1,0,1] with expected_n 4 has two classes") {
    write_raw(dir / "a.npy", {0, 1, 0, 1});
    const LabelVector l = read_labels(dir / "a.npy", 4);
    CHECK(l.size() == 4);
    CHECK(l.n_classes() == 2);
    CHECK(l[1] == 1);
  }
  SECTION("a single class is a DataError") {
    write_raw(dir / "b.npy", {0, 0, 0, 0});
    CHECK_THROWS_AS(read_labels(dir / "b.npy", 4), DataError);
  }
  SECTION("length mismatch is a ShapeError") {
    write_raw(dir / "c.npy", {0, 1, 0});
    CHECK_THROWS_AS(read_labels(dir / "c.npy", 4), ShapeError);
  }
  SECTION("negative label is a DataError") {
    write_raw(dir / "d.npy", {0, 1, -1, 1});
    CHECK_THROWS_AS(read_labels(dir / "d.npy", 4), DataError);
  }
  SECTION("float labels are a FormatError") {
    testsupport::spit(dir / "e.npy",
                      npy_bytes("{'descr': '<f8', 'fortran_order': False, 'shape': (2,), }",
                                raw(std::vector<double>{0, 1})));
    CHECK_THROWS_AS(read_labels(dir / "e.npy"), FormatError);
  }
  SECTION("n_classes may exceed the largest label") {
    const LabelVector l({0, 2, 2, 0}, 5);
    CHECK(l.n_classes() == 5);
    CHECK_THROWS_AS(LabelVector({0, 3}, 3), DataError);
  }
}

namespace {

void write_run_files(const fs::path& dir, const std::vector<std::size_t>& rows,
                     const std::vector<std::size_t>& cols, std::size_t n_labels) {
  std::vector<std::int64_t> labels(n_labels);
  for (std::size_t i = 0; i < n_labels; ++i) labels[i] = static_cast<std::int64_t>(i % 2);
  write_labels(LabelVector(labels), dir / "labels.npy");
  std::string layers;
  for (std::size_t l = 0; l < rows.size(); ++l) {
    std::vector<double> v(rows[l] * cols[l]);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i % 7) + 1.0 + l;
    write_feature_matrix(FeatureMatrix(rows[l], cols[l], v), dir / ("f" + std::to_string(l) + ".npy"));
    layers += std::string(l ? "," : "") + R"({"name": "block)" + std::to_string(l) +
              R"(", "file": "f)" + std::to_string(l) + R"(.npy", "repeatable": )" +
              (l == 1 ? "true" : "false") + "}";
  }
  testsupport::spit(dir / "manifest.json",
                    R"({"model": "toy", "dataset": "unit", "num_classes": 2, "labels_file": "labels.npy", "layers": [)" +
                        layers + "]}");
}

}  // namespace

TEST_CASE("load_run", "[tensor_io]") {
  const auto dir = testsupport::scratch_dir("load_run");

  SECTION("three layers of 10 samples") {
    write_run_files(dir, {10, 10, 10}, {4, 8, 8}, 10);
    const LayerFeatureSet run = load_run(dir / "manifest.json");
    CHECK(run.n_layers() == 3);
    CHECK(run.n_samples() == 10);
    CHECK(run.layers[0].n_features() == 4);
    CHECK(run.layers[2].n_features() == 8);
    CHECK(run.manifest.model_name == "toy");
    CHECK(run.manifest.layers[1].repeatable);
    CHECK_FALSE(run.manifest.layers[0].repeatable);

    const LayerFeatureSet again = load_run(dir / "manifest.json");
    for (std::size_t l = 0; l < 3; ++l) {
      CHECK(std::equal(run.layers[l].data().begin(), run.layers[l].data().end(),
                       again.layers[l].data().begin()));
    }
  }
  SECTION("sample count mismatch names the layer") {
    write_run_files(dir, {10, 9}, {4, 4}, 10);
    try {
      load_run(dir / "manifest.json");
      FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
      CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("block1"));
    }
  }
  SECTION("empty layers list is a FormatError") {
    write_run_files(dir, {10}, {4}, 10);
    testsupport::spit(dir / "manifest.json",
                      R"({"model": "m", "dataset": "d", "num_classes": 2, "labels_file": "labels.npy", "layers": []})");
    CHECK_THROWS_AS(load_run(dir / "manifest.json"), FormatError);
  }
  SECTION("duplicate layer names are a FormatError") {
    write_run_files(dir, {10}, {4}, 10);
    testsupport::spit(dir / "manifest.json",
                      R"({"model": "m", "dataset": "d", "num_classes": 2, "labels_file": "labels.npy", "layers": [
                        {"name": "a", "file": "f0.npy", "repeatable": false},
                        {"name": "a", "file": "f0.npy", "repeatable": false}]})");
    CHECK_THROWS_AS(load_run(dir / "manifest.json"), FormatError);
  }
  SECTION("missing key is a FormatError") {
    testsupport::spit(dir / "manifest.json", R"({"model": "m"})");
    CHECK_THROWS_AS(read_manifest(dir / "manifest.json"), FormatError);
  }
  SECTION("missing layer file is an IoError naming the layer") {
    write_run_files(dir, {10}, {4}, 10);
    fs::remove(dir / "f0.npy");
    try {
      load_run(dir / "manifest.json");
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("block0"));
    }
  }
  SECTION("manifest round trip keeps optional stage") {
    RunManifest m;
    m.model_name = "resnet";
    m.dataset_name = "cifar";
    m.n_classes = 10;
    m.labels_file = "labels.npy";
    m.layers = {{"conv4_1", "a.npy", true, "conv4_x"}, {"fc", "b.npy", false, std::nullopt}};
    write_manifest(m, dir / "m.json");
    const RunManifest back = read_manifest(dir / "m.json");
    CHECK(back.model_name == "resnet");
    CHECK(back.n_classes == 10);
    REQUIRE(back.layers.size() == 2);
    CHECK(back.layers[0].stage == std::optional<std::string>("conv4_x"));
    CHECK_FALSE(back.layers[1].stage.has_value());
    CHECK(back.layers[0].repeatable);
  }
}
