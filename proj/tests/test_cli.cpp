#include <sys/wait.h>

#include <cstdlib>

#include "catch_amalgamated.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path out = scratch / "stdout.txt";
  const fs::path err = scratch / "stderr.txt";
  const std::string cmd = std::string("'") + MODGRAPH_CLI + "' " + args + " >'" + out.string() +
                          "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, testsupport::slurp(out), testsupport::slurp(err)};
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("synth then analyze with defaults", "[cli]") {
  const auto dir = testsupport::scratch_dir("cli_analyze");
  REQUIRE(run_cli("synth --out " + q(dir / "run") + " --seed 3", dir).code == 0);
  const auto r = run_cli("analyze --manifest " + q(dir / "run" / "manifest.json") + " --out " +
                             q(dir / "a") + " --format json,csv,svg",
                         dir);
  REQUIRE(r.code == 0);
  const auto report = nlohmann::json::parse(testsupport::slurp(dir / "a" / "report.json"));
  const auto curve = report["curve"].get<std::vector<double>>();
  REQUIRE(curve.size() == 10);
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) CHECK(curve[i + 1] >= curve[i] - 0.02);
  CHECK(report["params"]["k"] == 3);
  CHECK(report["params"]["n"] == 500);
  CHECK(report["params"]["metric"] == "cosine");
  const std::string csv = testsupport::slurp(dir / "a" / "curve.csv");
  CHECK(csv.rfind("layer,name,modularity\n0,layer_00,", 0) == 0);
  CHECK(testsupport::slurp(dir / "a" / "curve.svg").find("<polyline") != std::string::npos);

  SECTION("repeat runs are byte-identical") {
    REQUIRE(run_cli("analyze --manifest " + q(dir / "run" / "manifest.json") + " --out " +
                        q(dir / "b") + " --format json,csv,svg --threads 3",
                    dir)
                .code == 0);
    for (const char* f : {"report.json", "curve.csv", "curve.svg"}) {
      CHECK(testsupport::slurp(dir / "a" / f) == testsupport::slurp(dir / "b" / f));
    }
  }
  SECTION("edge and similarity dumps") {
    REQUIRE(run_cli("analyze --manifest " + q(dir / "run" / "manifest.json") + " --out " +
                        q(dir / "c") + " --format json --edges --dump-similarity",
                    dir)
                .code == 0);
    CHECK(fs::exists(dir / "c" / "edges_0.csv"));
    CHECK(fs::exists(dir / "c" / "similarity_9.csv"));
    CHECK_FALSE(fs::exists(dir / "c" / "curve.csv"));
    CHECK(testsupport::slurp(dir / "c" / "edges_0.csv").rfind("src,dst,weight\n", 0) == 0);
  }
}

TEST_CASE("analyze error exits", "[cli]") {
  const auto dir = testsupport::scratch_dir("cli_errors");
  REQUIRE(run_cli("synth --out " + q(dir / "run") + " --n 60 --classes 3 --features 8 --layers 3",
                  dir)
              .code == 0);
  const std::string manifest = q(dir / "run" / "manifest.json");

  SECTION("k = 0 is a parameter error mentioning k") {
    const auto r = run_cli("analyze --manifest " + manifest + " --k 0 --out " + q(dir / "o"), dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("k must satisfy") != std::string::npos);
  }
  SECTION("unknown metric") {
    const auto r = run_cli("analyze --manifest " + manifest + " --metric rbf --out " + q(dir / "o"), dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("--metric") != std::string::npos);
  }
  SECTION("missing manifest names the path") {
    const auto r = run_cli("analyze --manifest " + q(dir / "missing.json"), dir);
    CHECK(r.code == 4);
    CHECK(r.err.find("missing.json") != std::string::npos);
  }
  SECTION("missing required flag") {
    CHECK(run_cli("analyze", dir).code == 2);
    CHECK(run_cli("", dir).code == 2);
  }
  SECTION("corrupt layer names the layer") {
    testsupport::spit(dir / "run" / "layer_01.npy", "garbage that is not an npy file........");
    const auto r = run_cli("analyze --manifest " + manifest + " --out " + q(dir / "o"), dir);
    CHECK(r.code == 3);
    CHECK(r.err.find("layer_01") != std::string::npos);
    CHECK(r.err.find("FormatError") != std::string::npos);
  }
}

TEST_CASE("diff command", "[cli]") {
  const auto dir = testsupport::scratch_dir("cli_diff");
  testsupport::spit(dir / "curve.csv", "layer,name,modularity\n0,a,0.1\n1,b,0.4\n2,c,0.35\n");
  auto r = run_cli("diff --curve " + q(dir / "curve.csv") + " --out " + q(dir / "d") +
                       " --format csv,svg",
                   dir);
  REQUIRE(r.code == 0);
  const std::string csv = testsupport::slurp(dir / "d" / "diff.csv");
  CHECK(csv == "a,b,c\n0,0.3,0.25\n0.3,0,0.05\n0.25,0.05,0\n");
  const std::string svg = testsupport::slurp(dir / "d" / "heatmap.svg");
  std::size_t rects = 0;
  for (auto p = svg.find("<rect"); p != std::string::npos; p = svg.find("<rect", p + 1)) ++rects;
  CHECK(rects == 9);

  testsupport::spit(dir / "one.csv", "layer,name,modularity\n0,only,0.2\n");
  REQUIRE(run_cli("diff --curve " + q(dir / "one.csv") + " --out " + q(dir / "e"), dir).code == 0);
  CHECK(testsupport::slurp(dir / "e" / "diff.csv") == "only\n0\n");

  r = run_cli("diff --curve " + q(dir / "nope.csv") + " --out " + q(dir / "f"), dir);
  CHECK(r.code == 4);
  CHECK(r.err.find("nope.csv") != std::string::npos);

  CHECK(run_cli("diff --out " + q(dir / "g"), dir).code == 2);

  REQUIRE(run_cli("synth --out " + q(dir / "run") + " --n 60 --classes 3 --features 8 --layers 1",
                  dir)
              .code == 0);
  REQUIRE(run_cli("diff --manifest " + q(dir / "run" / "manifest.json") + " --out " + q(dir / "h"), dir)
              .code == 0);
  CHECK(testsupport::slurp(dir / "h" / "diff.csv") == "layer_00\n0\n");
}

TEST_CASE("prune-plan command", "[cli]") {
  const auto dir = testsupport::scratch_dir("cli_prune");
  REQUIRE(run_cli("synth --out " + q(dir / "plateau") + " --layers 8 --plateau 3,5 --seed 2", dir)
              .code == 0);
  auto r = run_cli("prune-plan --manifest " + q(dir / "plateau" / "manifest.json") + " --out " +
                       q(dir / "p"),
                   dir);
  REQUIRE(r.code == 0);
  const auto plan = nlohmann::json::parse(testsupport::slurp(dir / "p" / "prune_plan.json"));
  REQUIRE(plan["prune_candidates"].size() == 2);
  CHECK(plan["prune_candidates"][0]["layer"] == 4);
  CHECK(plan["prune_candidates"][0]["eligible"] == true);
  CHECK(plan["prune_candidates"][1]["layer"] == 5);
  CHECK(plan["prune_candidates"][1]["eligible"] == true);
  CHECK(r.out.find("plateau") != std::string::npos);

  REQUIRE(run_cli("synth --out " + q(dir / "rise") + " --n 100 --features 32 --separation-max 2", dir).code == 0);
  r = run_cli("prune-plan --manifest " + q(dir / "rise" / "manifest.json") + " --out " + q(dir / "r"),
              dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("no prune candidates") != std::string::npos);

  r = run_cli("prune-plan --manifest " + q(dir / "rise" / "manifest.json") + " --epsilon=-1", dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("epsilon") != std::string::npos);
}

TEST_CASE("sweep command", "[cli]") {
  const auto dir = testsupport::scratch_dir("cli_sweep");
  REQUIRE(run_cli("synth --out " + q(dir / "run") + " --n 100 --classes 5 --features 32 --layers 4",
                  dir)
              .code == 0);
  const std::string manifest = q(dir / "run" / "manifest.json");
  auto r = run_cli("sweep --manifest " + manifest + " --k-list 3,5 --n-list 50,100 --out " +
                       q(dir / "s") + " --format csv,svg",
                   dir);
  REQUIRE(r.code == 0);
  const std::string csv = testsupport::slurp(dir / "s" / "sweep.csv");
  CHECK(csv.rfind("k,n,layer,modularity\n3,50,0,", 0) == 0);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 1 + 4 * 4);
  CHECK(r.out.find("max pairwise gap") != std::string::npos);
  CHECK(fs::exists(dir / "s" / "sweep.svg"));

  REQUIRE(run_cli("analyze --manifest " + manifest + " --out " + q(dir / "a"), dir).code == 0);
  REQUIRE(run_cli("sweep --manifest " + manifest + " --k-list 3 --out " + q(dir / "one"), dir).code == 0);
  const std::string single = testsupport::slurp(dir / "one" / "sweep.csv");
  const std::string curve = testsupport::slurp(dir / "a" / "curve.csv");
  // Same values in both files.
  for (std::size_t l = 0; l < 4; ++l) {
    const std::string row_prefix = std::to_string(l) + ",layer_0" + std::to_string(l) + ",";
    const auto at = curve.find(row_prefix);
    REQUIRE(at != std::string::npos);
    const std::string value = curve.substr(at + row_prefix.size(), curve.find('\n', at) - at - row_prefix.size());
    CHECK(single.find("3,100," + std::to_string(l) + "," + value + "\n") != std::string::npos);
  }

  CHECK(run_cli("sweep --manifest " + manifest + " --k-list 3 --n-list 500", dir).code == 2);
  CHECK(run_cli("sweep --manifest " + manifest + " --k-list , --out " + q(dir / "x"), dir).code == 2);
  CHECK(run_cli("sweep --manifest " + manifest + " --k-list 3,x", dir).code == 2);
}

TEST_CASE("synth command", "[cli]") {
  const auto dir = testsupport::scratch_dir("cli_synth");
  const std::string flags = " --n 40 --classes 4 --features 8 --layers 3 --seed 11";
  REQUIRE(run_cli("synth --out " + q(dir / "a") + flags, dir).code == 0);
  REQUIRE(run_cli("synth --out " + q(dir / "b") + flags, dir).code == 0);
  for (const char* f : {"manifest.json", "labels.npy", "layer_00.npy", "layer_02.npy"}) {
    CHECK_FALSE(testsupport::slurp(dir / "a" / f).empty());
    CHECK(testsupport::slurp(dir / "a" / f) == testsupport::slurp(dir / "b" / f));
  }
  CHECK(run_cli("synth --out " + q(dir / "c") + " --n 5 --classes 10", dir).code == 2);
  CHECK(run_cli("synth --out " + q(dir / "c") + " --layers 3 --schedule 0,1", dir).code == 2);
  CHECK(run_cli("synth --out " + q(dir / "c") + " --dtype f2", dir).code == 2);

  REQUIRE(run_cli("synth --out " + q(dir / "f4") + flags + " --dtype f4 --repeatable 1,2", dir).code == 0);
  const auto m = nlohmann::json::parse(testsupport::slurp(dir / "f4" / "manifest.json"));
  CHECK(m["layers"][0]["repeatable"] == false);
  CHECK(m["layers"][2]["repeatable"] == true);
  CHECK(testsupport::slurp(dir / "f4" / "layer_00.npy").find("'<f4'") != std::string::npos);
}

TEST_CASE("render and compare commands", "[cli]") {
  const auto dir = testsupport::scratch_dir("cli_render");
  testsupport::spit(dir / "a.csv", "layer,name,modularity\n0,l0,0.1\n1,l1,0.5\n2,l2,0.6\n");
  testsupport::spit(dir / "b.csv", "layer,name,modularity\n0,l0,0.1\n1,l1,0.5\n2,l2,0.59\n3,l3,0.6\n");
  REQUIRE(run_cli("render --curve " + q(dir / "a.csv") + " --out " + q(dir / "a.svg"), dir).code == 0);
  REQUIRE(run_cli("render --curve " + q(dir / "a.csv") + " --out " + q(dir / "a2.svg"), dir).code == 0);
  CHECK(testsupport::slurp(dir / "a.svg") == testsupport::slurp(dir / "a2.svg"));
  REQUIRE(run_cli("render --heatmap --curve " + q(dir / "a.csv") + " --out " + q(dir / "h.svg"), dir)
              .code == 0);
  CHECK(testsupport::slurp(dir / "h.svg").find("<rect") != std::string::npos);

  auto r = run_cli("compare --curve " + q(dir / "a.csv") + " --curve " + q(dir / "b.csv") +
                       " --out " + q(dir / "cmp.json"),
                   dir);
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(testsupport::slurp(dir / "cmp.json"));
  CHECK(doc["max_peak_difference"] == 0.0);
  CHECK(doc["curves"][1]["length"] == 4);
  r = run_cli("compare --curve " + q(dir / "a.csv"), dir);
  CHECK(r.code == 2);
}
