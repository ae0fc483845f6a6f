#include <cstdlib>
#include <iostream>
#include <sstream>

#include "doctest.h"

#include "cafegb/cli.hpp"
#include "../support.hpp"

using namespace cafegb;

namespace {

struct Outcome {
  int code;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "cafegb");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream captured;
  auto* old = std::cerr.rdbuf(captured.rdbuf());
  const int code = cli::run(static_cast<int>(argv.size()), argv.data());
  std::cerr.rdbuf(old);
  return {code, captured.str()};
}

std::string value_of(const std::string& effective, const std::string& key) {
  std::istringstream in(effective);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + " = ", 0) == 0) return line.substr(key.size() + 3);
  }
  return "<absent>";
}

}  // namespace

TEST_CASE("config file, environment and flags layer in order") {
  testing::TempDir dir;
  const auto out = (dir / "o").string();
  testing::write_file(dir / "run.cfg",
                      "# comment\nchunk-size = 777\noverlap = 0.2\nworkers = 3\nseeds = 1, 2\n");
  ::setenv("CAFEGB_WORKERS", "5", 1);
  auto r = invoke({"synth", "--config", (dir / "run.cfg").string(), "--output", out, "--n", "40",
                   "--m", "4", "--d", "2", "--overlap", "0.3", "--quiet"});
  ::unsetenv("CAFEGB_WORKERS");
  REQUIRE(r.code == cli::kExitOk);
  const auto eff = testing::read_file(dir / "o/config.effective");
  CHECK(value_of(eff, "chunk-size") == "777");
  CHECK(value_of(eff, "overlap") == "0.3");
  CHECK(value_of(eff, "workers") == "5");
  CHECK(value_of(eff, "seeds") == "1,2");
  CHECK(value_of(eff, "rounds") == "100");
  CHECK(value_of(eff, "output") == out);
  for (const auto& s : cli::settings()) CHECK(value_of(eff, s.key) != "<absent>");
}

TEST_CASE("config text parsing") {
  cli::RunConfig cfg;
  cli::apply_config_text(cfg, "k-grid = 5,10\nclassifiers = logreg\nnormalize-chunks = yes\n", "t");
  CHECK(cfg.k_grid == std::vector<std::size_t>{5, 10});
  CHECK(cfg.classifiers == std::vector<std::string>{"logreg"});
  CHECK(cfg.normalize_chunks);
  CHECK_THROWS_AS(cli::apply_config_text(cfg, "bogus = 1\n", "t"), UsageError);
  CHECK_THROWS_AS(cli::apply_config_text(cfg, "rounds = many\n", "t"), UsageError);
  CHECK_THROWS_AS(cli::apply_config_text(cfg, "just words\n", "t"), UsageError);
  CHECK_THROWS_AS(cli::apply_config_text(cfg, "classifiers = svm\n", "t"), UsageError);
}

TEST_CASE("exit codes and messages") {
  testing::TempDir dir;
  const auto out = (dir / "o").string();
  CHECK(invoke({"select", "--no-such-flag"}).code == cli::kExitUsage);
  CHECK(invoke({}).code == cli::kExitUsage);
  CHECK(invoke({"select", "--overlap", "1.5", "--output", out}).code == cli::kExitUsage);
  CHECK(invoke({"select", "--data", (dir / "absent.csv").string(), "--output", out}).code ==
        cli::kExitData);

  const auto stats = invoke({"stats", "--output", out});
  CHECK(stats.code == cli::kExitData);
  CHECK(stats.err.find("cafegb evaluate") != std::string::npos);
  const auto shap = invoke({"shap", "--output", out, "--n", "60", "--m", "4", "--d", "2"});
  CHECK(shap.code == cli::kExitData);
  CHECK(shap.err.find("cafegb select") != std::string::npos);
  CHECK(invoke({"report", "--output", (dir / "empty").string()}).code == cli::kExitData);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("oversized chunk warns and falls back to one chunk") {
  testing::TempDir dir;
  const auto out = (dir / "o").string();
  const auto r = invoke({"select", "--output", out, "--n", "200", "--m", "5", "--d", "2",
                         "--chunk-size", "5000", "--rounds", "5"});
  REQUIRE(r.code == 0);
  CHECK(r.err.find("single chunk") != std::string::npos);
  CHECK(testing::read_file(dir / "o/chunk_plan.json").find("\"windows\":[[0,161]]") !=
        std::string::npos);
}

TEST_CASE("kscan replay re-emits and picks the budget") {
  testing::TempDir dir;
  testing::write_file(dir / "t.csv",
                      "dataset,k,accuracy_mean,accuracy_std,jaccard_stability\n"
                      "a,10,0.9,0.01,0.5\n"
                      "a,20,0.95,0.01,0.7\n"
                      "a,30,0.9505,0.01,0.6\n");
  const auto out = (dir / "o").string();
  REQUIRE(invoke({"kscan", "--replay", (dir / "t.csv").string(), "--output", out}).code == 0);
  CHECK(testing::read_file(dir / "o/kscan.csv") == testing::read_file(dir / "t.csv"));
  CHECK(testing::read_file(dir / "o/budget.json").find("\"a\": 20") != std::string::npos);
}

TEST_CASE("pipeline is deterministic across worker counts") {
  testing::TempDir dir;
  const std::vector<std::string> common{"--n", "500", "--m", "12", "--d", "3", "--chunk-size",
                                        "150", "--rounds", "8", "--k-grid", "3,6", "--seeds",
                                        "1,2,3", "--quiet"};
  auto args = [&](const std::string& out, const std::string& workers) {
    std::vector<std::string> a{"pipeline", "--output", (dir / out).string(), "--workers", workers};
    a.insert(a.end(), common.begin(), common.end());
    return a;
  };
  REQUIRE(invoke(args("a", "1")).code == 0);
  REQUIRE(invoke(args("b", "1")).code == 0);
  REQUIRE(invoke(args("c", "4")).code == 0);
  for (const char* f : {"ranking.json", "importance.csv", "kscan.csv", "metrics.csv", "stats.csv",
                        "redundancy.csv", "shap_summary.csv", "metrics_raw.json", "report.md"}) {
    CAPTURE(f);
    const auto a = testing::read_file(dir / "a" / f);
    CHECK(!a.empty());
    CHECK(a == testing::read_file(dir / "b" / f));
    CHECK(a == testing::read_file(dir / "c" / f));
  }
  CHECK(std::filesystem::exists(dir / "a/profile.csv"));
}

TEST_CASE("convert between csv and cache") {
  testing::TempDir dir;
  const auto out = (dir / "o").string();
  REQUIRE(invoke({"synth", "--output", out, "--n", "30", "--m", "3", "--d", "1", "--quiet"}).code == 0);
  const auto csv = (dir / "o/synthetic.csv").string();
  const auto cache = (dir / "x.cafe").string();
  const auto back = (dir / "back.csv").string();
  REQUIRE(invoke({"convert", "--in", csv, "--out", cache, "--output", out}).code == 0);
  REQUIRE(invoke({"convert", "--in", cache, "--out", back, "--output", out}).code == 0);
  CHECK(testing::read_file(csv) == testing::read_file(back));
  CHECK(invoke({"convert", "--in", csv, "--output", out}).code == cli::kExitUsage);
}
