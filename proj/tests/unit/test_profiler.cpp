#include <cstring>
#include <memory>
#include <thread>

#include "doctest.h"

#include "cafegb/profiler.hpp"

using namespace cafegb::profiler;

TEST_CASE("records runtime") {
  const auto p = profile_stage("sleep", "unit", 3, [] {
    std::this_thread::sleep_for(std::chrono::milliseconds(120));
  });
  CHECK(p.stage == "sleep");
  CHECK(p.dataset == "unit");
  CHECK(p.seed == 3);
  CHECK(p.runtime_s >= 0.11);
  CHECK(p.runtime_s < 5.0);
}

TEST_CASE("peak memory sees a 100 MB allocation") {
  if (!current_rss_bytes()) {
    MESSAGE("resident set size unavailable on this platform");
    return;
  }
  auto inner = std::make_unique<StageProfile>();
  const auto outer = profile_stage("outer", "unit", 0, [&] {
    *inner = profile_stage("alloc", "unit", 0, [] {
      const std::size_t bytes = std::size_t{100} << 20;
      auto block = std::make_unique<char[]>(bytes);
      std::memset(block.get(), 1, bytes);
      std::this_thread::sleep_for(std::chrono::milliseconds(150));
      volatile char sink = block[bytes / 2];
      (void)sink;
    });
  });
  REQUIRE(inner->peak_memory_mb.has_value());
  REQUIRE(inner->start_memory_mb.has_value());
  const double delta = *inner->peak_memory_mb - *inner->start_memory_mb;
  CHECK(delta >= 95.0);
  CHECK(delta <= 110.0);
  CHECK(*outer.peak_memory_mb >= *inner->peak_memory_mb);
}

TEST_CASE("finish is idempotent and csv formatting") {
  Scope s("a", "d", 1);
  const auto first = s.finish();
  const auto second = s.finish();
  CHECK(first.runtime_s == second.runtime_s);

  Recorder rec;
  rec.add({"cafegb", "bodmas", 42, 1.23456, 512.04, 100.0});
  rec.add({"shap", "bodmas", 42, 0.5, std::nullopt, std::nullopt});
  CHECK(rec.records().size() == 2);
  CHECK(rec.to_csv() ==
        "stage,dataset,seed,runtime_s,peak_memory_mb\n"
        "cafegb,bodmas,42,1.235,512.0\n"
        "shap,bodmas,42,0.500,NA\n");
}
