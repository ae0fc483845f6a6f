#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cafegb::profiler {

struct StageProfile {
  std::string stage;
  std::string dataset;
  std::uint64_t seed = 0;
  double runtime_s = 0.0;
  /// Peak resident set during the stage, in MiB; empty when RSS cannot be read.
  std::optional<double> peak_memory_mb;
  /// Resident set when the stage began, in MiB.
  std::optional<double> start_memory_mb;
};

/// Current resident set in bytes, or empty when the platform offers no reading.
std::optional<std::uint64_t> current_rss_bytes();

/// Sampling rate of the background RSS sampler.
inline constexpr int kSamplerHz = 20;

/// Times a region and tracks its peak RSS. Scopes may nest; every open scope
/// sees every sample, so an outer peak is never below an inner one.
class Scope {
 public:
  Scope(std::string stage, std::string dataset, std::uint64_t seed);
  ~Scope();
  Scope(const Scope&) = delete;
  Scope& operator=(const Scope&) = delete;

  StageProfile finish();

  struct Window;

 private:
  StageProfile profile_;
  std::chrono::steady_clock::time_point start_;
  std::shared_ptr<Window> window_;
  bool done_ = false;
};

template <class Fn>
StageProfile profile_stage(std::string stage, std::string dataset, std::uint64_t seed, Fn&& work) {
  Scope scope(std::move(stage), std::move(dataset), seed);
  std::forward<Fn>(work)();
  return scope.finish();
}

/// Append-only record list in execution order.
class Recorder {
 public:
  void add(StageProfile p) { records_.push_back(std::move(p)); }
  const std::vector<StageProfile>& records() const noexcept { return records_; }
  /// stage,dataset,seed,runtime_s,peak_memory_mb ("NA" when unavailable).
  std::string to_csv() const;

 private:
  std::vector<StageProfile> records_;
};

}  // namespace cafegb::profiler
