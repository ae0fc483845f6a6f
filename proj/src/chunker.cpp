#include "cafegb/chunker.hpp"

#include <cmath>

#include "cafegb/random.hpp"
#include "json.hpp"

namespace cafegb::chunker {

namespace {
constexpr std::uint64_t kChunkStream = 7;
}

std::size_t overlap_count(std::size_t chunk_size, double overlap) {
  const double raw = static_cast<double>(chunk_size) * overlap;
  // p * o lands a few ulps above an integer for values like 30 * 0.1.
  const double nearest = std::round(raw);
  if (std::abs(raw - nearest) <= 1e-9 * std::max(1.0, raw)) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::ceil(raw));
}

std::size_t ChunkPlan::stride() const noexcept {
  const std::size_t shared = overlap_count(chunk_size, overlap);
  return shared >= chunk_size ? 1 : chunk_size - shared;
}

std::vector<Window> plan_windows(std::size_t n, std::size_t chunk_size, double overlap) {
  require(n >= 1, "plan_chunks needs n >= 1");
  require(chunk_size >= 2, "chunk_size must be at least 2");
  require(overlap >= 0.0 && overlap < 1.0, "overlap must lie in [0, 1)");

  if (n < chunk_size) return {{0, n}};

  const std::size_t shared = overlap_count(chunk_size, overlap);
  const std::size_t stride = shared >= chunk_size ? 1 : chunk_size - shared;
  std::vector<Window> windows;
  std::size_t start = 0;
  for (; start + chunk_size < n; start += stride) windows.push_back({start, start + chunk_size});
  const std::size_t last = n - chunk_size;
  if (windows.empty() || windows.back().start != last) windows.push_back({last, n});
  return windows;
}

ChunkPlan plan_chunks(std::size_t n, std::size_t chunk_size, double overlap, std::uint64_t seed) {
  ChunkPlan plan;
  plan.windows = plan_windows(n, chunk_size, overlap);
  plan.chunk_size = chunk_size;
  plan.overlap = overlap;
  plan.seed = seed;
  plan.permutation = Rng::derive(seed, kChunkStream).permutation(n);
  return plan;
}

std::vector<std::size_t> chunk_rows(const ChunkPlan& plan, std::size_t i) {
  require(i < plan.windows.size(), "chunk index out of range");
  const auto& w = plan.windows[i];
  return {plan.permutation.begin() + static_cast<std::ptrdiff_t>(w.start),
          plan.permutation.begin() + static_cast<std::ptrdiff_t>(w.end)};
}

data::DatasetMatrix materialize_chunk(const data::DatasetMatrix& ds, const ChunkPlan& plan,
                                      std::size_t i) {
  require(plan.rows() == ds.rows(), "chunk plan was built for " +
                                        std::to_string(plan.rows()) + " rows, dataset has " +
                                        std::to_string(ds.rows()));
  return data::select_rows(ds, chunk_rows(plan, i));
}

std::string plan_to_json(const ChunkPlan& plan) {
  nlohmann::ordered_json doc;
  doc["chunk_size"] = plan.chunk_size;
  doc["overlap"] = plan.overlap;
  doc["seed"] = plan.seed;
  doc["stride"] = plan.stride();
  doc["rows"] = plan.rows();
  doc["windows"] = nlohmann::ordered_json::array();
  for (const auto& w : plan.windows) doc["windows"].push_back({w.start, w.end});
  doc["permutation"] = plan.permutation;
  return doc.dump();
}

ChunkPlan plan_from_json(std::string_view text) {
  const auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw DataError("chunk plan: malformed JSON");
  ChunkPlan plan;
  try {
    plan.chunk_size = doc.at("chunk_size").get<std::size_t>();
    plan.overlap = doc.at("overlap").get<double>();
    plan.seed = doc.at("seed").get<std::uint64_t>();
    plan.permutation = doc.at("permutation").get<std::vector<std::size_t>>();
    for (const auto& w : doc.at("windows")) {
      plan.windows.push_back({w.at(0).get<std::size_t>(), w.at(1).get<std::size_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("chunk plan: ") + e.what());
  }
  for (const auto& w : plan.windows) {
    if (w.start >= w.end || w.end > plan.rows()) throw DataError("chunk plan: window out of range");
  }
  return plan;
}

}  // namespace cafegb::chunker
