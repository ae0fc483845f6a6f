#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cafegb/chunker.hpp"
#include "cafegb/data.hpp"
#include "cafegb/gbdt.hpp"

namespace cafegb::selection {

struct CafeGbConfig {
  std::size_t chunk_size = 15000;
  double overlap = 0.1;
  gbdt::GbdtParams gbdt;
  std::uint64_t seed = 42;
  /// Scale each chunk's importances to unit L1 norm before summing (ablation only).
  bool normalize_chunks = false;
  /// Threads used for per-chunk training; 0 picks the hardware concurrency.
  std::size_t workers = 1;

  void validate() const;
};

struct FeatureRanking {
  std::vector<std::size_t> order;
  gbdt::ImportanceVector aggregated;
  friend bool operator==(const FeatureRanking&, const FeatureRanking&) = default;
};

/// Per-chunk details kept for logs and audit output.
struct RunTrace {
  chunker::ChunkPlan plan;
  std::vector<gbdt::ImportanceVector> chunk_importances;
  std::vector<bool> single_class;
};

FeatureRanking run(const data::DatasetMatrix& train, const CafeGbConfig& cfg,
                   RunTrace* trace = nullptr);

/// Elementwise sum in the given order.
gbdt::ImportanceVector aggregate(const std::vector<gbdt::ImportanceVector>& importances);

/// Descending by score, ties by ascending feature index.
FeatureRanking rank(const gbdt::ImportanceVector& importance);

/// First k entries of the ranking, returned sorted ascending.
std::vector<std::size_t> top_k(const FeatureRanking& ranking, std::size_t k);

/// [{rank, feature_name, aggregated_gain}, ...] with 1-based ranks.
std::string ranking_to_json(const FeatureRanking& ranking,
                            const std::vector<std::string>& feature_names);
FeatureRanking ranking_from_json(const std::string& text,
                                 const std::vector<std::string>& feature_names);

/// "feature_name,gain" CSV, one row per feature in index order.
std::string importance_to_csv(const gbdt::ImportanceVector& importance,
                              const std::vector<std::string>& feature_names);

}  // namespace cafegb::selection
