#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cafegb/data.hpp"

namespace cafegb::chunker {

/// Half-open interval [start, end) into ChunkPlan::permutation.
struct Window {
  std::size_t start;
  std::size_t end;
  std::size_t size() const noexcept { return end - start; }
  friend bool operator==(const Window&, const Window&) = default;
};

/// Seeded row permutation plus overlapping fixed-length windows over it.
struct ChunkPlan {
  std::vector<std::size_t> permutation;
  std::vector<Window> windows;
  std::size_t chunk_size = 0;
  double overlap = 0.0;
  std::uint64_t seed = 0;

  std::size_t rows() const noexcept { return permutation.size(); }
  std::size_t stride() const noexcept;
  friend bool operator==(const ChunkPlan&, const ChunkPlan&) = default;
};

/// Number of positions consecutive full windows share: ceil(p * o).
std::size_t overlap_count(std::size_t chunk_size, double overlap);

/// Windows start at 0, s, 2s, ... while start + p < n, then one final window
/// clamped to end at n. When n < p there is a single window [0, n).
/// s = max(1, p - ceil(p * o)), i.e. floor(p * (1 - o)) without rounding drift.
ChunkPlan plan_chunks(std::size_t n, std::size_t chunk_size, double overlap, std::uint64_t seed);

/// Window layout only (no permutation); what plan_chunks uses internally.
std::vector<Window> plan_windows(std::size_t n, std::size_t chunk_size, double overlap);

/// Rows permutation[start..end) of `ds`, in permutation order.
data::DatasetMatrix materialize_chunk(const data::DatasetMatrix& ds, const ChunkPlan& plan,
                                      std::size_t i);

/// Source row indices of window i.
std::vector<std::size_t> chunk_rows(const ChunkPlan& plan, std::size_t i);

/// {"chunk_size","overlap","seed","stride","rows","windows":[[start,end],...],"permutation":[...]}
std::string plan_to_json(const ChunkPlan& plan);
ChunkPlan plan_from_json(std::string_view text);

}  // namespace cafegb::chunker
