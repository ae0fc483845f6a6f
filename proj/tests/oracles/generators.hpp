#pragma once

// Random inputs shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cafegb/gbdt.hpp"
#include "cafegb/matrix.hpp"
#include "cafegb/random.hpp"

namespace oracle {

struct Tiny {
  cafegb::Matrix X;
  std::vector<std::uint8_t> y;
};

// Logistic labels over a random linear score; odd columns are coarse so that
// repeated values exercise tie handling in binning.
inline Tiny random_tiny(cafegb::Rng& rng, std::size_t n, std::size_t m) {
  Tiny t{cafegb::Matrix(n, m), std::vector<std::uint8_t>(n)};
  std::vector<double> w(m);
  for (auto& v : w) v = rng.normal();
  for (std::size_t i = 0; i < n; ++i) {
    double z = 0;
    for (std::size_t j = 0; j < m; ++j) {
      t.X(i, j) = j % 2 ? std::round(rng.normal() * 2) / 2 : rng.normal();
      z += w[j] * t.X(i, j);
    }
    t.y[i] = rng.uniform() < 1 / (1 + std::exp(-2 * z)) ? 1 : 0;
  }
  if (std::count(t.y.begin(), t.y.end(), 1) == 0) t.y[0] = 1;
  if (std::count(t.y.begin(), t.y.end(), 0) == 0) t.y[0] = 0;
  return t;
}

// Random tree of at most the given depth with consistent covers.
inline std::int32_t grow_tree(cafegb::gbdt::Tree& t, cafegb::Rng& rng, std::size_t m, int depth,
                              double cover) {
  const auto id = static_cast<std::int32_t>(t.nodes.size());
  t.nodes.push_back({});
  if (depth == 0 || cover < 2 || rng.bernoulli(0.15)) {
    t.nodes[static_cast<std::size_t>(id)].value = rng.normal();
    t.nodes[static_cast<std::size_t>(id)].cover = cover;
    return id;
  }
  const double left_cover = std::floor(1 + rng.uniform() * (cover - 1));
  const auto feature = static_cast<std::int32_t>(rng.below(m));
  const double threshold = rng.normal() * 0.5;
  const auto l = grow_tree(t, rng, m, depth - 1, left_cover);
  const auto r = grow_tree(t, rng, m, depth - 1, cover - left_cover);
  auto& nd = t.nodes[static_cast<std::size_t>(id)];
  nd.feature = feature;
  nd.threshold = threshold;
  nd.left = l;
  nd.right = r;
  nd.cover = cover;
  return id;
}

}  // namespace oracle
