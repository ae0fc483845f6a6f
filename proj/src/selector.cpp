#include "cafegb/selector.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "cafegb/error.hpp"
#include "cafegb/format.hpp"
#include "cafegb/parallel.hpp"
#include "json.hpp"

namespace cafegb::selection {

void CafeGbConfig::validate() const {
  require(chunk_size >= 2, "chunk_size must be at least 2");
  require(overlap >= 0.0 && overlap < 1.0, "overlap must lie in [0, 1)");
  gbdt.validate();
}

FeatureRanking run(const data::DatasetMatrix& train, const CafeGbConfig& cfg, RunTrace* trace) {
  cfg.validate();
  require(train.rows() > 0 && train.features() > 0, "training set is empty");
  const auto positives = std::count(train.labels.begin(), train.labels.end(), std::uint8_t{1});
  if (positives == 0 || static_cast<std::size_t>(positives) == train.rows()) {
    throw DataError("CAFE-GB needs both classes in the training set");
  }

  const auto plan = chunker::plan_chunks(train.rows(), cfg.chunk_size, cfg.overlap, cfg.seed);
  const std::size_t chunks = plan.windows.size();
  std::vector<gbdt::ImportanceVector> local(chunks);
  std::vector<bool> single(chunks, false);
  std::vector<std::uint8_t> single_flag(chunks, 0);

  parallel_for(chunks, cfg.workers, [&](std::size_t i) {
    const auto chunk = chunker::materialize_chunk(train, plan, i);
    const auto pos = std::count(chunk.labels.begin(), chunk.labels.end(), std::uint8_t{1});
    single_flag[i] = pos == 0 || static_cast<std::size_t>(pos) == chunk.rows();
    const auto model = gbdt::train(chunk.values, chunk.labels, cfg.gbdt);
    local[i] = gbdt::gain_importance(model);
    if (cfg.normalize_chunks) {
      const double total = std::accumulate(local[i].scores.begin(), local[i].scores.end(), 0.0);
      if (total > 0.0) {
        for (auto& s : local[i].scores) s /= total;
      }
    }
  });

  auto ranking = rank(aggregate(local));
  if (trace) {
    for (std::size_t i = 0; i < chunks; ++i) single[i] = single_flag[i] != 0;
    trace->plan = plan;
    trace->chunk_importances = std::move(local);
    trace->single_class = std::move(single);
  }
  return ranking;
}

gbdt::ImportanceVector aggregate(const std::vector<gbdt::ImportanceVector>& importances) {
  require(!importances.empty(), "aggregate needs at least one importance vector");
  gbdt::ImportanceVector total;
  total.scores.assign(importances.front().scores.size(), 0.0);
  for (const auto& imp : importances) {
    require(imp.scores.size() == total.scores.size(), "importance vectors differ in length");
    for (std::size_t j = 0; j < total.scores.size(); ++j) total.scores[j] += imp.scores[j];
  }
  return total;
}

FeatureRanking rank(const gbdt::ImportanceVector& importance) {
  FeatureRanking r;
  r.aggregated = importance;
  r.order.resize(importance.scores.size());
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  const auto& s = importance.scores;
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  return r;
}

std::vector<std::size_t> top_k(const FeatureRanking& ranking, std::size_t k) {
  require(k >= 1 && k <= ranking.order.size(),
          "k must lie in [1, " + std::to_string(ranking.order.size()) + "]");
  std::vector<std::size_t> out(ranking.order.begin(),
                               ranking.order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.begin(), out.end());
  return out;
}

std::string ranking_to_json(const FeatureRanking& ranking,
                            const std::vector<std::string>& feature_names) {
  require(feature_names.size() == ranking.order.size(), "feature name count mismatch");
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < ranking.order.size(); ++r) {
    const std::size_t j = ranking.order[r];
    doc.push_back({{"rank", r + 1},
                   {"feature_name", feature_names[j]},
                   {"aggregated_gain", ranking.aggregated.scores[j]}});
  }
  return doc.dump(1) + "\n";
}

FeatureRanking ranking_from_json(const std::string& text,
                                 const std::vector<std::string>& feature_names) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < feature_names.size(); ++j) index.emplace(feature_names[j], j);
  FeatureRanking r;
  r.aggregated.scores.assign(feature_names.size(), 0.0);
  try {
    const auto doc = nlohmann::json::parse(text);
    if (!doc.is_array()) throw DataError("ranking JSON must be an array");
    std::vector<bool> seen(feature_names.size(), false);
    for (const auto& entry : doc) {
      const auto name = entry.at("feature_name").get<std::string>();
      const auto it = index.find(name);
      if (it == index.end()) throw DataError("ranking names unknown feature '" + name + "'");
      if (seen[it->second]) throw DataError("ranking lists '" + name + "' twice");
      seen[it->second] = true;
      r.order.push_back(it->second);
      r.aggregated.scores[it->second] = entry.at("aggregated_gain").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("ranking JSON: ") + e.what());
  }
  if (r.order.size() != feature_names.size()) {
    throw DataError("ranking has " + std::to_string(r.order.size()) + " entries, dataset has " +
                    std::to_string(feature_names.size()) + " features");
  }
  return r;
}

std::string importance_to_csv(const gbdt::ImportanceVector& importance,
                              const std::vector<std::string>& feature_names) {
  require(feature_names.size() == importance.scores.size(), "feature name count mismatch");
  std::string out = "feature_name,gain\n";
  for (std::size_t j = 0; j < feature_names.size(); ++j) {
    out += feature_names[j] + "," + format_double(importance.scores[j]) + "\n";
  }
  return out;
}

}  // namespace cafegb::selection
