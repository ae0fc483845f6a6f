#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cafegb/data.hpp"
#include "cafegb/gbdt.hpp"
#include "cafegb/logreg.hpp"
#include "cafegb/metrics.hpp"
#include "cafegb/selector.hpp"

namespace cafegb::eval {

enum class Classifier { kGbdt, kLogReg };

/// Accepts "gbdt" (alias "lgbm-analog") and "logreg".
Classifier parse_classifier(std::string_view tag);
std::string classifier_tag(Classifier c);

/// k == 0 means the full feature set ("baseline"); otherwise "cafegb-<k>".
struct FeatureSet {
  std::size_t k = 0;

  static FeatureSet all() { return {}; }
  static FeatureSet cafegb(std::size_t k) { return {k}; }
  bool baseline() const noexcept { return k == 0; }
  std::string tag() const;
};

struct ExperimentConfig {
  double test_fraction = 0.2;
  selection::CafeGbConfig cafegb;  // seed is replaced by the run seed
  gbdt::GbdtParams gbdt;
  LogRegParams logreg;
};

/// One seed's split with train-only imputation and standardization applied.
struct SeedContext {
  std::uint64_t seed = 0;
  data::SplitSpec split;
  data::DatasetMatrix train;
  data::DatasetMatrix test;
};

SeedContext prepare_seed(const data::DatasetMatrix& ds, std::uint64_t seed, double test_fraction);

/// CAFE-GB on the context's training rows with the context seed.
selection::FeatureRanking select_features(const SeedContext& ctx, const ExperimentConfig& cfg);

/// Trains `classifier` on the given columns (all when empty) and scores the test rows.
MetricsReport fit_and_score(const SeedContext& ctx, const std::vector<std::size_t>& columns,
                            Classifier classifier, const ExperimentConfig& cfg);

struct ExperimentResult {
  std::vector<MetricsReport> reports;  // seed order
  /// Per-seed rankings and top-k sets; empty for the baseline feature set.
  std::vector<selection::FeatureRanking> rankings;
  std::vector<std::vector<std::size_t>> selected;
};

ExperimentResult run_experiment(const data::DatasetMatrix& ds, const FeatureSet& features,
                                Classifier classifier, const std::vector<std::uint64_t>& seeds,
                                const ExperimentConfig& cfg);

}  // namespace cafegb::eval
