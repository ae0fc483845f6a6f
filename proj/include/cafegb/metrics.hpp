#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cafegb::eval {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
};

Confusion confusion(std::span<const std::uint8_t> y, std::span<const std::uint8_t> yhat);

double accuracy(std::span<const std::uint8_t> y, std::span<const std::uint8_t> yhat);
/// 2TP / (2TP + FP + FN); 0 when the denominator is 0.
double f1(std::span<const std::uint8_t> y, std::span<const std::uint8_t> yhat);
/// 0 when any marginal of the confusion matrix is empty.
double mcc(std::span<const std::uint8_t> y, std::span<const std::uint8_t> yhat);

/// Mann-Whitney estimate: concordant pairs plus half the tied pairs.
double roc_auc(std::span<const std::uint8_t> y, std::span<const double> scores);
/// Step-sum average precision; equal scores enter the sweep as one group.
double pr_auc(std::span<const std::uint8_t> y, std::span<const double> scores);

/// 1 where score >= threshold.
std::vector<std::uint8_t> threshold(std::span<const double> scores, double cut = 0.5);

struct MetricsReport {
  double accuracy = 0.0;
  double f1 = 0.0;
  double mcc = 0.0;
  double roc_auc = 0.0;
  double pr_auc = 0.0;
  std::uint64_t seed = 0;
  std::string classifier;
  std::string feature_set;
};

/// All five metrics from predicted positive-class probabilities (cut at 0.5).
MetricsReport score(std::span<const std::uint8_t> y, std::span<const double> proba);

inline constexpr const char* kMetricNames[] = {"accuracy", "f1", "mcc", "roc_auc", "pr_auc"};
double metric_value(const MetricsReport& r, std::string_view name);

}  // namespace cafegb::eval
