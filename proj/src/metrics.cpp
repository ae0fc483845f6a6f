#include "cafegb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cafegb/error.hpp"

namespace cafegb::eval {

namespace {

void check_binary(std::span<const std::uint8_t> y, const char* what) {
  for (auto v : y) {
    if (v > 1) throw UsageError(std::string(what) + " must be 0/1");
  }
}

std::size_t count_positive(std::span<const std::uint8_t> y) {
  return static_cast<std::size_t>(std::count(y.begin(), y.end(), std::uint8_t{1}));
}

// Row indices sorted by descending score; ties keep index order.
std::vector<std::size_t> descending(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

void check_scores(std::span<const std::uint8_t> y, std::span<const double> scores) {
  require(y.size() == scores.size(), "labels and scores differ in length");
  check_binary(y, "labels");
  for (double s : scores) {
    if (!std::isfinite(s)) throw UsageError("scores must be finite");
  }
}

}  // namespace

Confusion confusion(std::span<const std::uint8_t> y, std::span<const std::uint8_t> yhat) {
  require(y.size() == yhat.size(), "labels and predictions differ in length");
  check_binary(y, "labels");
  check_binary(yhat, "predictions");
  Confusion c;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i]) {
      yhat[i] ? ++c.tp : ++c.fn;
    } else {
      yhat[i] ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

double accuracy(std::span<const std::uint8_t> y, std::span<const std::uint8_t> yhat) {
  const auto c = confusion(y, yhat);
  require(!y.empty(), "accuracy of an empty set");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(y.size());
}

double f1(std::span<const std::uint8_t> y, std::span<const std::uint8_t> yhat) {
  const auto c = confusion(y, yhat);
  const std::size_t den = 2 * c.tp + c.fp + c.fn;
  return den == 0 ? 0.0 : static_cast<double>(2 * c.tp) / static_cast<double>(den);
}

double mcc(std::span<const std::uint8_t> y, std::span<const std::uint8_t> yhat) {
  const auto c = confusion(y, yhat);
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
  const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (den == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(den);
}

double roc_auc(std::span<const std::uint8_t> y, std::span<const double> scores) {
  check_scores(y, scores);
  const std::size_t pos = count_positive(y);
  const std::size_t neg = y.size() - pos;
  if (pos == 0 || neg == 0) throw DataError("roc_auc needs both classes");

  // Walk groups of equal score from the lowest up; each positive beats every
  // negative strictly below it and ties with the negatives in its own group.
  auto idx = descending(scores);
  std::reverse(idx.begin(), idx.end());
  double concordant2 = 0.0;  // twice the statistic, kept integral
  std::size_t neg_below = 0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    std::size_t gp = 0, gn = 0;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      y[idx[j]] ? ++gp : ++gn;
      ++j;
    }
    concordant2 += static_cast<double>(gp) * static_cast<double>(2 * neg_below + gn);
    neg_below += gn;
    i = j;
  }
  return concordant2 / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

double pr_auc(std::span<const std::uint8_t> y, std::span<const double> scores) {
  check_scores(y, scores);
  const std::size_t pos = count_positive(y);
  if (pos == 0) throw DataError("pr_auc needs at least one positive");
  const auto idx = descending(scores);
  double ap = 0.0;
  std::size_t tp = 0, seen = 0, tp_prev = 0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      tp += y[idx[j]];
      ++j;
    }
    seen = j;
    if (tp > tp_prev) {
      const double recall_step =
          static_cast<double>(tp - tp_prev) / static_cast<double>(pos);
      ap += recall_step * static_cast<double>(tp) / static_cast<double>(seen);
    }
    tp_prev = tp;
    i = j;
  }
  return ap;
}

std::vector<std::uint8_t> threshold(std::span<const double> scores, double cut) {
  std::vector<std::uint8_t> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= cut ? 1 : 0;
  return out;
}

MetricsReport score(std::span<const std::uint8_t> y, std::span<const double> proba) {
  const auto yhat = threshold(proba);
  MetricsReport r;
  r.accuracy = accuracy(y, yhat);
  r.f1 = f1(y, yhat);
  r.mcc = mcc(y, yhat);
  r.roc_auc = roc_auc(y, proba);
  r.pr_auc = pr_auc(y, proba);
  return r;
}

double metric_value(const MetricsReport& r, std::string_view name) {
  if (name == "accuracy") return r.accuracy;
  if (name == "f1") return r.f1;
  if (name == "mcc") return r.mcc;
  if (name == "roc_auc") return r.roc_auc;
  if (name == "pr_auc") return r.pr_auc;
  throw UsageError("unknown metric '" + std::string(name) + "'");
}

}  // namespace cafegb::eval
