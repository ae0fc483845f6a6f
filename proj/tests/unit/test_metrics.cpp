#include <cmath>

#include "doctest.h"

#include "cafegb/metrics.hpp"
#include "cafegb/random.hpp"
#include "../oracles/oracles.hpp"

using namespace cafegb;
using namespace cafegb::eval;

using Labels = std::vector<std::uint8_t>;

TEST_CASE("confusion-matrix metrics") {
  const Labels y{1, 1, 0, 0, 1, 0};
  const Labels yhat{1, 0, 0, 1, 1, 0};
  const auto c = confusion(y, yhat);
  CHECK(c.tp == 2);
  CHECK(c.fn == 1);
  CHECK(c.fp == 1);
  CHECK(c.tn == 2);
  CHECK(accuracy(y, yhat) == doctest::Approx(4.0 / 6).epsilon(1e-15));
  CHECK(f1(y, yhat) == doctest::Approx(4.0 / 6).epsilon(1e-15));
  // (2*2 - 1*1) / sqrt(3*3*3*3)
  CHECK(std::abs(mcc(y, yhat) - 3.0 / 9.0) < 1e-12);
}

TEST_CASE("degenerate conventions") {
  const Labels y{1, 0, 1, 0};
  CHECK(accuracy(y, y) == 1.0);
  CHECK(f1(y, y) == 1.0);
  CHECK(mcc(y, y) == 1.0);
  CHECK(mcc(y, Labels{0, 1, 0, 1}) == -1.0);
  CHECK(mcc(y, Labels{1, 1, 1, 1}) == 0.0);
  CHECK(f1(Labels{0, 0}, Labels{0, 0}) == 0.0);
  CHECK_THROWS_AS(accuracy(y, Labels{1}), UsageError);
}

TEST_CASE("roc auc fixtures") {
  CHECK(roc_auc(Labels{0, 0, 1, 1}, std::vector<double>{0.1, 0.4, 0.35, 0.8}) == 0.75);
  CHECK(roc_auc(Labels{0, 0, 1, 1}, std::vector<double>{0.1, 0.2, 0.3, 0.4}) == 1.0);
  CHECK(roc_auc(Labels{0, 1, 0, 1}, std::vector<double>{0.5, 0.5, 0.5, 0.5}) == 0.5);
  CHECK_THROWS_AS(roc_auc(Labels{1, 1}, std::vector<double>{0.1, 0.2}), DataError);
}

TEST_CASE("average precision fixtures") {
  CHECK(std::abs(pr_auc(Labels{1, 0, 1}, std::vector<double>{0.9, 0.8, 0.7}) - 5.0 / 6.0) < 1e-12);
  CHECK(pr_auc(Labels{0, 0, 1, 1}, std::vector<double>{0.1, 0.2, 0.3, 0.4}) == 1.0);
  // One tie group holding everything: precision = prevalence.
  CHECK(pr_auc(Labels{0, 1, 0, 1}, std::vector<double>{0.5, 0.5, 0.5, 0.5}) == 0.5);

  Rng rng(5);
  Labels y(1000);
  std::vector<double> s(1000);
  for (std::size_t i = 0; i < 1000; ++i) {
    y[i] = i % 2;
    s[i] = rng.uniform();
  }
  CHECK(std::abs(pr_auc(y, s) - 0.5) < 0.1);
}

TEST_CASE("ranking metrics match pairwise oracles") {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(60);
    Labels y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.bernoulli(0.4);
      s[i] = static_cast<double>(rng.below(trial % 2 ? 5 : 1000)) / 8;
    }
    y[0] = 1;
    y[1] = 0;
    CHECK(std::abs(roc_auc(y, s) - oracle::auc_pairs(y, s)) < 1e-12);
    CHECK(std::abs(pr_auc(y, s) - oracle::average_precision(y, s)) < 1e-12);
  }
}

TEST_CASE("threshold and score") {
  CHECK(threshold(std::vector<double>{0.49, 0.5, 0.9}) == Labels{0, 1, 1});
  const auto r = score(Labels{0, 1, 1, 0}, std::vector<double>{0.2, 0.7, 0.4, 0.1});
  CHECK(r.accuracy == 0.75);
  CHECK(r.roc_auc == 1.0);
  CHECK(metric_value(r, "accuracy") == 0.75);
  CHECK(metric_value(r, "pr_auc") == r.pr_auc);
  CHECK_THROWS_AS(metric_value(r, "recall"), UsageError);
}
