#include <cmath>
#include <numeric>

#include "doctest.h"

#include "cafegb/analysis.hpp"
#include "cafegb/random.hpp"
#include "../oracles/oracles.hpp"

using namespace cafegb;
using namespace cafegb::analysis;

TEST_CASE("jaccard and stability") {
  CHECK(jaccard({1, 2, 3}, {1, 2, 3}) == 1.0);
  CHECK(jaccard({1, 2, 3}, {4, 5, 6}) == 0.0);
  CHECK(jaccard({1, 2, 3}, {2, 3, 4}) == 0.5);
  CHECK(jaccard({3, 1, 2, 2}, {2, 3, 4}) == 0.5);
  CHECK_THROWS_AS(jaccard({}, {}), UsageError);

  CHECK(stability(std::vector<IndexSet>(5, {1, 4, 9})) == 1.0);
  CHECK(stability({{1, 2}, {3, 4}}) == 0.0);
  CHECK(std::abs(stability({{1, 2}, {2, 3}, {1, 2}}) - 5.0 / 9.0) < 1e-15);
  CHECK_THROWS_AS(stability({{1}}), UsageError);
}

TEST_CASE("budget rule") {
  StabilityReport r;
  r.rows = {{50, 0.990, 0, 0.7}, {100, 0.9995, 0, 0.8}, {200, 1.0, 0, 0.6}, {300, 0.9992, 0, 0.8}};
  CHECK(select_budget(r, 0.001) == 100);
  CHECK(select_budget(r, 0.0) == 200);
  CHECK(select_budget(r, 1.0) == 100);
  StabilityReport one;
  one.rows = {{7, 0.5, 0, 0.1}};
  CHECK(select_budget(one, 0.001) == 7);
  CHECK_THROWS_AS(select_budget(StabilityReport{}, 0.001), UsageError);
}

TEST_CASE("kscan over the full feature set is perfectly stable") {
  data::SyntheticSpec spec;
  spec.n = 300;
  spec.m = 6;
  spec.d_informative = 2;
  const auto ds = data::generate_synthetic(spec).dataset;
  eval::ExperimentConfig cfg;
  cfg.cafegb.chunk_size = 100;
  cfg.cafegb.gbdt.num_rounds = 5;
  cfg.gbdt.num_rounds = 5;
  const auto res = kscan(ds, {6, 2}, {1, 2, 3}, cfg, eval::Classifier::kGbdt);
  REQUIRE(res.report.rows.size() == 2);
  CHECK(res.report.rows[0].k == 6);
  CHECK(res.report.rows[0].jaccard_stability == 1.0);
  CHECK(res.accuracy.size() == 3);
  CHECK(res.rankings.size() == 3);
  double mean = 0;
  for (const auto& a : res.accuracy) mean += a[1];
  CHECK(res.report.rows[1].accuracy_mean == doctest::Approx(mean / 3).epsilon(1e-14));
  CHECK_THROWS_AS(kscan(ds, {7}, {1}, cfg, eval::Classifier::kGbdt), UsageError);
}

TEST_CASE("pearson") {
  std::vector<double> x{1, 2, 4, 8}, neg{-1, -2, -4, -8}, flat{3, 3, 3, 3};
  CHECK(pearson(x, x).rho == 1.0);
  CHECK(pearson(x, neg).rho == -1.0);
  const auto d = pearson(x, flat);
  CHECK(d.rho == 0.0);
  CHECK(d.degenerate);
  CHECK(!pearson(x, neg).degenerate);
}

TEST_CASE("correlation stats match brute force") {
  Rng rng(31);
  const std::size_t n = 200, m = 40;
  Matrix X(n, m);
  std::vector<double> latent(n);
  for (auto& v : latent) v = rng.normal();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < m; ++j) {
      X(r, j) = (j % 3 == 0 ? 2 * latent[r] : 0.0) + rng.normal();
    }
  }
  for (int trial = 0; trial < 20; ++trial) {
    IndexSet subset;
    for (auto j : rng.permutation(m)) {
      if (subset.size() < 20) subset.push_back(j);
    }
    const auto rep = correlation_stats(X, subset, 0.6);
    double sum = 0, mx = 0;
    std::size_t strong = 0, pairs = 0;
    for (std::size_t a = 0; a < subset.size(); ++a) {
      for (std::size_t b = a + 1; b < subset.size(); ++b) {
        std::vector<double> u(n), v(n);
        for (std::size_t r = 0; r < n; ++r) {
          u[r] = X(r, subset[a]);
          v[r] = X(r, subset[b]);
        }
        const double rho = std::abs(oracle::pearson(u, v));
        sum += rho;
        mx = std::max(mx, rho);
        strong += rho > 0.6;
        ++pairs;
      }
    }
    CHECK(rep.pairs == 190);
    CHECK(pairs == 190);
    CHECK(std::abs(rep.mean_abs_rho - sum / 190) < 1e-12);
    CHECK(std::abs(rep.max_abs_rho - mx) < 1e-12);
    CHECK(rep.strong_pairs == strong);
    CHECK(rep.strong_pair_pct == doctest::Approx(100.0 * strong / 190).epsilon(1e-14));
  }
}

TEST_CASE("hand-built three-feature redundancy") {
  // a = (1,2,3), b = (1,2,3.5), c = (3,1,2)
  Matrix X(3, 3, std::vector<double>{1, 1, 3, 2, 2, 1, 3, 3.5, 2});
  const auto rep = correlation_stats(X, {0, 1, 2}, 0.8);
  // Centered: a = (-1,0,1); b = (-7/6,-1/6,4/3); c = (1,-1,0).
  const double sa = 2, sb = 49.0 / 36 + 1.0 / 36 + 64.0 / 36, sc = 2;
  const double r_ab = (7.0 / 6 + 4.0 / 3) / std::sqrt(sa * sb);
  const double r_ac = -1.0 / std::sqrt(sa * sc);
  const double r_bc = (-7.0 / 6 + 1.0 / 6) / std::sqrt(sb * sc);
  CHECK(rep.pairs == 3);
  CHECK(std::abs(rep.mean_abs_rho - (std::abs(r_ab) + std::abs(r_ac) + std::abs(r_bc)) / 3) < 1e-12);
  CHECK(std::abs(rep.max_abs_rho - std::abs(r_ab)) < 1e-12);
  CHECK(rep.strong_pairs == 1);
  CHECK(std::abs(rep.strong_pair_pct - 100.0 / 3) < 1e-12);
}

TEST_CASE("duplicate column is fully redundant") {
  Rng rng(2);
  Matrix X(500, 4);
  for (std::size_t r = 0; r < 500; ++r) {
    for (std::size_t j = 0; j < 3; ++j) X(r, j) = rng.normal() * 3 + 1;
    X(r, 3) = X(r, 1);
  }
  const auto rep = correlation_stats(X, {0, 1, 3}, 0.8);
  CHECK(rep.max_abs_rho == 1.0);
  CHECK(rep.strong_pairs == 1);
}

TEST_CASE("independent normals are weakly correlated") {
  Rng rng(17);
  Matrix X(10000, 20);
  for (auto& v : X.data()) v = rng.normal();
  IndexSet all(20);
  std::iota(all.begin(), all.end(), std::size_t{0});
  CHECK(correlation_stats(X, all, 0.8).mean_abs_rho < 0.05);
}

TEST_CASE("wilcoxon fixtures") {
  std::vector<double> base{0, 0, 0, 0, 0};
  const auto same = wilcoxon_signed_rank(base, std::vector<double>{-1, -2, -3, -4, -5});
  CHECK(same.method == WilcoxonMethod::kExact);
  CHECK(same.p_numerator == 2);
  CHECK(same.p_denominator == 32);
  CHECK(same.p_two_sided == 0.0625);

  const auto mixed = wilcoxon_signed_rank(base, std::vector<double>{1, 2, -3, 4, 5});
  CHECK(mixed.w_plus == 12);
  CHECK(mixed.p_numerator == 10);
  CHECK(mixed.p_two_sided == 0.3125);

  const auto single = wilcoxon_signed_rank(std::vector<double>{1, 1}, std::vector<double>{1, 2});
  CHECK(single.n_effective == 1);
  CHECK(single.p_two_sided == 1.0);

  CHECK_THROWS_AS(wilcoxon_signed_rank(base, std::vector<double>{1}), UsageError);
}

TEST_CASE("exact wilcoxon equals sign enumeration") {
  Rng rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(11);
    std::vector<double> a(n), b(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.normal();
      b[i] = a[i] + rng.normal() + (trial % 3 == 0 ? 0.8 : 0.0);
      d[i] = b[i] - a[i];
    }
    const auto res = wilcoxon_signed_rank(a, b);
    const auto ref = oracle::signed_rank_enumeration(d);
    REQUIRE(res.method == WilcoxonMethod::kExact);
    CHECK(res.w_plus == ref.w_plus);
    CHECK(res.p_denominator == ref.total);
    CHECK(res.p_numerator == std::min(ref.total, 2 * std::min(ref.le, ref.ge)));
    CHECK(res.p_two_sided ==
          static_cast<double>(res.p_numerator) / static_cast<double>(res.p_denominator));
  }
}

TEST_CASE("tied magnitudes stay exact") {
  Rng rng(202);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(11);
    std::vector<double> a(n, 0.0), b(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
      b[i] = static_cast<double>(static_cast<int>(rng.below(7)) - 3);
      d[i] = b[i];
    }
    const auto ref = oracle::signed_rank_enumeration(d);
    if (ref.total == 1) continue;
    const auto res = wilcoxon_signed_rank(a, b);
    REQUIRE(res.method == WilcoxonMethod::kExact);
    CHECK(res.w_plus == ref.w_plus);
    CHECK(res.p_numerator == std::min(ref.total, 2 * std::min(ref.le, ref.ge)));
  }
  // Five equal negative differences: still the minimum attainable p.
  const auto same = wilcoxon_signed_rank(std::vector<double>(5, 1.0), std::vector<double>(5, 0.5));
  CHECK(same.p_two_sided == 0.0625);
}

TEST_CASE("normal approximation beyond the exact range") {
  Rng rng(5);
  const std::size_t n = 40;
  std::vector<double> a(n), b(n), d(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rng.normal();
    b[i] = a[i] + rng.normal() + 0.3;
    d[i] = b[i] - a[i];
  }
  const auto res = wilcoxon_signed_rank(a, b);
  CHECK(res.method == WilcoxonMethod::kNormal);
  std::vector<double> mags;
  for (double v : d) mags.push_back(std::abs(v));
  double w = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] <= 0) continue;
    double r = 1;
    for (double m : mags) r += m < mags[i];
    w += r;
  }
  const double mu = n * (n + 1) / 4.0, sd = std::sqrt(n * (n + 1) * (2 * n + 1) / 24.0);
  CHECK(res.w_plus == w);
  CHECK(res.p_two_sided == doctest::Approx(std::erfc(std::abs(w - mu) / sd / std::sqrt(2.0))));

  CHECK(method_tag(res.method) == "normal-approx");
  CHECK(method_tag(WilcoxonMethod::kExact) == "exact");
}

TEST_CASE("t interval") {
  const auto [lo, hi] = t_interval95(std::vector<double>{1, 2, 3, 4, 5});
  const double half = 2.7764451051977987 * std::sqrt(2.5 / 5);
  CHECK(lo == doctest::Approx(3 - half).epsilon(1e-12));
  CHECK(hi == doctest::Approx(3 + half).epsilon(1e-12));
  const auto one = t_interval95(std::vector<double>{4});
  CHECK(one.first == 4);
  CHECK(one.second == 4);
}
