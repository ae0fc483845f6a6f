#include "cafegb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "cafegb/error.hpp"

namespace cafegb::analysis {

namespace {

IndexSet canonical(const IndexSet& s) {
  IndexSet out = s;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample standard deviation; 0 for fewer than two values.
double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

struct Centered {
  std::vector<double> values;
  double ss = 0.0;
};

Centered center(std::span<const double> x) {
  Centered c;
  const double mu = mean_of(x);
  c.values.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    c.values[i] = x[i] - mu;
    c.ss += c.values[i] * c.values[i];
  }
  return c;
}

Correlation correlate(const Centered& a, const Centered& b) {
  if (a.ss == 0.0 || b.ss == 0.0) return {0.0, true};
  double dot = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) dot += a.values[i] * b.values[i];
  return {std::clamp(dot / std::sqrt(a.ss * b.ss), -1.0, 1.0), false};
}

}  // namespace

double jaccard(const IndexSet& a, const IndexSet& b) {
  const auto x = canonical(a), y = canonical(b);
  if (x.empty() && y.empty()) throw UsageError("jaccard of two empty sets is undefined");
  IndexSet both;
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(both));
  const std::size_t uni = x.size() + y.size() - both.size();
  return static_cast<double>(both.size()) / static_cast<double>(uni);
}

double stability(const std::vector<IndexSet>& sets) {
  require(sets.size() >= 2, "stability needs at least two sets");
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      total += jaccard(sets[i], sets[j]);
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

KScanResult kscan(const data::DatasetMatrix& ds, const std::vector<std::size_t>& k_grid,
                  const std::vector<std::uint64_t>& seeds, const eval::ExperimentConfig& cfg,
                  eval::Classifier classifier) {
  require(!k_grid.empty(), "k grid is empty");
  require(!seeds.empty(), "kscan needs at least one seed");
  for (auto k : k_grid) {
    require(k >= 1 && k <= ds.features(),
            "k=" + std::to_string(k) + " outside [1, " + std::to_string(ds.features()) + "]");
  }
  KScanResult out;
  std::vector<std::vector<IndexSet>> sets(k_grid.size());
  for (const auto seed : seeds) {
    const auto ctx = eval::prepare_seed(ds, seed, cfg.test_fraction);
    auto ranking = eval::select_features(ctx, cfg);
    std::vector<double> acc;
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
      auto cols = selection::top_k(ranking, k_grid[i]);
      acc.push_back(eval::fit_and_score(ctx, cols, classifier, cfg).accuracy);
      sets[i].push_back(std::move(cols));
    }
    out.accuracy.push_back(std::move(acc));
    out.rankings.push_back(std::move(ranking));
  }
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    std::vector<double> acc;
    for (const auto& row : out.accuracy) acc.push_back(row[i]);
    StabilityRow r;
    r.k = k_grid[i];
    r.accuracy_mean = mean_of(acc);
    r.accuracy_std = sample_std(acc);
    r.jaccard_stability = sets[i].size() >= 2 ? stability(sets[i]) : 1.0;
    out.report.rows.push_back(r);
  }
  return out;
}

std::size_t select_budget(const StabilityReport& report, double delta) {
  require(!report.rows.empty(), "stability report is empty");
  require(delta >= 0.0, "delta must be nonnegative");
  double best_acc = report.rows.front().accuracy_mean;
  for (const auto& r : report.rows) best_acc = std::max(best_acc, r.accuracy_mean);
  // Absorb rounding in (max - delta) for values typed at five decimals.
  const double floor = best_acc - delta - 1e-12;
  const StabilityRow* pick = nullptr;
  for (const auto& r : report.rows) {
    if (r.accuracy_mean < floor) continue;
    if (!pick || r.jaccard_stability > pick->jaccard_stability ||
        (r.jaccard_stability == pick->jaccard_stability && r.k < pick->k)) {
      pick = &r;
    }
  }
  return pick->k;
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "pearson inputs differ in length");
  require(x.size() >= 2, "pearson needs at least two observations");
  return correlate(center(x), center(y));
}

RedundancyReport correlation_stats(const Matrix& X, const IndexSet& subset, double threshold) {
  const auto cols = canonical(subset);
  require(cols.size() >= 2, "correlation_stats needs at least two features");
  require(X.rows() >= 2, "correlation_stats needs at least two rows");
  for (auto c : cols) require(c < X.cols(), "feature index " + std::to_string(c) + " out of range");

  std::vector<Centered> centered;
  centered.reserve(cols.size());
  std::vector<double> column(X.rows());
  for (auto c : cols) {
    for (std::size_t r = 0; r < X.rows(); ++r) column[r] = X(r, c);
    centered.push_back(center(column));
  }
  RedundancyReport rep;
  rep.k = cols.size();
  rep.threshold = threshold;
  double total = 0.0;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    for (std::size_t j = i + 1; j < cols.size(); ++j) {
      const auto c = correlate(centered[i], centered[j]);
      const double a = std::abs(c.rho);
      ++rep.pairs;
      rep.degenerate_pairs += c.degenerate;
      total += a;
      rep.max_abs_rho = std::max(rep.max_abs_rho, a);
      rep.strong_pairs += a > threshold;
    }
  }
  rep.mean_abs_rho = total / static_cast<double>(rep.pairs);
  rep.strong_pair_pct = 100.0 * static_cast<double>(rep.strong_pairs) / static_cast<double>(rep.pairs);
  return rep;
}

std::pair<double, double> t_interval95(std::span<const double> values) {
  require(!values.empty(), "confidence interval of an empty sample");
  const double mu = mean_of(values);
  if (values.size() < 2) return {mu, mu};
  boost::math::students_t dist(static_cast<double>(values.size() - 1));
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  const double half = t * sample_std(values) / std::sqrt(static_cast<double>(values.size()));
  return {mu - half, mu + half};
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> baseline,
                                    std::span<const double> proposed) {
  require(baseline.size() == proposed.size(), "paired samples differ in length");
  require(baseline.size() >= 2, "wilcoxon needs at least two pairs");

  std::vector<double> diff;
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    const double d = proposed[i] - baseline[i];
    if (d != 0.0) diff.push_back(d);
  }
  if (diff.empty()) throw UsageError("all paired differences are zero");

  WilcoxonResult res;
  res.n_effective = diff.size();
  res.mean_baseline = mean_of(baseline);
  res.mean_proposed = mean_of(proposed);
  std::tie(res.ci_low, res.ci_high) = t_interval95(proposed);

  // Average ranks of |d|, kept doubled so tied ranks stay integral.
  const std::size_t n = diff.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(diff[a]) < std::abs(diff[b]); });
  std::vector<std::size_t> ranks2(n);
  std::vector<std::size_t> tie_sizes;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && std::abs(diff[idx[j]]) == std::abs(diff[idx[i]])) ++j;
    for (std::size_t t = i; t < j; ++t) ranks2[idx[t]] = i + 1 + j;
    if (j - i > 1) tie_sizes.push_back(j - i);
    i = j;
  }
  std::size_t w2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (diff[i] > 0) w2 += ranks2[i];
  }
  res.w_plus = static_cast<double>(w2) / 2.0;

  if (n <= kWilcoxonExactLimit) {
    // Count sign assignments by doubled W+; with ties this is the exact
    // conditional distribution given the observed midranks.
    const std::size_t max_w = n * (n + 1);
    std::vector<std::uint64_t> ways(max_w + 1, 0);
    ways[0] = 1;
    for (const auto r : ranks2) {
      for (std::size_t w = max_w; w >= r; --w) ways[w] += ways[w - r];
    }
    std::uint64_t at_most = 0, at_least = 0;
    for (std::size_t v = 0; v <= max_w; ++v) {
      if (v <= w2) at_most += ways[v];
      if (v >= w2) at_least += ways[v];
    }
    const std::uint64_t total = std::uint64_t{1} << n;
    res.method = WilcoxonMethod::kExact;
    res.p_denominator = total;
    res.p_numerator = std::min(total, 2 * std::min(at_most, at_least));
    res.p_two_sided = static_cast<double>(res.p_numerator) / static_cast<double>(total);
    return res;
  }

  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
  for (auto t : tie_sizes) {
    const double tt = static_cast<double>(t);
    var -= (tt * tt * tt - tt) / 48.0;
  }
  res.method = WilcoxonMethod::kNormal;
  if (var <= 0.0) {
    res.p_two_sided = 1.0;
    return res;
  }
  const double z = (res.w_plus - mean) / std::sqrt(var);
  res.p_two_sided = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
  return res;
}

std::string method_tag(WilcoxonMethod m) { return m == WilcoxonMethod::kExact ? "exact" : "normal-approx"; }

}  // namespace cafegb::analysis
