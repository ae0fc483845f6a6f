#include <cmath>
#include <set>

#include "doctest.h"

#include "cafegb/analysis.hpp"
#include "cafegb/data.hpp"
#include "cafegb/logreg.hpp"
#include "../oracles/oracles.hpp"
#include "../support.hpp"

using namespace cafegb;
using cafegb::data::DatasetMatrix;

namespace {

DatasetMatrix labelled(std::vector<std::uint8_t> labels) {
  DatasetMatrix ds;
  ds.values = Matrix(labels.size(), 1);
  for (std::size_t i = 0; i < labels.size(); ++i) ds.values(i, 0) = static_cast<double>(i);
  ds.labels = std::move(labels);
  ds.feature_names = {"x"};
  return ds;
}

}  // namespace

TEST_CASE("load_csv parses a small file") {
  testing::TempDir dir;
  testing::write_file(dir / "a.csv", "a,b,label\n1,2,0\n3,4,1\n5,6,1\n");
  const auto ds = data::load_csv(dir / "a.csv", "label");
  CHECK(ds.rows() == 3);
  CHECK(ds.features() == 2);
  CHECK(ds.labels == std::vector<std::uint8_t>{0, 1, 1});
  CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(ds.values(2, 1) == 6.0);
  CHECK(ds.missing.empty());
}

TEST_CASE("load_csv accepts the label column anywhere") {
  testing::TempDir dir;
  testing::write_file(dir / "a.csv", "y,a\n1,0.5\n0,-2\n");
  const auto ds = data::load_csv(dir / "a.csv", "y");
  CHECK(ds.labels == std::vector<std::uint8_t>{1, 0});
  CHECK(ds.values(1, 0) == -2.0);
}

TEST_CASE("load_csv rejects bad input") {
  testing::TempDir dir;
  testing::write_file(dir / "bad.csv", "a,label\n1,2\n");
  CHECK_THROWS_WITH_AS(data::load_csv(dir / "bad.csv", "label"),
                       doctest::Contains("non-binary label"), DataError);
  testing::write_file(dir / "nolabel.csv", "a,b\n1,2\n");
  CHECK_THROWS_AS(data::load_csv(dir / "nolabel.csv", "label"), DataError);
  testing::write_file(dir / "ragged.csv", "a,b,label\n1,2,0\n1,0\n");
  CHECK_THROWS_AS(data::load_csv(dir / "ragged.csv", "label"), DataError);
  testing::write_file(dir / "text.csv", "a,label\nfoo,0\n");
  CHECK_THROWS_AS(data::load_csv(dir / "text.csv", "label"), DataError);
  CHECK_THROWS_AS(data::load_csv(dir / "absent.csv", "label"), DataError);
}

TEST_CASE("empty cells take the median of present values") {
  testing::TempDir dir;
  testing::write_file(dir / "m.csv", "a,b,label\n1,1,0\n,2,1\n7,3,0\n4,4,1\n");
  auto ds = data::load_csv(dir / "m.csv", "label");
  REQUIRE(ds.missing.size() == 1);
  CHECK(ds.missing[0] == data::MissingCell{1, 0});
  // present values 1, 7, 4 -> median 4
  CHECK(ds.values(1, 0) == 4.0);
  // training rows {0, 2}: median of 1 and 7
  data::impute_from_rows(ds, {0, 2});
  CHECK(ds.values(1, 0) == 4.0);
  data::impute_from_rows(ds, {0, 3});
  CHECK(ds.values(1, 0) == 2.5);
}

TEST_CASE("csv and cache round trips are bit-exact") {
  testing::TempDir dir;
  data::SyntheticSpec spec;
  spec.n = 57;
  spec.m = 9;
  spec.d_informative = 3;
  auto ds = data::generate_synthetic(spec).dataset;
  ds.values(0, 0) = 0.1;
  ds.values(1, 1) = -1e-300;
  ds.values(2, 2) = 1.0 / 3.0;
  data::write_csv(ds, dir / "r.csv");
  const auto back = data::load_csv(dir / "r.csv", "label");
  CHECK(back.values == ds.values);
  CHECK(back.labels == ds.labels);
  CHECK(back.feature_names == ds.feature_names);

  data::write_cache(ds, dir / "r.cafe");
  const auto cached = data::read_cache(dir / "r.cafe");
  CHECK(cached.values == ds.values);
  CHECK(cached.labels == ds.labels);
  CHECK(cached.feature_names == ds.feature_names);

  testing::write_file(dir / "junk.cafe", "nope");
  CHECK_THROWS_AS(data::read_cache(dir / "junk.cafe"), DataError);
  auto bytes = testing::read_file(dir / "r.cafe");
  testing::write_file(dir / "short.cafe", bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(data::read_cache(dir / "short.cafe"), DataError);
}

TEST_CASE("stratified split sizes") {
  std::vector<std::uint8_t> y(10, 0);
  for (int i = 0; i < 5; ++i) y[static_cast<std::size_t>(i)] = 1;
  const auto ds = labelled(y);
  for (std::uint64_t seed : {1, 2, 3, 99}) {
    const auto s = data::stratified_split(ds, 0.2, seed);
    REQUIRE(s.test_indices.size() == 2);
    CHECK(ds.labels[s.test_indices[0]] + ds.labels[s.test_indices[1]] == 1);
    CHECK(s.train_indices.size() == 8);
  }

  const auto a = data::stratified_split(ds, 0.2, 7);
  const auto b = data::stratified_split(ds, 0.2, 7);
  CHECK(a.train_indices == b.train_indices);
  CHECK(a.test_indices == b.test_indices);

  std::vector<std::uint8_t> y2(100, 0);
  for (int i = 0; i < 30; ++i) y2[static_cast<std::size_t>(i * 3)] = 1;
  const auto ds2 = labelled(y2);
  const auto s = data::stratified_split(ds2, 0.2, 42);
  std::size_t pos = 0;
  for (auto i : s.test_indices) pos += ds2.labels[i];
  CHECK(s.test_indices.size() == 20);
  CHECK(pos == 6);

  std::set<std::size_t> all(s.train_indices.begin(), s.train_indices.end());
  for (auto i : s.test_indices) CHECK(all.insert(i).second);
  CHECK(all.size() == 100);

  CHECK_THROWS_AS(data::stratified_split(labelled({1, 1, 1}), 0.2, 1), DataError);
  CHECK_THROWS_AS(data::stratified_split(ds, 0.0, 1), UsageError);
}

TEST_CASE("scaler statistics") {
  DatasetMatrix ds;
  ds.values = Matrix(3, 2, std::vector<double>{1, 5, 2, 5, 3, 5});
  ds.labels = {0, 1, 0};
  ds.feature_names = {"a", "b"};
  const auto sc = data::fit_scaler(ds, {0, 1, 2});
  CHECK(sc.means[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sc.scales[0] == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
  CHECK(sc.means[1] == 5.0);
  CHECK(sc.scales[1] == 1.0);

  const auto t = data::transform(sc, ds);
  CHECK(t.values(1, 0) == doctest::Approx(0.0));
  CHECK(t.values(0, 1) == 0.0);

  data::StandardScaler unit{{2}, {1}};
  DatasetMatrix one;
  one.values = Matrix(1, 1, std::vector<double>{2});
  one.labels = {0};
  one.feature_names = {"a"};
  CHECK(data::transform(unit, one).values(0, 0) == 0.0);
  data::StandardScaler half{{0}, {2}};
  one.values(0, 0) = 4;
  CHECK(data::transform(half, one).values(0, 0) == 2.0);
}

TEST_CASE("row and column selection") {
  DatasetMatrix ds;
  ds.values = Matrix(3, 3, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9});
  ds.labels = {0, 1, 1};
  ds.feature_names = {"a", "b", "c"};
  const auto r = data::select_rows(ds, {2, 0});
  CHECK(r.values == Matrix(2, 3, std::vector<double>{7, 8, 9, 1, 2, 3}));
  CHECK(r.labels == std::vector<std::uint8_t>{1, 0});
  const auto c = data::select_columns(ds, {2, 0});
  CHECK(c.values == Matrix(3, 2, std::vector<double>{3, 1, 6, 4, 9, 7}));
  CHECK(c.feature_names == std::vector<std::string>{"c", "a"});
  CHECK_THROWS_AS(data::select_columns(ds, {3}), UsageError);
}

TEST_CASE("synthetic generator") {
  data::SyntheticSpec spec;
  spec.n = 1000;
  spec.m = 10;
  spec.d_informative = 10;
  const auto all = data::generate_synthetic(spec);
  CHECK(all.planted.size() == 10);
  for (std::size_t j = 0; j < 10; ++j) CHECK(all.planted[j] == j);

  spec.d_informative = 3;
  spec.duplicate_pairs = 1;
  const auto dup = data::generate_synthetic(spec);
  REQUIRE(dup.dataset.features() == 11);
  std::size_t perfect = 0;
  for (std::size_t a = 0; a < 11; ++a) {
    for (std::size_t b = a + 1; b < 11; ++b) {
      std::vector<double> x, y;
      for (std::size_t r = 0; r < spec.n; ++r) {
        x.push_back(dup.dataset.values(r, a));
        y.push_back(dup.dataset.values(r, b));
      }
      if (std::abs(oracle::pearson(x, y)) > 1 - 1e-12) ++perfect;
    }
  }
  CHECK(perfect == 1);
  for (auto j : dup.planted) CHECK(j != dup.duplicates[0].first);

  const auto again = data::generate_synthetic(spec);
  CHECK(again.dataset.values == dup.dataset.values);
  CHECK(again.dataset.labels == dup.dataset.labels);

  spec.d_informative = 20;
  CHECK_THROWS_AS(data::generate_synthetic(spec), UsageError);
}

TEST_CASE("synthetic labels follow the planted logistic model") {
  data::SyntheticSpec spec;
  spec.n = 20000;
  spec.m = 12;
  spec.d_informative = 4;
  spec.seed = 5;
  const auto syn = data::generate_synthetic(spec);
  const auto& ds = syn.dataset;

  std::size_t nonzero = 0;
  for (std::size_t j = 0; j < spec.m; ++j) {
    const bool planted = std::binary_search(syn.planted.begin(), syn.planted.end(), j);
    CHECK((syn.weights[j] != 0.0) == planted);
    nonzero += syn.weights[j] != 0.0;
    if (planted) {
      CHECK(std::abs(syn.weights[j]) >= 0.5);
      CHECK(std::abs(syn.weights[j]) <= 2.0);
    }
  }
  CHECK(nonzero == 4);

  // Calibration: bucket rows by the true probability and compare label rates.
  std::vector<double> sum_p(5, 0.0), sum_y(5, 0.0), cnt(5, 0.0);
  for (std::size_t r = 0; r < spec.n; ++r) {
    double margin = 0;
    for (std::size_t j = 0; j < spec.m; ++j) margin += syn.weights[j] * ds.values(r, j);
    const double p = 1 / (1 + std::exp(-margin));
    const auto b = std::min<std::size_t>(4, static_cast<std::size_t>(p * 5));
    sum_p[b] += p;
    sum_y[b] += ds.labels[r];
    cnt[b] += 1;
  }
  for (std::size_t b = 0; b < 5; ++b) {
    REQUIRE(cnt[b] > 500);
    CHECK(std::abs(sum_y[b] / cnt[b] - sum_p[b] / cnt[b]) < 0.03);
  }

  // A fitted linear model recovers the planted signs and leaves the rest near 0.
  const auto model = eval::train_logreg(ds.values, ds.labels, {});
  for (std::size_t j = 0; j < spec.m; ++j) {
    if (syn.weights[j] != 0.0) {
      CHECK(model.weights[j] * syn.weights[j] > 0);
      CHECK(std::abs(model.weights[j] - syn.weights[j]) < 0.15);
    } else {
      CHECK(std::abs(model.weights[j]) < 0.1);
    }
  }

  spec.label_noise = 0.2;
  const auto noisy = data::generate_synthetic(spec);
  std::size_t flipped = 0;
  for (std::size_t r = 0; r < spec.n; ++r) flipped += noisy.dataset.labels[r] != ds.labels[r];
  // A flip changes the label only when the draws differ; roughly 20% of rows.
  CHECK(flipped > 3600);
  CHECK(flipped < 4400);
}
