#include "cafegb/data.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "cafegb/format.hpp"
#include "cafegb/random.hpp"

namespace cafegb::data {

namespace {

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

double median_of(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return lower + (upper - lower) / 2.0;
}

// Fills missing cells per column with the median of present values in `rows`.
void impute(DatasetMatrix& ds, const IndexList* rows) {
  if (ds.missing.empty()) return;
  std::map<std::size_t, std::vector<std::size_t>> by_col;
  for (const auto& cell : ds.missing) by_col[cell.col].push_back(cell.row);

  for (const auto& [col, missing_rows] : by_col) {
    std::unordered_set<std::size_t> skip(missing_rows.begin(), missing_rows.end());
    std::vector<double> present;
    auto consider = [&](std::size_t r) {
      if (!skip.contains(r)) present.push_back(ds.values(r, col));
    };
    if (rows != nullptr) {
      for (std::size_t r : *rows) consider(r);
    } else {
      for (std::size_t r = 0; r < ds.rows(); ++r) consider(r);
    }
    if (present.empty()) {
      throw DataError("column '" + ds.feature_names[col] +
                      "' has no present values to impute from");
    }
    const double fill = median_of(present);
    for (std::size_t r : missing_rows) ds.values(r, col) = fill;
  }
}

template <typename T>
void put(std::ostream& os, T value) {
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    os.write(bytes.data(), sizeof(T));
  } else {
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }
}

template <typename T>
T get(std::istream& is) {
  std::array<char, sizeof(T)> bytes{};
  if (!is.read(bytes.data(), sizeof(T))) throw DataError("truncated cache file");
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    std::reverse(bytes.begin(), bytes.end());
  }
  return std::bit_cast<T>(bytes);
}

constexpr char kCacheMagic[4] = {'C', 'A', 'F', 'E'};
constexpr std::uint8_t kCacheVersion = 1;

}  // namespace

void DatasetMatrix::validate() const {
  if (labels.size() != values.rows()) throw DataError("label count does not match row count");
  if (feature_names.size() != values.cols()) {
    throw DataError("feature name count does not match column count");
  }
  for (auto y : labels) {
    if (y > 1) throw DataError("non-binary label");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& name : feature_names) {
    if (!seen.insert(name).second) throw DataError("duplicate feature name '" + name + "'");
  }
  for (double v : values.data()) {
    if (!std::isfinite(v)) throw DataError("non-finite value in feature matrix");
  }
}

DatasetMatrix load_csv(const std::filesystem::path& path, const std::string& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) {
    throw DataError("empty file '" + path.string() + "'");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_line(line);
  std::size_t label_pos = header.size();
  DatasetMatrix ds;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto name = trim(header[c]);
    if (name == label_column) {
      label_pos = c;
    } else {
      ds.feature_names.emplace_back(name);
    }
  }
  if (label_pos == header.size()) {
    throw DataError("missing label column '" + label_column + "'");
  }

  const std::size_t m = ds.feature_names.size();
  std::vector<double> values;
  std::size_t row = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " cells, found " +
                      std::to_string(cells.size()));
    }
    std::size_t col = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto cell = trim(cells[c]);
      if (c == label_pos) {
        double y = 0.0;
        if (!parse_double(cell, y) || (y != 0.0 && y != 1.0)) {
          throw DataError("line " + std::to_string(line_no) + ": non-binary label '" +
                          std::string(cell) + "'");
        }
        ds.labels.push_back(static_cast<std::uint8_t>(y));
        continue;
      }
      double v = 0.0;
      if (cell.empty()) {
        ds.missing.push_back({row, col});
      } else if (!parse_double(cell, v)) {
        throw DataError("line " + std::to_string(line_no) + ": unparseable cell '" +
                        std::string(cell) + "' in column '" + ds.feature_names[col] + "'");
      }
      values.push_back(v);
      ++col;
    }
    ++row;
  }
  if (row == 0) throw DataError("no data rows in '" + path.string() + "'");

  ds.values = Matrix(row, m, std::move(values));
  impute(ds, nullptr);
  ds.validate();
  return ds;
}

void write_csv(const DatasetMatrix& ds, const std::filesystem::path& path,
               const std::string& label_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  for (const auto& name : ds.feature_names) out << name << ',';
  out << label_column << '\n';
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    for (double v : ds.values.row(r)) out << format_double(v) << ',';
    out << static_cast<int>(ds.labels[r]) << '\n';
  }
}

void write_cache(const DatasetMatrix& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.write(kCacheMagic, 4);
  put<std::uint8_t>(out, kCacheVersion);
  put<std::uint64_t>(out, ds.rows());
  put<std::uint64_t>(out, ds.features());
  for (const auto& name : ds.feature_names) {
    put<std::uint64_t>(out, name.size());
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  for (auto y : ds.labels) put<std::uint8_t>(out, y);
  put<std::uint64_t>(out, ds.missing.size());
  for (const auto& cell : ds.missing) {
    put<std::uint64_t>(out, cell.row);
    put<std::uint64_t>(out, cell.col);
  }
  for (std::size_t c = 0; c < ds.features(); ++c) {
    for (std::size_t r = 0; r < ds.rows(); ++r) put<double>(out, ds.values(r, c));
  }
}

DatasetMatrix read_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kCacheMagic, 4) != 0) {
    throw DataError("'" + path.string() + "' is not a dataset cache");
  }
  if (get<std::uint8_t>(in) != kCacheVersion) throw DataError("unsupported cache version");
  const auto rows = get<std::uint64_t>(in);
  const auto cols = get<std::uint64_t>(in);
  DatasetMatrix ds;
  for (std::uint64_t c = 0; c < cols; ++c) {
    const auto len = get<std::uint64_t>(in);
    std::string name(len, '\0');
    if (!in.read(name.data(), static_cast<std::streamsize>(len))) {
      throw DataError("truncated cache file");
    }
    ds.feature_names.push_back(std::move(name));
  }
  ds.labels.resize(rows);
  for (auto& y : ds.labels) y = get<std::uint8_t>(in);
  const auto n_missing = get<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < n_missing; ++i) {
    const auto r = get<std::uint64_t>(in);
    const auto c = get<std::uint64_t>(in);
    ds.missing.push_back({r, c});
  }
  ds.values = Matrix(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) ds.values(r, c) = get<double>(in);
  }
  ds.validate();
  return ds;
}

void impute_from_rows(DatasetMatrix& ds, const IndexList& rows) { impute(ds, &rows); }

SplitSpec stratified_split(const DatasetMatrix& ds, double test_fraction, std::uint64_t seed) {
  require(test_fraction > 0.0 && test_fraction < 1.0, "test_fraction must lie in (0, 1)");
  IndexList by_class[2];
  for (std::size_t r = 0; r < ds.rows(); ++r) by_class[ds.labels[r]].push_back(r);
  if (by_class[0].empty() || by_class[1].empty()) {
    throw DataError("stratified split needs both classes; dataset is single-class");
  }

  SplitSpec split;
  split.seed = seed;
  split.test_fraction = test_fraction;
  for (int cls = 0; cls < 2; ++cls) {
    auto rng = Rng::derive(seed, 100 + static_cast<std::uint64_t>(cls));
    auto& idx = by_class[cls];
    rng.shuffle(std::span<std::size_t>(idx));
    const auto n_test = static_cast<std::size_t>(
        std::floor(test_fraction * static_cast<double>(idx.size())));
    split.test_indices.insert(split.test_indices.end(), idx.begin(), idx.begin() + n_test);
    split.train_indices.insert(split.train_indices.end(), idx.begin() + n_test, idx.end());
  }
  std::sort(split.train_indices.begin(), split.train_indices.end());
  std::sort(split.test_indices.begin(), split.test_indices.end());
  return split;
}

StandardScaler fit_scaler(const DatasetMatrix& ds, const IndexList& indices) {
  require(!indices.empty(), "fit_scaler needs a nonempty index set");
  const std::size_t m = ds.features();
  StandardScaler s;
  s.means.assign(m, 0.0);
  s.scales.assign(m, 0.0);
  for (std::size_t r : indices) {
    const auto row = ds.values.row(r);
    for (std::size_t j = 0; j < m; ++j) s.means[j] += row[j];
  }
  const double n = static_cast<double>(indices.size());
  for (auto& mean : s.means) mean /= n;
  for (std::size_t r : indices) {
    const auto row = ds.values.row(r);
    for (std::size_t j = 0; j < m; ++j) {
      const double d = row[j] - s.means[j];
      s.scales[j] += d * d;
    }
  }
  for (auto& scale : s.scales) {
    scale = std::sqrt(scale / n);
    if (!(scale > 0.0)) scale = 1.0;
  }
  return s;
}

DatasetMatrix transform(const StandardScaler& scaler, const DatasetMatrix& ds) {
  if (scaler.means.size() != ds.features()) {
    throw UsageError("scaler dimension " + std::to_string(scaler.means.size()) +
                     " does not match dataset features " + std::to_string(ds.features()));
  }
  DatasetMatrix out = ds;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.values.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) {
      row[j] = (row[j] - scaler.means[j]) / scaler.scales[j];
    }
  }
  return out;
}

DatasetMatrix select_rows(const DatasetMatrix& ds, const IndexList& rows) {
  DatasetMatrix out;
  out.feature_names = ds.feature_names;
  out.values = Matrix(rows.size(), ds.features());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = ds.values.row(rows[i]);
    std::copy(src.begin(), src.end(), out.values.row(i).begin());
    out.labels.push_back(ds.labels[rows[i]]);
  }
  return out;
}

DatasetMatrix select_columns(const DatasetMatrix& ds, const IndexList& cols) {
  DatasetMatrix out;
  out.labels = ds.labels;
  out.values = Matrix(ds.rows(), cols.size());
  for (std::size_t c : cols) {
    if (c >= ds.features()) throw UsageError("column index out of range");
    out.feature_names.push_back(ds.feature_names[c]);
  }
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    const auto src = ds.values.row(r);
    auto dst = out.values.row(r);
    for (std::size_t i = 0; i < cols.size(); ++i) dst[i] = src[cols[i]];
  }
  return out;
}

std::vector<std::string> default_feature_names(std::size_t m) {
  std::vector<std::string> names;
  names.reserve(m);
  for (std::size_t j = 0; j < m; ++j) names.push_back("F" + std::to_string(j + 1));
  return names;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  require(spec.n >= 1 && spec.m >= 1, "synthetic spec needs n >= 1 and m >= 1");
  require(spec.d_informative <= spec.m, "d_informative must not exceed m");
  require(spec.duplicate_pairs <= spec.m - spec.d_informative,
          "duplicate_pairs must not exceed m - d_informative");
  require(spec.label_noise >= 0.0 && spec.label_noise < 0.5, "label_noise must lie in [0, 0.5)");

  const std::size_t total = spec.m + spec.duplicate_pairs;
  auto feature_rng = Rng::derive(spec.seed, 1);
  auto design_rng = Rng::derive(spec.seed, 2);
  auto label_rng = Rng::derive(spec.seed, 3);

  SyntheticData out;
  auto perm = design_rng.permutation(spec.m);
  out.planted.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(spec.d_informative));
  std::sort(out.planted.begin(), out.planted.end());

  out.weights.assign(spec.m, 0.0);
  for (std::size_t j : out.planted) {
    const double magnitude = design_rng.uniform(0.5, 2.0);
    out.weights[j] = design_rng.bernoulli(0.5) ? magnitude : -magnitude;
  }

  IndexList sources(perm.begin() + static_cast<std::ptrdiff_t>(spec.d_informative), perm.end());
  design_rng.shuffle(std::span<std::size_t>(sources));
  for (std::size_t k = 0; k < spec.duplicate_pairs; ++k) {
    out.duplicates.emplace_back(sources[k], spec.m + k);
  }

  auto& ds = out.dataset;
  ds.feature_names = default_feature_names(total);
  ds.values = Matrix(spec.n, total);
  ds.labels.resize(spec.n);
  for (std::size_t r = 0; r < spec.n; ++r) {
    auto row = ds.values.row(r);
    double margin = 0.0;
    for (std::size_t j = 0; j < spec.m; ++j) {
      row[j] = feature_rng.normal();
      margin += out.weights[j] * row[j];
    }
    for (const auto& [src, dst] : out.duplicates) row[dst] = row[src];
    const double p = 1.0 / (1.0 + std::exp(-margin));
    bool y = label_rng.uniform() < p;
    if (label_rng.uniform() < spec.label_noise) y = !y;
    ds.labels[r] = y ? 1 : 0;
  }
  return out;
}

}  // namespace cafegb::data
