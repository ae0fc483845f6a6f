#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cafegb/matrix.hpp"

namespace cafegb::data {

using IndexList = std::vector<std::size_t>;

/// A missing input cell, kept so imputation can be redone from training rows.
struct MissingCell {
  std::size_t row;
  std::size_t col;
  friend bool operator==(const MissingCell&, const MissingCell&) = default;
};

/// Dense feature matrix with binary labels. Immutable once built; every
/// pipeline stage reads from one of these.
struct DatasetMatrix {
  Matrix values;
  std::vector<std::uint8_t> labels;
  std::vector<std::string> feature_names;
  std::vector<MissingCell> missing;

  std::size_t rows() const noexcept { return values.rows(); }
  std::size_t features() const noexcept { return values.cols(); }

  /// Throws DataError when a structural invariant is broken.
  void validate() const;
};

struct SplitSpec {
  IndexList train_indices;
  IndexList test_indices;
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
};

struct StandardScaler {
  std::vector<double> means;
  std::vector<double> scales;
};

struct SyntheticSpec {
  std::size_t n = 1000;
  std::size_t m = 50;
  std::size_t d_informative = 5;
  std::uint64_t seed = 42;
  double label_noise = 0.0;
  std::size_t duplicate_pairs = 0;
};

struct SyntheticData {
  DatasetMatrix dataset;
  IndexList planted;            // informative features, ascending
  std::vector<double> weights;  // generating weights over the first m columns
  std::vector<std::pair<std::size_t, std::size_t>> duplicates;  // (source, copy)
};

/// Reads a headered CSV. Empty cells are imputed with the per-feature median of
/// the present values over all rows; their positions are kept in `missing`.
DatasetMatrix load_csv(const std::filesystem::path& path, const std::string& label_column);

/// Writes a CSV that load_csv reads back bit-exactly (shortest round-trip reals).
/// The label column is appended last.
void write_csv(const DatasetMatrix& ds, const std::filesystem::path& path,
               const std::string& label_column = "label");

/// Binary columnar cache: "CAFE", version byte, little-endian u64 rows and
/// features, names, labels, then one contiguous f64 block per feature.
void write_cache(const DatasetMatrix& ds, const std::filesystem::path& path);
DatasetMatrix read_cache(const std::filesystem::path& path);

/// Re-imputes every recorded missing cell with the median over `rows`.
void impute_from_rows(DatasetMatrix& ds, const IndexList& rows);

SplitSpec stratified_split(const DatasetMatrix& ds, double test_fraction, std::uint64_t seed);

StandardScaler fit_scaler(const DatasetMatrix& ds, const IndexList& indices);
DatasetMatrix transform(const StandardScaler& scaler, const DatasetMatrix& ds);

/// Rows in the given order, all columns.
DatasetMatrix select_rows(const DatasetMatrix& ds, const IndexList& rows);
/// All rows, columns in the given order.
DatasetMatrix select_columns(const DatasetMatrix& ds, const IndexList& cols);

SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// "F1".."Fm".
std::vector<std::string> default_feature_names(std::size_t m);

}  // namespace cafegb::data
