// Copyright 2026 The dimred Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DIMRED_DATASET_H_
#define DIMRED_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dimred {

// Dense row-major matrix. Rows are samples, columns are features.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& operator()(int r, int c) { return data_[Index(r, c)]; }
  const T& operator()(int r, int c) const { return data_[Index(r, c)]; }

  std::span<const T> row(int r) const {
    return {data_.data() + Index(r, 0), static_cast<std::size_t>(cols_)};
  }
  std::span<T> row(int r) {
    return {data_.data() + Index(r, 0), static_cast<std::size_t>(cols_)};
  }

  Matrix Transposed() const {
    Matrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    }
    return t;
  }

  Matrix SelectRows(std::span<const int> rows) const {
    Matrix out(static_cast<int>(rows.size()), cols_);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto src = row(rows[i]);
      std::copy(src.begin(), src.end(), out.row(static_cast<int>(i)).begin());
    }
    return out;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t Index(int r, int c) const {
    return static_cast<std::size_t>(r) * cols_ + c;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

// Real-valued data as loaded from disk. `labels` is empty for unlabeled data
// (time series used for network recovery).
struct RawDataset {
  std::vector<std::string> features;
  Matrix<double> samples;
  std::vector<std::string> labels;

  int num_samples() const { return samples.rows(); }
  int num_features() const { return samples.cols(); }
  bool labeled() const { return !labels.empty(); }

  RawDataset SelectRows(std::span<const int> rows) const;

  bool operator==(const RawDataset&) const = default;
};

// Throws ConfigError unless the dataset is usable for classification:
// rectangular, >= 2 samples, >= 1 feature, one label per row, >= 2 classes.
void ValidateForClassification(const RawDataset& data);

enum class Orientation {
  kSamplesAsRows,   // header = feature names, one sample per line
  kFeaturesAsRows,  // first column = feature names, one feature per line
};

struct LoadOptions {
  // 0 means: tab for *.tsv / *.tab, comma otherwise.
  char delimiter = 0;
  Orientation orientation = Orientation::kSamplesAsRows;
  // Column holding the class label, by header name or 0-based index. For
  // features-as-rows files this names a row. Unset for unlabeled data.
  std::optional<std::variant<std::string, int>> label;
};

RawDataset ParseDelimited(std::string_view text, const LoadOptions& options);
RawDataset LoadDelimited(const std::filesystem::path& path,
                         const LoadOptions& options);

std::optional<Orientation> ParseOrientation(std::string_view name);

// Sign-split quantization. Each feature keeps the most negative and most
// positive value seen at fit time; the negative half is cut into `degree`
// equal-width bins, the positive half likewise, and zero gets the central
// level. Levels run 0..2*degree with zero at `degree`.
struct FeatureBounds {
  double min_negative = 0.0;  // <= 0
  double max_positive = 0.0;  // >= 0

  bool operator==(const FeatureBounds&) const = default;
};

struct QuantizationSpec {
  int degree = 1;
  std::vector<std::string> features;
  std::vector<FeatureBounds> bounds;

  int levels() const { return 2 * degree + 1; }

  bool operator==(const QuantizationSpec&) const = default;
};

QuantizationSpec FitQuantizer(const RawDataset& data, int degree);

// Level of a single value; values beyond the fitted extremes clamp.
int QuantizeValue(double value, const FeatureBounds& bounds, int degree);

class QuantizedDataset;
QuantizedDataset Quantize(const RawDataset& data, const QuantizationSpec& spec);

// Discrete data with per-feature alphabets and class indices 0..c-1.
// Immutable once constructed; the constructor enforces the invariants.
class QuantizedDataset {
 public:
  QuantizedDataset() = default;
  QuantizedDataset(std::vector<std::string> features, Matrix<int> samples,
                   std::vector<int> alphabet_sizes, std::vector<int> labels,
                   std::vector<std::string> class_names);

  // Builds a dataset from raw values that are already non-negative integers;
  // each alphabet is max(value)+1 (at least 2).
  static QuantizedDataset FromIntegerData(const RawDataset& data);

  int num_samples() const { return samples_.rows(); }
  int num_features() const { return samples_.cols(); }
  int class_count() const { return static_cast<int>(class_names_.size()); }

  int value(int sample, int feature) const { return samples_(sample, feature); }
  std::span<const int> sample(int i) const { return samples_.row(i); }
  int label(int sample) const { return labels_[sample]; }

  const std::vector<std::string>& features() const { return features_; }
  const Matrix<int>& samples() const { return samples_; }
  const std::vector<int>& alphabet_sizes() const { return alphabet_sizes_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::string>& class_names() const { return class_names_; }

  QuantizedDataset SelectRows(std::span<const int> rows) const;

  bool operator==(const QuantizedDataset&) const = default;

 private:
  std::vector<std::string> features_;
  Matrix<int> samples_;
  std::vector<int> alphabet_sizes_;
  std::vector<int> labels_;
  std::vector<std::string> class_names_;
};

// Maps string labels onto sorted class indices.
struct LabelEncoding {
  std::vector<int> indices;
  std::vector<std::string> names;
};
LabelEncoding EncodeLabels(const std::vector<std::string>& labels);

// Mutually exclusive train/test partition of row indices, both ascending.
struct SplitIndices {
  std::vector<int> train;
  std::vector<int> test;
};

// floor(n * fraction) clamped to [1, n-1].
int TrainSize(int n, double train_fraction);

// Seeded holdout partition. Stratified by class when every class has at
// least two samples, plain random otherwise.
SplitIndices SplitRows(std::span<const int> labels, double train_fraction,
                       std::uint64_t seed);

struct Split {
  QuantizedDataset train;
  QuantizedDataset test;
  SplitIndices rows;
};

Split SplitDataset(const QuantizedDataset& data, double train_fraction,
                   std::uint64_t seed);

}  // namespace dimred

#endif  // DIMRED_DATASET_H_
