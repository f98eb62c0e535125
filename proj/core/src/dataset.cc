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

#include "dimred/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "dimred/error.h"
#include "dimred/random.h"

namespace dimred {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  s = s.substr(first, last - first + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

struct GridRow {
  int line = 0;
  std::vector<std::string> cells;
};

std::vector<GridRow> ReadGrid(std::string_view text, char delimiter) {
  std::vector<GridRow> grid;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty()) continue;

    GridRow row{line_no, {}};
    std::size_t start = 0;
    while (true) {
      const auto cut = line.find(delimiter, start);
      row.cells.emplace_back(Trim(line.substr(start, cut - start)));
      if (cut == std::string_view::npos) break;
      start = cut + 1;
    }
    if (!grid.empty() && row.cells.size() != grid.front().cells.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(grid.front().cells.size()) +
                           " cells, found " + std::to_string(row.cells.size()),
                       line_no);
    }
    grid.push_back(std::move(row));
  }
  return grid;
}

double ParseNumber(const std::string& cell, int line) {
  if (cell.empty()) {
    throw ParseError("line " + std::to_string(line) + ": missing value", line);
  }
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (*begin == '+') ++begin;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line) + ": non-numeric cell '" +
                         cell + "'",
                     line);
  }
  return value;
}

// A column of the logical (samples-as-rows) table: its name plus, per
// sample, the raw cell and the input line it came from.
struct Column {
  std::string name;
  std::vector<const std::string*> cells;
  std::vector<int> lines;
};

}  // namespace

RawDataset RawDataset::SelectRows(std::span<const int> rows) const {
  RawDataset out;
  out.features = features;
  out.samples = samples.SelectRows(rows);
  if (labeled()) {
    out.labels.reserve(rows.size());
    for (int r : rows) out.labels.push_back(labels[r]);
  }
  return out;
}

void ValidateForClassification(const RawDataset& data) {
  if (data.num_samples() < 2) {
    throw ConfigError("dataset", "at least 2 samples are required");
  }
  if (data.num_features() < 1) {
    throw ConfigError("dataset", "at least 1 feature is required");
  }
  if (static_cast<int>(data.labels.size()) != data.num_samples()) {
    throw ConfigError("dataset", "every sample needs exactly one label");
  }
  const std::set<std::string> distinct(data.labels.begin(), data.labels.end());
  if (distinct.size() < 2) {
    throw ConfigError("dataset", "at least 2 distinct labels are required");
  }
}

std::optional<Orientation> ParseOrientation(std::string_view name) {
  if (name == "samples-rows") return Orientation::kSamplesAsRows;
  if (name == "features-rows") return Orientation::kFeaturesAsRows;
  return std::nullopt;
}

RawDataset ParseDelimited(std::string_view text, const LoadOptions& options) {
  const char delimiter = options.delimiter != 0 ? options.delimiter : ',';
  const std::vector<GridRow> grid = ReadGrid(text, delimiter);
  if (grid.empty()) throw ParseError("input is empty", 0);

  std::vector<Column> columns;
  if (options.orientation == Orientation::kSamplesAsRows) {
    const auto& header = grid.front().cells;
    columns.resize(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
      columns[c].name = header[c];
      for (std::size_t r = 1; r < grid.size(); ++r) {
        columns[c].cells.push_back(&grid[r].cells[c]);
        columns[c].lines.push_back(grid[r].line);
      }
    }
  } else {
    // First header cell is a corner label; the rest name samples.
    for (std::size_t r = 1; r < grid.size(); ++r) {
      Column column;
      column.name = grid[r].cells.front();
      for (std::size_t c = 1; c < grid[r].cells.size(); ++c) {
        column.cells.push_back(&grid[r].cells[c]);
        column.lines.push_back(grid[r].line);
      }
      columns.push_back(std::move(column));
    }
  }

  std::optional<std::size_t> label_column;
  if (options.label) {
    if (const auto* name = std::get_if<std::string>(&*options.label)) {
      const auto it = std::find_if(columns.begin(), columns.end(),
                                   [&](const Column& c) { return c.name == *name; });
      if (it == columns.end()) {
        throw ConfigError("dataset", "label column '" + *name + "' not found");
      }
      label_column = static_cast<std::size_t>(it - columns.begin());
    } else {
      const int index = std::get<int>(*options.label);
      if (index < 0 || static_cast<std::size_t>(index) >= columns.size()) {
        throw ConfigError("dataset", "label column index " +
                                         std::to_string(index) + " out of range");
      }
      label_column = static_cast<std::size_t>(index);
    }
  }

  const int num_samples =
      columns.empty() ? 0 : static_cast<int>(columns.front().cells.size());
  const int num_features =
      static_cast<int>(columns.size()) - (label_column ? 1 : 0);

  RawDataset data;
  data.samples = Matrix<double>(num_samples, num_features);
  int feature = 0;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const Column& column = columns[c];
    if (label_column && c == *label_column) {
      for (int r = 0; r < num_samples; ++r) {
        if (column.cells[r]->empty()) {
          throw ParseError("line " + std::to_string(column.lines[r]) +
                               ": missing label",
                           column.lines[r]);
        }
        data.labels.push_back(*column.cells[r]);
      }
      continue;
    }
    data.features.push_back(column.name);
    for (int r = 0; r < num_samples; ++r) {
      data.samples(r, feature) = ParseNumber(*column.cells[r], column.lines[r]);
    }
    ++feature;
  }
  return data;
}

RawDataset LoadDelimited(const std::filesystem::path& path,
                         const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("dataset", "cannot open '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  LoadOptions resolved = options;
  if (resolved.delimiter == 0) {
    const auto ext = path.extension().string();
    resolved.delimiter = (ext == ".tsv" || ext == ".tab") ? '\t' : ',';
  }
  return ParseDelimited(buffer.str(), resolved);
}

QuantizationSpec FitQuantizer(const RawDataset& data, int degree) {
  if (degree < 1) {
    throw ConfigError("dataset", "quantization degree must be >= 1");
  }
  QuantizationSpec spec;
  spec.degree = degree;
  spec.features = data.features;
  spec.bounds.resize(data.num_features());
  for (int j = 0; j < data.num_features(); ++j) {
    FeatureBounds& b = spec.bounds[j];
    for (int i = 0; i < data.num_samples(); ++i) {
      b.min_negative = std::min(b.min_negative, data.samples(i, j));
      b.max_positive = std::max(b.max_positive, data.samples(i, j));
    }
  }
  return spec;
}

int QuantizeValue(double value, const FeatureBounds& bounds, int degree) {
  if (value == 0.0) return degree;
  if (value < 0.0) {
    if (bounds.min_negative >= 0.0 || value <= bounds.min_negative) return 0;
    // [min_negative, 0) cut into `degree` half-open bins.
    const double position =
        (value - bounds.min_negative) * degree / -bounds.min_negative;
    return std::clamp(static_cast<int>(std::floor(position)), 0, degree - 1);
  }
  if (bounds.max_positive <= 0.0 || value >= bounds.max_positive) {
    return 2 * degree;
  }
  // (0, max_positive] cut into `degree` bins closed on the right.
  const double position = value * degree / bounds.max_positive;
  const int bin = static_cast<int>(std::ceil(position)) - 1;
  return degree + 1 + std::clamp(bin, 0, degree - 1);
}

QuantizedDataset Quantize(const RawDataset& data, const QuantizationSpec& spec) {
  if (data.features != spec.features ||
      spec.bounds.size() != data.features.size()) {
    throw ConfigError("dataset",
                      "quantization spec was fitted on a different feature list");
  }
  Matrix<int> levels(data.num_samples(), data.num_features());
  for (int i = 0; i < data.num_samples(); ++i) {
    for (int j = 0; j < data.num_features(); ++j) {
      levels(i, j) = QuantizeValue(data.samples(i, j), spec.bounds[j], spec.degree);
    }
  }
  std::vector<int> alphabets(data.num_features(), spec.levels());
  if (!data.labeled()) {
    return QuantizedDataset(data.features, std::move(levels), std::move(alphabets),
                            std::vector<int>(data.num_samples(), 0), {""});
  }
  LabelEncoding encoding = EncodeLabels(data.labels);
  return QuantizedDataset(data.features, std::move(levels), std::move(alphabets),
                          std::move(encoding.indices), std::move(encoding.names));
}

LabelEncoding EncodeLabels(const std::vector<std::string>& labels) {
  const std::set<std::string> distinct(labels.begin(), labels.end());
  LabelEncoding encoding;
  encoding.names.assign(distinct.begin(), distinct.end());
  encoding.indices.reserve(labels.size());
  for (const auto& label : labels) {
    encoding.indices.push_back(static_cast<int>(
        std::lower_bound(encoding.names.begin(), encoding.names.end(), label) -
        encoding.names.begin()));
  }
  return encoding;
}

QuantizedDataset::QuantizedDataset(std::vector<std::string> features,
                                   Matrix<int> samples,
                                   std::vector<int> alphabet_sizes,
                                   std::vector<int> labels,
                                   std::vector<std::string> class_names)
    : features_(std::move(features)),
      samples_(std::move(samples)),
      alphabet_sizes_(std::move(alphabet_sizes)),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)) {
  if (static_cast<int>(features_.size()) != samples_.cols() ||
      static_cast<int>(alphabet_sizes_.size()) != samples_.cols()) {
    throw ConfigError("dataset", "feature names, alphabets and columns disagree");
  }
  if (static_cast<int>(labels_.size()) != samples_.rows()) {
    throw ConfigError("dataset", "every sample needs exactly one label");
  }
  if (class_names_.empty()) {
    throw ConfigError("dataset", "at least one class is required");
  }
  for (int j = 0; j < samples_.cols(); ++j) {
    if (alphabet_sizes_[j] < 1) {
      throw ConfigError("dataset", "alphabet sizes must be positive");
    }
    for (int i = 0; i < samples_.rows(); ++i) {
      const int v = samples_(i, j);
      if (v < 0 || v >= alphabet_sizes_[j]) {
        throw DomainError("dataset", "value " + std::to_string(v) +
                                         " outside alphabet of feature '" +
                                         features_[j] + "'");
      }
    }
  }
  for (int label : labels_) {
    if (label < 0 || label >= class_count()) {
      throw DomainError("dataset", "label index out of range");
    }
  }
}

QuantizedDataset QuantizedDataset::FromIntegerData(const RawDataset& data) {
  Matrix<int> values(data.num_samples(), data.num_features());
  std::vector<int> alphabets(data.num_features(), 2);
  for (int i = 0; i < data.num_samples(); ++i) {
    for (int j = 0; j < data.num_features(); ++j) {
      const double v = data.samples(i, j);
      if (v < 0 || v != std::floor(v) || v > 65535) {
        throw DomainError("dataset", "feature '" + data.features[j] +
                                         "' is not a small non-negative integer");
      }
      values(i, j) = static_cast<int>(v);
      alphabets[j] = std::max(alphabets[j], values(i, j) + 1);
    }
  }
  if (!data.labeled()) {
    return QuantizedDataset(data.features, std::move(values), std::move(alphabets),
                            std::vector<int>(data.num_samples(), 0), {""});
  }
  LabelEncoding encoding = EncodeLabels(data.labels);
  return QuantizedDataset(data.features, std::move(values), std::move(alphabets),
                          std::move(encoding.indices), std::move(encoding.names));
}

QuantizedDataset QuantizedDataset::SelectRows(std::span<const int> rows) const {
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (int r : rows) labels.push_back(labels_[r]);
  return QuantizedDataset(features_, samples_.SelectRows(rows), alphabet_sizes_,
                          std::move(labels), class_names_);
}

int TrainSize(int n, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("dataset", "train fraction must lie in (0, 1)");
  }
  if (n < 2) {
    throw ConfigError("dataset", "cannot split fewer than 2 samples");
  }
  const int size = static_cast<int>(std::floor(n * train_fraction + 1e-9));
  return std::clamp(size, 1, n - 1);
}

SplitIndices SplitRows(std::span<const int> labels, double train_fraction,
                       std::uint64_t seed) {
  const int n = static_cast<int>(labels.size());
  const int train_size = TrainSize(n, train_fraction);
  Rng rng(seed);

  std::map<int, std::vector<int>> by_class;
  for (int i = 0; i < n; ++i) by_class[labels[i]].push_back(i);
  const int classes = static_cast<int>(by_class.size());
  const bool stratify =
      std::all_of(by_class.begin(), by_class.end(),
                  [](const auto& kv) { return kv.second.size() >= 2; }) &&
      train_size >= classes && train_size <= n - classes;

  SplitIndices split;
  if (stratify) {
    std::vector<const std::vector<int>*> groups;
    std::vector<double> ideal;
    std::vector<int> take;
    for (const auto& [label, rows] : by_class) {
      const int size = static_cast<int>(rows.size());
      groups.push_back(&rows);
      ideal.push_back(static_cast<double>(size) * train_size / n);
      take.push_back(std::clamp(static_cast<int>(std::floor(ideal.back())), 1,
                                size - 1));
    }
    int total = std::accumulate(take.begin(), take.end(), 0);
    // Hand out (or reclaim) the rounding remainder by largest deficit.
    while (total != train_size) {
      int pick = -1;
      for (int c = 0; c < classes; ++c) {
        const int size = static_cast<int>(groups[c]->size());
        const double deficit = ideal[c] - take[c];
        if (total < train_size) {
          if (take[c] < size - 1 &&
              (pick < 0 || deficit > ideal[pick] - take[pick])) {
            pick = c;
          }
        } else if (take[c] > 1 &&
                   (pick < 0 || deficit < ideal[pick] - take[pick])) {
          pick = c;
        }
      }
      const int step = total < train_size ? 1 : -1;
      take[pick] += step;
      total += step;
    }
    for (int c = 0; c < classes; ++c) {
      std::vector<int> rows = *groups[c];
      rng.Shuffle(rows);
      split.train.insert(split.train.end(), rows.begin(), rows.begin() + take[c]);
      split.test.insert(split.test.end(), rows.begin() + take[c], rows.end());
    }
  } else {
    std::vector<int> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    rng.Shuffle(rows);
    split.train.assign(rows.begin(), rows.begin() + train_size);
    split.test.assign(rows.begin() + train_size, rows.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

Split SplitDataset(const QuantizedDataset& data, double train_fraction,
                   std::uint64_t seed) {
  Split split;
  split.rows = SplitRows(data.labels(), train_fraction, seed);
  split.train = data.SelectRows(split.rows.train);
  split.test = data.SelectRows(split.rows.test);
  return split;
}

}  // namespace dimred
