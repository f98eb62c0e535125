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

#ifndef DIMRED_DISTRIBUTION_H_
#define DIMRED_DISTRIBUTION_H_

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dimred/dataset.h"

namespace dimred {

// Canonical (ascending, duplicate-free) set of feature column indices.
class FeatureSubset {
 public:
  FeatureSubset() = default;
  FeatureSubset(std::initializer_list<int> indices)
      : FeatureSubset(std::vector<int>(indices)) {}
  explicit FeatureSubset(std::vector<int> indices);

  int size() const { return static_cast<int>(indices_.size()); }
  bool empty() const { return indices_.empty(); }
  bool contains(int feature) const;

  std::vector<int>::const_iterator begin() const { return indices_.begin(); }
  std::vector<int>::const_iterator end() const { return indices_.end(); }
  int operator[](int i) const { return indices_[i]; }
  const std::vector<int>& indices() const { return indices_; }

  FeatureSubset With(int feature) const;
  FeatureSubset Without(int feature) const;

  // Throws ConfigError if any index is outside [0, num_features).
  void CheckRange(int num_features) const;

  // "{0, 3, 7}"
  std::string ToString() const;

  auto operator<=>(const FeatureSubset&) const = default;

 private:
  std::vector<int> indices_;
};

// Mixed-radix code of an instance (a value tuple over a feature subset), with
// the first feature as the most significant digit.
struct InstanceCode {
  std::uint64_t value = 0;

  auto operator<=>(const InstanceCode&) const = default;
};

// Product of the radices, or nullopt if it does not fit in 64 bits.
std::optional<std::uint64_t> RadixProduct(std::span<const int> radices);

// Throws DomainError if a digit is outside its radix or the code space
// overflows.
InstanceCode EncodeInstance(std::span<const int> values,
                            std::span<const int> radices);
std::vector<int> DecodeInstance(InstanceCode code, std::span<const int> radices);

// Empirical joint distribution of (instance, class) over one feature subset.
// Counts are kept as integers; probabilities are formed by the criteria.
class ContingencyTable {
 public:
  struct Row {
    std::vector<int> instance;
    std::optional<InstanceCode> code;  // unset when the code space saturates
    std::vector<int> class_counts;     // length = class_count()
    int total = 0;                     // f_i
  };

  int sample_count() const { return sample_count_; }  // s
  int class_count() const { return static_cast<int>(class_totals_.size()); }
  int observed_instances() const { return static_cast<int>(rows_.size()); }  // N

  // M = product of alphabet sizes; saturates at UINT64_MAX.
  std::uint64_t possible_instances() const { return possible_instances_; }
  bool possible_instances_saturated() const { return saturated_; }

  const std::vector<int>& class_totals() const { return class_totals_; }
  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<int>& radices() const { return radices_; }
  const FeatureSubset& subset() const { return subset_; }

  // Rows are sorted by instance, so lookup is a binary search.
  const Row* Find(std::span<const int> instance) const;

  friend ContingencyTable BuildTable(const QuantizedDataset& data,
                                     const FeatureSubset& subset);

 private:
  FeatureSubset subset_;
  std::vector<int> radices_;
  std::vector<Row> rows_;
  std::vector<int> class_totals_;
  int sample_count_ = 0;
  std::uint64_t possible_instances_ = 1;
  bool saturated_ = false;
};

// Counts every observed instance of `subset`. An empty subset yields a
// single row keyed by the empty instance holding the class totals.
ContingencyTable BuildTable(const QuantizedDataset& data,
                            const FeatureSubset& subset);

// Per-class relative frequencies of the labels.
std::vector<double> PriorDistribution(const QuantizedDataset& data);

}  // namespace dimred

#endif  // DIMRED_DISTRIBUTION_H_
