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

#include "dimred/distribution.h"

#include <algorithm>
#include <limits>
#include <numeric>

#include "dimred/error.h"

namespace dimred {

FeatureSubset::FeatureSubset(std::vector<int> indices)
    : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw ConfigError("distribution", "feature subset has duplicate indices");
  }
}

bool FeatureSubset::contains(int feature) const {
  return std::binary_search(indices_.begin(), indices_.end(), feature);
}

FeatureSubset FeatureSubset::With(int feature) const {
  FeatureSubset out = *this;
  const auto it = std::lower_bound(out.indices_.begin(), out.indices_.end(), feature);
  if (it == out.indices_.end() || *it != feature) out.indices_.insert(it, feature);
  return out;
}

FeatureSubset FeatureSubset::Without(int feature) const {
  FeatureSubset out = *this;
  std::erase(out.indices_, feature);
  return out;
}

void FeatureSubset::CheckRange(int num_features) const {
  for (int f : indices_) {
    if (f < 0 || f >= num_features) {
      throw ConfigError("distribution", "feature index " + std::to_string(f) +
                                            " out of range [0, " +
                                            std::to_string(num_features) + ")");
    }
  }
}

std::string FeatureSubset::ToString() const {
  std::string out = "{";
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(indices_[i]);
  }
  return out + "}";
}

std::optional<std::uint64_t> RadixProduct(std::span<const int> radices) {
  std::uint64_t product = 1;
  for (int r : radices) {
    const auto radix = static_cast<std::uint64_t>(r);
    if (radix != 0 && product > std::numeric_limits<std::uint64_t>::max() / radix) {
      return std::nullopt;
    }
    product *= radix;
  }
  return product;
}

InstanceCode EncodeInstance(std::span<const int> values,
                            std::span<const int> radices) {
  if (values.size() != radices.size()) {
    throw DomainError("distribution", "instance length does not match radices");
  }
  if (!RadixProduct(radices)) {
    throw DomainError("distribution", "instance code space exceeds 64 bits");
  }
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0 || values[i] >= radices[i]) {
      throw DomainError("distribution", "instance digit outside its radix");
    }
    code = code * static_cast<std::uint64_t>(radices[i]) +
           static_cast<std::uint64_t>(values[i]);
  }
  return InstanceCode{code};
}

std::vector<int> DecodeInstance(InstanceCode code, std::span<const int> radices) {
  std::vector<int> values(radices.size());
  std::uint64_t rest = code.value;
  for (std::size_t i = radices.size(); i-- > 0;) {
    const auto radix = static_cast<std::uint64_t>(radices[i]);
    values[i] = static_cast<int>(rest % radix);
    rest /= radix;
  }
  if (rest != 0) {
    throw DomainError("distribution", "instance code outside radix range");
  }
  return values;
}

const ContingencyTable::Row* ContingencyTable::Find(
    std::span<const int> instance) const {
  const auto it = std::lower_bound(
      rows_.begin(), rows_.end(), instance, [](const Row& row, std::span<const int> key) {
        return std::lexicographical_compare(row.instance.begin(), row.instance.end(),
                                            key.begin(), key.end());
      });
  if (it == rows_.end() || !std::equal(it->instance.begin(), it->instance.end(),
                                       instance.begin(), instance.end())) {
    return nullptr;
  }
  return &*it;
}

ContingencyTable BuildTable(const QuantizedDataset& data,
                            const FeatureSubset& subset) {
  subset.CheckRange(data.num_features());

  ContingencyTable table;
  table.subset_ = subset;
  table.sample_count_ = data.num_samples();
  table.class_totals_.assign(data.class_count(), 0);
  for (int f : subset) table.radices_.push_back(data.alphabet_sizes()[f]);
  if (const auto m = RadixProduct(table.radices_)) {
    table.possible_instances_ = *m;
  } else {
    table.possible_instances_ = std::numeric_limits<std::uint64_t>::max();
    table.saturated_ = true;
  }

  const int s = data.num_samples();
  const int k = subset.size();
  // Flattened instance tuples, then sample order sorted by tuple.
  std::vector<int> tuples(static_cast<std::size_t>(s) * k);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < k; ++j) tuples[static_cast<std::size_t>(i) * k + j] = data.value(i, subset[j]);
  }
  auto tuple = [&](int i) {
    return std::span<const int>(tuples.data() + static_cast<std::size_t>(i) * k, k);
  };
  std::vector<int> order(s);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto ta = tuple(a);
    const auto tb = tuple(b);
    return std::lexicographical_compare(ta.begin(), ta.end(), tb.begin(), tb.end());
  });

  for (int i : order) {
    const auto t = tuple(i);
    if (table.rows_.empty() ||
        !std::equal(t.begin(), t.end(), table.rows_.back().instance.begin(),
                    table.rows_.back().instance.end())) {
      ContingencyTable::Row row;
      row.instance.assign(t.begin(), t.end());
      if (!table.saturated_) row.code = EncodeInstance(t, table.radices_);
      row.class_counts.assign(data.class_count(), 0);
      table.rows_.push_back(std::move(row));
    }
    auto& row = table.rows_.back();
    ++row.class_counts[data.label(i)];
    ++row.total;
    ++table.class_totals_[data.label(i)];
  }
  return table;
}

std::vector<double> PriorDistribution(const QuantizedDataset& data) {
  if (data.num_samples() == 0) {
    throw DomainError("distribution", "prior of an empty dataset");
  }
  std::vector<double> prior(data.class_count(), 0.0);
  for (int label : data.labels()) prior[label] += 1.0;
  for (double& p : prior) p /= data.num_samples();
  return prior;
}

}  // namespace dimred
