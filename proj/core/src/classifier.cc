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

#include "dimred/classifier.h"

#include <algorithm>
#include <cstdint>

#include "dimred/error.h"
#include "dimred/random.h"

namespace dimred {
namespace {

// Classes holding the maximum count, ascending.
std::vector<int> ArgMaxAll(std::span<const std::int64_t> counts) {
  const std::int64_t top = *std::max_element(counts.begin(), counts.end());
  std::vector<int> winners;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == top) winners.push_back(static_cast<int>(c));
  }
  return winners;
}

}  // namespace

std::optional<Generalization> ParseGeneralization(std::string_view name) {
  if (name == "nn" || name == "nearest-neighbor") return Generalization::kNearestNeighbor;
  if (name == "random" || name == "random-guess") return Generalization::kRandomGuess;
  return std::nullopt;
}

std::string GeneralizationName(Generalization mode) {
  return mode == Generalization::kNearestNeighbor ? "nearest-neighbor" : "random-guess";
}

TableClassifier TableClassifier::Design(const QuantizedDataset& train,
                                        const FeatureSubset& subset,
                                        Generalization mode, std::uint64_t seed) {
  if (subset.empty()) {
    throw ConfigError("classifier", "cannot design a classifier on an empty subset");
  }
  if (train.num_samples() == 0) {
    throw ConfigError("classifier", "training set is empty");
  }
  return TableClassifier(BuildTable(train, subset), mode, seed);
}

int TableClassifier::Classify(std::span<const int> instance) const {
  const auto& radices = table_.radices();
  if (instance.size() != radices.size()) {
    throw DomainError("classifier", "instance length does not match the subset");
  }
  for (std::size_t j = 0; j < instance.size(); ++j) {
    if (instance[j] < 0 || instance[j] >= radices[j]) {
      throw DomainError("classifier", "feature value " + std::to_string(instance[j]) +
                                          " outside alphabet of size " +
                                          std::to_string(radices[j]));
    }
  }

  const ContingencyTable::Row* row = table_.Find(instance);
  if (row != nullptr) {
    const std::vector<std::int64_t> counts(row->class_counts.begin(),
                                           row->class_counts.end());
    const std::vector<int> winners = ArgMaxAll(counts);
    if (winners.size() == 1) return winners.front();
  }
  if (mode_ == Generalization::kNearestNeighbor) return NearestNeighbor(instance);
  return RandomGuess(instance, row != nullptr ? std::span<const int>(row->class_counts)
                                              : std::span<const int>());
}

int TableClassifier::ClassifySample(std::span<const int> sample) const {
  std::vector<int> instance;
  instance.reserve(subset().size());
  for (int f : subset()) {
    if (f >= static_cast<int>(sample.size())) {
      throw DomainError("classifier", "sample has fewer features than the subset needs");
    }
    instance.push_back(sample[f]);
  }
  return Classify(instance);
}

int TableClassifier::NearestNeighbor(std::span<const int> instance) const {
  // Squared distances are integers, so tiers group exactly.
  std::vector<std::pair<std::int64_t, const ContingencyTable::Row*>> by_distance;
  by_distance.reserve(table_.rows().size());
  for (const auto& row : table_.rows()) {
    std::int64_t d2 = 0;
    for (std::size_t j = 0; j < instance.size(); ++j) {
      const std::int64_t d = row.instance[j] - instance[j];
      d2 += d * d;
    }
    by_distance.emplace_back(d2, &row);
  }
  std::sort(by_distance.begin(), by_distance.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::int64_t> votes(class_count(), 0);
  std::size_t i = 0;
  while (i < by_distance.size()) {
    const std::int64_t tier = by_distance[i].first;
    for (; i < by_distance.size() && by_distance[i].first == tier; ++i) {
      const auto& counts = by_distance[i].second->class_counts;
      for (std::size_t c = 0; c < counts.size(); ++c) votes[c] += counts[c];
    }
    const std::vector<int> winners = ArgMaxAll(votes);
    if (winners.size() == 1) return winners.front();
  }
  return ArgMaxAll(votes).front();
}

int TableClassifier::RandomGuess(std::span<const int> instance,
                                 std::span<const int> class_counts) const {
  std::vector<int> candidates;
  if (class_counts.empty()) {
    for (int c = 0; c < class_count(); ++c) candidates.push_back(c);
  } else {
    const std::vector<std::int64_t> counts(class_counts.begin(), class_counts.end());
    candidates = ArgMaxAll(counts);
  }
  std::uint64_t key = Mix64(seed_);
  for (int v : instance) key = Mix64(key ^ static_cast<std::uint64_t>(v));
  Rng rng(key);
  return candidates[rng.UniformIndex(candidates.size())];
}

double Accuracy(const TableClassifier& classifier, const QuantizedDataset& test) {
  if (test.num_samples() == 0) {
    throw ConfigError("classifier", "test set is empty");
  }
  int hits = 0;
  for (int i = 0; i < test.num_samples(); ++i) {
    if (classifier.ClassifySample(test.sample(i)) == test.label(i)) ++hits;
  }
  return static_cast<double>(hits) / test.num_samples();
}

}  // namespace dimred
