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

#ifndef DIMRED_CLASSIFIER_H_
#define DIMRED_CLASSIFIER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dimred/dataset.h"
#include "dimred/distribution.h"

namespace dimred {

// How to label non-observed instances and instances whose most probable
// class is tied.
enum class Generalization {
  // Accumulate class counts over observed instances tier by tier of
  // increasing Euclidean distance until one class leads; lowest class index
  // if the tie survives every tier.
  kNearestNeighbor,
  // Uniform choice among the tied classes (all classes for a non-observed
  // instance), drawn from a stream derived from the seed and the instance.
  kRandomGuess,
};

std::optional<Generalization> ParseGeneralization(std::string_view name);
std::string GeneralizationName(Generalization mode);

// Bayes classifier over the conditional probability table of a training set.
class TableClassifier {
 public:
  // Throws ConfigError for an empty subset or empty training set.
  static TableClassifier Design(const QuantizedDataset& train,
                                const FeatureSubset& subset,
                                Generalization mode, std::uint64_t seed = 0);

  // `instance` holds the values of the subset's features, in subset order.
  // Throws DomainError for a wrong length or out-of-range value.
  int Classify(std::span<const int> instance) const;

  // Projects a full sample row onto the subset, then classifies.
  int ClassifySample(std::span<const int> sample) const;

  const FeatureSubset& subset() const { return table_.subset(); }
  const ContingencyTable& table() const { return table_; }
  Generalization generalization() const { return mode_; }
  std::uint64_t seed() const { return seed_; }
  int class_count() const { return table_.class_count(); }

 private:
  TableClassifier(ContingencyTable table, Generalization mode, std::uint64_t seed)
      : table_(std::move(table)), mode_(mode), seed_(seed) {}

  int NearestNeighbor(std::span<const int> instance) const;
  int RandomGuess(std::span<const int> instance,
                  std::span<const int> class_counts) const;

  ContingencyTable table_;
  Generalization mode_;
  std::uint64_t seed_;
};

// Fraction of `test` samples labeled correctly. Throws ConfigError if `test`
// is empty.
double Accuracy(const TableClassifier& classifier, const QuantizedDataset& test);

}  // namespace dimred

#endif  // DIMRED_CLASSIFIER_H_
