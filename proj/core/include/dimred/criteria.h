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

#ifndef DIMRED_CRITERIA_H_
#define DIMRED_CRITERIA_H_

#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "dimred/dataset.h"
#include "dimred/distribution.h"

namespace dimred {

enum class CriterionKind {
  kMeanConditionalEntropy,
  kCoefficientOfDetermination,
};

enum class Polarity { kMinimize, kMaximize };

struct NoPenalty {
  bool operator==(const NoPenalty&) const = default;
};

// Mass `alpha` added to every possible instance; non-observed instances score
// as the prior (entropy H(Y) or error 1 - max P(y)).
struct AlphaPenalty {
  double alpha = 0.0;
  bool operator==(const AlphaPenalty&) const = default;
};

// Singly-observed instances get the distribution (beta, (1-beta)/(c-1), ...)
// instead of a point mass.
struct BetaPenalty {
  double beta = 1.0;
  bool operator==(const BetaPenalty&) const = default;
};

using Penalty = std::variant<NoPenalty, AlphaPenalty, BetaPenalty>;

struct CriterionSpec {
  CriterionKind kind = CriterionKind::kMeanConditionalEntropy;
  Penalty penalty = NoPenalty{};

  Polarity polarity() const {
    return kind == CriterionKind::kMeanConditionalEntropy ? Polarity::kMinimize
                                                          : Polarity::kMaximize;
  }

  // Accepts "mce" / "cod" and "none" / "alpha=<x>" / "beta=<x>".
  static CriterionSpec Parse(std::string_view kind, std::string_view penalty);
  std::string KindName() const;
  std::string PenaltyName() const;

  bool operator==(const CriterionSpec&) const = default;
};

struct CriterionValue {
  double value = 0.0;
  Polarity polarity = Polarity::kMinimize;
  // Set when the value is the M -> infinity limit because the instance count
  // overflowed.
  bool saturated = false;
};

// Values closer than this are treated as ties by the search.
inline constexpr double kTieTolerance = 1e-12;

// True if `a` is strictly better than `b` beyond kTieTolerance.
bool IsBetter(const CriterionValue& a, const CriterionValue& b);

// Shannon entropy in bits, 0 log 0 = 0.
double Entropy(std::span<const double> p);
double EntropyOfCounts(std::span<const int> counts, int total);

CriterionValue MeanConditionalEntropy(const ContingencyTable& table);
CriterionValue Cod(const ContingencyTable& table, std::span<const double> prior);
CriterionValue MceAlpha(const ContingencyTable& table, double alpha);
CriterionValue CodAlpha(const ContingencyTable& table,
                        std::span<const double> prior, double alpha);
CriterionValue MceBeta(const ContingencyTable& table, double beta);
CriterionValue CodBeta(const ContingencyTable& table,
                       std::span<const double> prior, double beta);

// Entropy of (beta, (1-beta)/(c-1), ..., (1-beta)/(c-1)).
double BetaDistributionEntropy(double beta, int classes);

// Single dispatch point used by the search algorithms. The empty subset
// scores as the prior alone: H(Y) for MCE, 0 for CoD.
CriterionValue Evaluate(const QuantizedDataset& data, const FeatureSubset& subset,
                        const CriterionSpec& spec);

// Same, reusing a precomputed prior.
CriterionValue Evaluate(const QuantizedDataset& data, const FeatureSubset& subset,
                        const CriterionSpec& spec, std::span<const double> prior);

}  // namespace dimred

#endif  // DIMRED_CRITERIA_H_
