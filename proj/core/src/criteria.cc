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

#include "dimred/criteria.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dimred/error.h"

namespace dimred {
namespace {

double PriorError(std::span<const double> prior) {
  const double error = 1.0 - *std::max_element(prior.begin(), prior.end());
  if (!(error > 0.0)) {
    throw DomainError("criteria", "CoD undefined: prior error is zero");
  }
  return error;
}

void CheckPrior(const ContingencyTable& table, std::span<const double> prior) {
  if (static_cast<int>(prior.size()) != table.class_count() || prior.empty()) {
    throw DomainError("criteria", "prior length does not match class count");
  }
}

void CheckAlpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw DomainError("criteria", "alpha must be a finite non-negative number");
  }
}

void CheckBeta(double beta, int classes) {
  const double low = 1.0 / std::max(classes, 1);
  if (!(beta >= low - kTieTolerance && beta <= 1.0 + kTieTolerance)) {
    std::ostringstream msg;
    msg << "beta " << beta << " outside [1/c, 1] for c = " << classes;
    throw DomainError("criteria", msg.str());
  }
}

int MaxCount(const ContingencyTable::Row& row) {
  return *std::max_element(row.class_counts.begin(), row.class_counts.end());
}

double PriorEntropy(const ContingencyTable& table) {
  return EntropyOfCounts(table.class_totals(), table.sample_count());
}

double ParseNumber(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("criteria", "bad penalty parameter '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

CriterionSpec CriterionSpec::Parse(std::string_view kind, std::string_view penalty) {
  CriterionSpec spec;
  if (kind == "mce") {
    spec.kind = CriterionKind::kMeanConditionalEntropy;
  } else if (kind == "cod") {
    spec.kind = CriterionKind::kCoefficientOfDetermination;
  } else {
    throw ConfigError("criteria", "unknown criterion '" + std::string(kind) + "'");
  }
  if (penalty.empty() || penalty == "none") {
    spec.penalty = NoPenalty{};
  } else if (penalty.starts_with("alpha=")) {
    const double alpha = ParseNumber(penalty.substr(6));
    if (!(alpha >= 0.0)) throw ConfigError("criteria", "alpha must be >= 0");
    spec.penalty = AlphaPenalty{alpha};
  } else if (penalty.starts_with("beta=")) {
    const double beta = ParseNumber(penalty.substr(5));
    if (!(beta > 0.0 && beta <= 1.0)) {
      throw ConfigError("criteria", "beta must lie in (0, 1]");
    }
    spec.penalty = BetaPenalty{beta};
  } else {
    throw ConfigError("criteria", "unknown penalty '" + std::string(penalty) + "'");
  }
  return spec;
}

std::string CriterionSpec::KindName() const {
  return kind == CriterionKind::kMeanConditionalEntropy ? "mce" : "cod";
}

std::string CriterionSpec::PenaltyName() const {
  // Shortest round-trip form, so "alpha=0.8" parses back to the same value.
  auto format = [](const char* prefix, double v) {
    char buf[32];
    const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
    return std::string(prefix) + std::string(buf, end);
  };
  if (const auto* a = std::get_if<AlphaPenalty>(&penalty)) return format("alpha=", a->alpha);
  if (const auto* b = std::get_if<BetaPenalty>(&penalty)) return format("beta=", b->beta);
  return "none";
}

bool IsBetter(const CriterionValue& a, const CriterionValue& b) {
  return a.polarity == Polarity::kMinimize ? a.value < b.value - kTieTolerance
                                           : a.value > b.value + kTieTolerance;
}

double Entropy(std::span<const double> p) {
  double sum = 0.0;
  double h = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw DomainError("criteria", "negative probability");
    sum += x;
    if (x > 0.0) h -= x * std::log2(x);
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw DomainError("criteria", "probabilities do not sum to 1");
  }
  return std::max(h, 0.0);
}

double EntropyOfCounts(std::span<const int> counts, int total) {
  if (total <= 0) return 0.0;
  double h = 0.0;
  for (int n : counts) {
    if (n > 0) {
      const double p = static_cast<double>(n) / total;
      h -= p * std::log2(p);
    }
  }
  return std::max(h, 0.0);
}

double BetaDistributionEntropy(double beta, int classes) {
  if (classes <= 1) return 0.0;
  std::vector<double> f(classes, (1.0 - beta) / (classes - 1));
  f[0] = beta;
  double h = 0.0;
  for (double x : f) {
    if (x > 0.0) h -= x * std::log2(x);
  }
  return std::max(h, 0.0);
}

CriterionValue MeanConditionalEntropy(const ContingencyTable& table) {
  double weighted = 0.0;
  for (const auto& row : table.rows()) {
    weighted += row.total * EntropyOfCounts(row.class_counts, row.total);
  }
  return {weighted / table.sample_count(), Polarity::kMinimize};
}

CriterionValue Cod(const ContingencyTable& table, std::span<const double> prior) {
  CheckPrior(table, prior);
  const double prior_error = PriorError(prior);
  double misses = 0.0;
  for (const auto& row : table.rows()) misses += row.total - MaxCount(row);
  const double error = misses / table.sample_count();
  return {(prior_error - error) / prior_error, Polarity::kMaximize};
}

CriterionValue MceAlpha(const ContingencyTable& table, double alpha) {
  CheckAlpha(alpha);
  const double prior_entropy = PriorEntropy(table);
  if (alpha > 0.0 && table.possible_instances_saturated()) {
    return {prior_entropy, Polarity::kMinimize, true};
  }
  const double m = static_cast<double>(table.possible_instances());
  const double n = table.observed_instances();
  double weighted = alpha * (m - n) * prior_entropy;
  for (const auto& row : table.rows()) {
    weighted += (row.total + alpha) * EntropyOfCounts(row.class_counts, row.total);
  }
  return {weighted / (alpha * m + table.sample_count()), Polarity::kMinimize};
}

CriterionValue CodAlpha(const ContingencyTable& table,
                        std::span<const double> prior, double alpha) {
  CheckAlpha(alpha);
  CheckPrior(table, prior);
  const double prior_error = PriorError(prior);
  if (alpha > 0.0 && table.possible_instances_saturated()) {
    return {0.0, Polarity::kMaximize, true};
  }
  const double m = static_cast<double>(table.possible_instances());
  const double n = table.observed_instances();
  // Expected misclassification mass: non-observed instances carry the prior
  // error, observed ones their own conditional error, each weighted by
  // (count + alpha).
  double misses = alpha * (m - n) * prior_error;
  for (const auto& row : table.rows()) {
    const int max_count = MaxCount(row);
    misses += (row.total - max_count) +
              alpha * (1.0 - static_cast<double>(max_count) / row.total);
  }
  const double error = misses / (alpha * m + table.sample_count());
  return {(prior_error - error) / prior_error, Polarity::kMaximize};
}

CriterionValue MceBeta(const ContingencyTable& table, double beta) {
  CheckBeta(beta, table.class_count());
  const double singleton_entropy = BetaDistributionEntropy(beta, table.class_count());
  int singletons = 0;
  double weighted = 0.0;
  for (const auto& row : table.rows()) {
    if (row.total == 1) {
      ++singletons;
    } else {
      weighted += row.total * EntropyOfCounts(row.class_counts, row.total);
    }
  }
  weighted += singletons * singleton_entropy;
  return {weighted / table.sample_count(), Polarity::kMinimize};
}

CriterionValue CodBeta(const ContingencyTable& table,
                       std::span<const double> prior, double beta) {
  CheckBeta(beta, table.class_count());
  CheckPrior(table, prior);
  const double prior_error = PriorError(prior);
  int singletons = 0;
  double hits = 0.0;
  for (const auto& row : table.rows()) {
    if (row.total == 1) {
      ++singletons;
    } else {
      hits += MaxCount(row);
    }
  }
  const double error =
      (table.sample_count() - singletons * beta - hits) / table.sample_count();
  return {(prior_error - error) / prior_error, Polarity::kMaximize};
}

CriterionValue Evaluate(const QuantizedDataset& data, const FeatureSubset& subset,
                        const CriterionSpec& spec) {
  const std::vector<double> prior = PriorDistribution(data);
  return Evaluate(data, subset, spec, prior);
}

CriterionValue Evaluate(const QuantizedDataset& data, const FeatureSubset& subset,
                        const CriterionSpec& spec, std::span<const double> prior) {
  const bool mce = spec.kind == CriterionKind::kMeanConditionalEntropy;
  if (subset.empty()) {
    if (mce) return {Entropy(prior), Polarity::kMinimize};
    PriorError(prior);
    return {0.0, Polarity::kMaximize};
  }
  const ContingencyTable table = BuildTable(data, subset);
  return std::visit(
      [&](const auto& penalty) -> CriterionValue {
        using P = std::decay_t<decltype(penalty)>;
        if constexpr (std::is_same_v<P, NoPenalty>) {
          return mce ? MeanConditionalEntropy(table) : Cod(table, prior);
        } else if constexpr (std::is_same_v<P, AlphaPenalty>) {
          return mce ? MceAlpha(table, penalty.alpha)
                     : CodAlpha(table, prior, penalty.alpha);
        } else {
          return mce ? MceBeta(table, penalty.beta)
                     : CodBeta(table, prior, penalty.beta);
        }
      },
      spec.penalty);
}

}  // namespace dimred
