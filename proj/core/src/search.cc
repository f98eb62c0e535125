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

#include "dimred/search.h"

#include <limits>
#include <map>
#include <sstream>

#include "dimred/error.h"

namespace dimred {
namespace {

// Memoizes criterion values per subset for the duration of one search run.
class SubsetEvaluator {
 public:
  SubsetEvaluator(const QuantizedDataset& data, const CriterionSpec& spec)
      : data_(data), spec_(spec), prior_(PriorDistribution(data)) {}

  CriterionValue operator()(const FeatureSubset& subset) {
    if (const auto it = cache_.find(subset); it != cache_.end()) return it->second;
    ++evaluations_;
    const CriterionValue value = Evaluate(data_, subset, spec_, prior_);
    cache_.emplace(subset, value);
    return value;
  }

  std::int64_t evaluations() const { return evaluations_; }

 private:
  const QuantizedDataset& data_;
  const CriterionSpec& spec_;
  const std::vector<double> prior_;
  std::map<FeatureSubset, CriterionValue> cache_;
  std::int64_t evaluations_ = 0;
};

// The best subset seen at each cardinality.
class BestPerCardinality {
 public:
  // Returns true if `subset` became the stored best for its size.
  bool Offer(const FeatureSubset& subset, const CriterionValue& value) {
    auto [it, inserted] =
        entries_.try_emplace(subset.size(), CardinalityEntry{subset.size(), subset, value});
    if (inserted) return true;
    if (IsBetter(value, it->second.value)) {
      it->second.subset = subset;
      it->second.value = value;
      return true;
    }
    return false;
  }

  const CardinalityEntry* Get(int cardinality) const {
    const auto it = entries_.find(cardinality);
    return it == entries_.end() ? nullptr : &it->second;
  }

  // Optimum by polarity; on ties the smallest cardinality wins.
  const CardinalityEntry* Best() const {
    const CardinalityEntry* best = nullptr;
    for (const auto& [k, entry] : entries_) {
      if (best == nullptr || IsBetter(entry.value, best->value)) best = &entry;
    }
    return best;
  }

  SearchResult Finish(std::int64_t evaluations) const {
    SearchResult result;
    if (const CardinalityEntry* best = Best()) {
      result.best_subset = best->subset;
      result.best_value = best->value;
    }
    for (const auto& [k, entry] : entries_) result.per_cardinality.push_back(entry);
    result.evaluations = evaluations;
    return result;
  }

 private:
  std::map<int, CardinalityEntry> entries_;
};

bool ThresholdReached(const SearchConfig& config, const CriterionValue& value) {
  if (!config.threshold) return false;
  return value.polarity == Polarity::kMinimize
             ? value.value <= *config.threshold + kTieTolerance
             : value.value >= *config.threshold - kTieTolerance;
}

void ValidateConfig(const QuantizedDataset& data, const SearchConfig& config) {
  if (data.num_samples() == 0) {
    throw ConfigError("search", "cannot search on an empty dataset");
  }
  if (config.max_cardinality < 1) {
    throw ConfigError("search", "max cardinality must be >= 1");
  }
  if (config.max_cardinality > data.num_features()) {
    throw ConfigError("search", "max cardinality " +
                                    std::to_string(config.max_cardinality) +
                                    " exceeds feature count " +
                                    std::to_string(data.num_features()));
  }
}

struct Candidate {
  int feature = -1;
  FeatureSubset subset;
  CriterionValue value;
};

// Feature outside `current` whose insertion gives the best value; lowest
// index on ties.
Candidate MostRelevant(const QuantizedDataset& data, const FeatureSubset& current,
                       SubsetEvaluator& evaluate) {
  Candidate best;
  for (int f = 0; f < data.num_features(); ++f) {
    if (current.contains(f)) continue;
    FeatureSubset grown = current.With(f);
    const CriterionValue value = evaluate(grown);
    if (best.feature < 0 || IsBetter(value, best.value)) {
      best = {f, std::move(grown), value};
    }
  }
  return best;
}

// Feature of `current` whose removal gives the best value. Ties go to
// `preferred` when it is a member, then to the lowest index.
Candidate LeastRelevant(const FeatureSubset& current, int preferred,
                        SubsetEvaluator& evaluate) {
  Candidate best;
  if (current.contains(preferred)) {
    FeatureSubset reduced = current.Without(preferred);
    const CriterionValue value = evaluate(reduced);
    best = {preferred, std::move(reduced), value};
  }
  for (int f : current) {
    if (f == preferred) continue;
    FeatureSubset reduced = current.Without(f);
    const CriterionValue value = evaluate(reduced);
    if (best.feature < 0 || IsBetter(value, best.value)) {
      best = {f, std::move(reduced), value};
    }
  }
  return best;
}

}  // namespace

std::optional<SearchAlgorithm> ParseSearchAlgorithm(std::string_view name) {
  if (name == "exhaustive") return SearchAlgorithm::kExhaustive;
  if (name == "sfs") return SearchAlgorithm::kSfs;
  if (name == "sffs") return SearchAlgorithm::kSffs;
  return std::nullopt;
}

std::string SearchAlgorithmName(SearchAlgorithm algorithm) {
  switch (algorithm) {
    case SearchAlgorithm::kExhaustive:
      return "exhaustive";
    case SearchAlgorithm::kSfs:
      return "sfs";
    case SearchAlgorithm::kSffs:
      return "sffs";
  }
  return "unknown";
}

std::uint64_t ExhaustiveEvaluationCount(int n, int max_cardinality) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 0;
  std::uint64_t binom = 1;  // C(n, k)
  for (int k = 1; k <= max_cardinality && k <= n; ++k) {
    // C(n, k) = C(n, k-1) * (n-k+1) / k, exact at each step.
    const std::uint64_t factor = static_cast<std::uint64_t>(n - k + 1);
    if (binom > kMax / factor) return kMax;
    binom = binom * factor / static_cast<std::uint64_t>(k);
    if (total > kMax - binom) return kMax;
    total += binom;
  }
  return total;
}

SearchResult ExhaustiveSearch(const QuantizedDataset& data, const SearchConfig& config) {
  ValidateConfig(data, config);
  const int n = data.num_features();
  const std::uint64_t required = ExhaustiveEvaluationCount(n, config.max_cardinality);
  if (required > config.exhaustive_limit) {
    std::ostringstream msg;
    msg << "exhaustive search would need " << required
        << " evaluations, above the limit of " << config.exhaustive_limit;
    throw SearchError(msg.str());
  }

  SubsetEvaluator evaluate(data, config.criterion);
  BestPerCardinality best;
  for (int k = 1; k <= config.max_cardinality; ++k) {
    // Lexicographic walk over k-combinations of 0..n-1.
    std::vector<int> combo(k);
    for (int i = 0; i < k; ++i) combo[i] = i;
    while (true) {
      const FeatureSubset subset(combo);
      best.Offer(subset, evaluate(subset));
      int i = k - 1;
      while (i >= 0 && combo[i] == n - k + i) --i;
      if (i < 0) break;
      ++combo[i];
      for (int j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
    }
  }
  return best.Finish(evaluate.evaluations());
}

SearchResult Sfs(const QuantizedDataset& data, const SearchConfig& config) {
  ValidateConfig(data, config);
  SubsetEvaluator evaluate(data, config.criterion);
  BestPerCardinality best;
  FeatureSubset current;
  while (current.size() < config.max_cardinality) {
    Candidate added = MostRelevant(data, current, evaluate);
    current = std::move(added.subset);
    best.Offer(current, added.value);
    if (ThresholdReached(config, added.value)) break;
  }
  return best.Finish(evaluate.evaluations());
}

SearchResult Sffs(const QuantizedDataset& data, const SearchConfig& config) {
  ValidateConfig(data, config);
  if (config.max_cardinality < 2) {
    throw ConfigError("search", "SFFS needs max cardinality >= 2");
  }
  // Every exclusion strictly improves a stored per-cardinality best, so the
  // walk terminates; the visit cap only guards against a broken invariant.
  constexpr int kMaxVisits = 1000;

  SubsetEvaluator evaluate(data, config.criterion);
  BestPerCardinality best;
  std::map<FeatureSubset, int> visits;
  FeatureSubset current;

  auto done = [&] {
    const CardinalityEntry* top = best.Best();
    return top != nullptr && ThresholdReached(config, top->value);
  };

  while (current.size() < config.max_cardinality) {
    // Insert the most relevant feature.
    Candidate added = MostRelevant(data, current, evaluate);
    current = std::move(added.subset);
    best.Offer(current, added.value);
    if (++visits[current] > kMaxVisits) {
      throw SearchError("SFFS revisited subset " + current.ToString() +
                        " too often; aborting");
    }
    if (done()) break;
    if (current.size() < 3) continue;

    // Conditional exclusion: only if the least relevant feature is not the
    // one just added and dropping it beats the stored best one size down.
    Candidate removed = LeastRelevant(current, added.feature, evaluate);
    if (removed.feature == added.feature) continue;
    const CardinalityEntry* smaller = best.Get(current.size() - 1);
    if (smaller != nullptr && !IsBetter(removed.value, smaller->value)) continue;
    current = std::move(removed.subset);
    best.Offer(current, removed.value);
    if (done()) break;

    // Continue excluding while that keeps improving, down to two features.
    while (current.size() > 2) {
      Candidate next = LeastRelevant(current, -1, evaluate);
      const CardinalityEntry* below = best.Get(current.size() - 1);
      if (below != nullptr && !IsBetter(next.value, below->value)) break;
      current = std::move(next.subset);
      best.Offer(current, next.value);
    }
    if (done()) break;
  }
  return best.Finish(evaluate.evaluations());
}

SearchResult RunSearch(const QuantizedDataset& data, const SearchConfig& config) {
  switch (config.algorithm) {
    case SearchAlgorithm::kExhaustive:
      return ExhaustiveSearch(data, config);
    case SearchAlgorithm::kSfs:
      return Sfs(data, config);
    case SearchAlgorithm::kSffs:
      return Sffs(data, config);
  }
  throw ConfigError("search", "unknown search algorithm");
}

}  // namespace dimred
