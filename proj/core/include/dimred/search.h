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

#ifndef DIMRED_SEARCH_H_
#define DIMRED_SEARCH_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dimred/criteria.h"
#include "dimred/dataset.h"
#include "dimred/distribution.h"

namespace dimred {

enum class SearchAlgorithm { kExhaustive, kSfs, kSffs };

std::optional<SearchAlgorithm> ParseSearchAlgorithm(std::string_view name);
std::string SearchAlgorithmName(SearchAlgorithm algorithm);

inline constexpr std::uint64_t kDefaultExhaustiveLimit = 10'000'000;

struct SearchConfig {
  SearchAlgorithm algorithm = SearchAlgorithm::kSffs;
  int max_cardinality = 1;
  // Stop as soon as the best value reaches this level (<= for minimized
  // criteria, >= for maximized ones). Ignored by exhaustive search.
  std::optional<double> threshold;
  CriterionSpec criterion;
  std::uint64_t exhaustive_limit = kDefaultExhaustiveLimit;
};

struct CardinalityEntry {
  int cardinality = 0;
  FeatureSubset subset;
  CriterionValue value;
};

struct SearchResult {
  FeatureSubset best_subset;
  CriterionValue best_value;
  // Best subset found for each visited cardinality, ascending.
  std::vector<CardinalityEntry> per_cardinality;
  // Criterion evaluations actually performed (cache hits excluded).
  std::int64_t evaluations = 0;
};

// Sum of C(n, k) for k = 1..max_cardinality, saturating.
std::uint64_t ExhaustiveEvaluationCount(int n, int max_cardinality);

SearchResult ExhaustiveSearch(const QuantizedDataset& data, const SearchConfig& config);
SearchResult Sfs(const QuantizedDataset& data, const SearchConfig& config);
SearchResult Sffs(const QuantizedDataset& data, const SearchConfig& config);

// Dispatches on config.algorithm.
SearchResult RunSearch(const QuantizedDataset& data, const SearchConfig& config);

}  // namespace dimred

#endif  // DIMRED_SEARCH_H_
