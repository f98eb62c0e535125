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

#ifndef DIMRED_NETRECOVERY_H_
#define DIMRED_NETRECOVERY_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dimred/dataset.h"
#include "dimred/search.h"

namespace dimred {

struct Edge {
  int predictor = 0;
  int target = 0;

  auto operator<=>(const Edge&) const = default;
};

// Deterministic boolean update rule. Row `r` of the truth table holds the
// output for the input tuple whose bits spell `r`, inputs[0] most
// significant.
struct BooleanFunction {
  std::vector<int> inputs;
  std::vector<int> truth_table;

  int Evaluate(std::span<const int> state) const;
  // True if flipping each input changes the output for some tuple.
  bool DependsOnAllInputs() const;
};

struct GroundTruthNetwork {
  int node_count = 0;
  std::vector<BooleanFunction> functions;  // one per target node

  std::set<Edge> Edges() const;
  std::vector<int> Step(std::span<const int> state) const;
};

struct NetworkGeneratorOptions {
  bool allow_self_loops = false;
  // Functions with more inputs than this are refused.
  int max_in_degree = 16;
};

// Erdos-Renyi digraph with edge probability avg_edges / (nodes - 1). Each
// node with predecessors gets a uniformly random boolean function among
// those that depend on every predecessor; nodes without predecessors get a
// random constant.
GroundTruthNetwork GenerateNetwork(int nodes, double avg_edges_per_vertex,
                                   std::uint64_t seed,
                                   const NetworkGeneratorOptions& options = {});

// Synchronous trajectory from `initial`; row t is the state at time t.
// Features are named g0, g1, ...; values are binary; labels are unused.
QuantizedDataset SimulateFromState(const GroundTruthNetwork& net,
                                   std::span<const int> initial, int timestamps);

// Same, from a uniformly random initial state.
QuantizedDataset SimulateTimeSeries(const GroundTruthNetwork& net, int timestamps,
                                    std::uint64_t seed);

// One two-step segment per possible state (2^nodes of them, nodes <= 20).
std::vector<QuantizedDataset> SimulateAllTransitions(const GroundTruthNetwork& net);

struct TargetRecovery {
  int target = 0;
  FeatureSubset predictors;
  std::optional<CriterionValue> value;
  bool constant = false;  // target never changed in the window
  bool failed = false;    // search raised; `message` holds the reason
  std::string message;
};

struct RecoveredNetwork {
  int node_count = 0;
  std::set<Edge> edges;
  std::vector<TargetRecovery> targets;
};

// For every target gene, predicts its value at t+1 from all genes at t by
// feature selection. Each segment is an independent trajectory; pairs never
// straddle segments.
RecoveredNetwork RecoverNetwork(std::span<const QuantizedDataset> segments,
                                const SearchConfig& config);
RecoveredNetwork RecoverNetwork(const QuantizedDataset& series,
                                const SearchConfig& config);

struct NetworkScore {
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
  double precision = 1.0;  // 1 when nothing was recovered
  double recall = 1.0;     // 1 when the truth has no edges
  std::set<Edge> false_positive_edges;
  std::set<Edge> false_negative_edges;
};

NetworkScore Score(const RecoveredNetwork& recovered, const GroundTruthNetwork& truth);
NetworkScore Score(const std::set<Edge>& recovered, const std::set<Edge>& truth);

}  // namespace dimred

#endif  // DIMRED_NETRECOVERY_H_
