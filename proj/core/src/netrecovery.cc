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

#include "dimred/netrecovery.h"

#include <algorithm>
#include <map>

#include "dimred/error.h"
#include "dimred/random.h"

namespace dimred {
namespace {

std::vector<std::string> GeneNames(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("g" + std::to_string(i));
  return names;
}

}  // namespace

int BooleanFunction::Evaluate(std::span<const int> state) const {
  std::size_t row = 0;
  for (int input : inputs) row = (row << 1) | static_cast<std::size_t>(state[input] != 0);
  return truth_table[row];
}

bool BooleanFunction::DependsOnAllInputs() const {
  const std::size_t k = inputs.size();
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t bit = std::size_t{1} << (k - 1 - i);
    bool matters = false;
    for (std::size_t row = 0; row < truth_table.size() && !matters; ++row) {
      matters = truth_table[row] != truth_table[row ^ bit];
    }
    if (!matters) return false;
  }
  return true;
}

std::set<Edge> GroundTruthNetwork::Edges() const {
  std::set<Edge> edges;
  for (int target = 0; target < node_count; ++target) {
    for (int p : functions[target].inputs) edges.insert({p, target});
  }
  return edges;
}

std::vector<int> GroundTruthNetwork::Step(std::span<const int> state) const {
  std::vector<int> next(node_count);
  for (int g = 0; g < node_count; ++g) next[g] = functions[g].Evaluate(state);
  return next;
}

GroundTruthNetwork GenerateNetwork(int nodes, double avg_edges_per_vertex,
                                   std::uint64_t seed,
                                   const NetworkGeneratorOptions& options) {
  if (nodes < 2) throw ConfigError("netrecovery", "network needs at least 2 nodes");
  if (!(avg_edges_per_vertex >= 0.0)) {
    throw ConfigError("netrecovery", "average edges per vertex must be >= 0");
  }
  const int candidates = options.allow_self_loops ? nodes : nodes - 1;
  const double p = std::min(1.0, avg_edges_per_vertex / candidates);

  Rng rng(seed);
  GroundTruthNetwork net;
  net.node_count = nodes;
  net.functions.resize(nodes);
  for (int target = 0; target < nodes; ++target) {
    BooleanFunction& fn = net.functions[target];
    for (int source = 0; source < nodes; ++source) {
      if (source == target && !options.allow_self_loops) continue;
      if (rng.Bernoulli(p)) fn.inputs.push_back(source);
    }
    if (static_cast<int>(fn.inputs.size()) > options.max_in_degree) {
      throw ConfigError("netrecovery", "generated in-degree exceeds the limit");
    }
    fn.truth_table.resize(std::size_t{1} << fn.inputs.size());
    do {
      for (int& out : fn.truth_table) out = static_cast<int>(rng.UniformIndex(2));
    } while (!fn.inputs.empty() && !fn.DependsOnAllInputs());
  }
  return net;
}

QuantizedDataset SimulateFromState(const GroundTruthNetwork& net,
                                   std::span<const int> initial, int timestamps) {
  if (timestamps < 2) throw ConfigError("netrecovery", "need at least 2 timestamps");
  if (static_cast<int>(initial.size()) != net.node_count) {
    throw ConfigError("netrecovery", "initial state has the wrong length");
  }
  Matrix<int> series(timestamps, net.node_count);
  std::vector<int> state(initial.begin(), initial.end());
  for (int t = 0; t < timestamps; ++t) {
    std::copy(state.begin(), state.end(), series.row(t).begin());
    state = net.Step(state);
  }
  return QuantizedDataset(GeneNames(net.node_count), std::move(series),
                          std::vector<int>(net.node_count, 2),
                          std::vector<int>(timestamps, 0), {""});
}

QuantizedDataset SimulateTimeSeries(const GroundTruthNetwork& net, int timestamps,
                                    std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> initial(net.node_count);
  for (int& v : initial) v = static_cast<int>(rng.UniformIndex(2));
  return SimulateFromState(net, initial, timestamps);
}

std::vector<QuantizedDataset> SimulateAllTransitions(const GroundTruthNetwork& net) {
  if (net.node_count > 20) {
    throw ConfigError("netrecovery", "too many nodes to enumerate every state");
  }
  std::vector<QuantizedDataset> segments;
  const std::uint32_t states = 1u << net.node_count;
  std::vector<int> state(net.node_count);
  for (std::uint32_t code = 0; code < states; ++code) {
    for (int g = 0; g < net.node_count; ++g) state[g] = (code >> g) & 1u;
    segments.push_back(SimulateFromState(net, state, 2));
  }
  return segments;
}

RecoveredNetwork RecoverNetwork(std::span<const QuantizedDataset> segments,
                                const SearchConfig& config) {
  if (segments.empty()) throw ConfigError("netrecovery", "no time series given");
  const QuantizedDataset& first = segments.front();
  const int genes = first.num_features();
  int pairs = 0;
  for (const auto& segment : segments) {
    if (segment.num_features() != genes || segment.alphabet_sizes() != first.alphabet_sizes()) {
      throw ConfigError("netrecovery", "time series segments disagree on genes");
    }
    pairs += std::max(0, segment.num_samples() - 1);
  }
  if (pairs < 1) throw ConfigError("netrecovery", "need at least 2 time steps");

  // Predictor rows (state at t) are shared by every target.
  Matrix<int> current(pairs, genes);
  Matrix<int> next(pairs, genes);
  int r = 0;
  for (const auto& segment : segments) {
    for (int t = 0; t + 1 < segment.num_samples(); ++t, ++r) {
      for (int g = 0; g < genes; ++g) {
        current(r, g) = segment.value(t, g);
        next(r, g) = segment.value(t + 1, g);
      }
    }
  }

  SearchConfig target_config = config;
  target_config.max_cardinality = std::min(config.max_cardinality, genes);

  RecoveredNetwork recovered;
  recovered.node_count = genes;
  for (int target = 0; target < genes; ++target) {
    TargetRecovery result;
    result.target = target;

    std::vector<std::string> raw_labels;
    raw_labels.reserve(pairs);
    for (int i = 0; i < pairs; ++i) raw_labels.push_back(std::to_string(next(i, target)));
    LabelEncoding labels = EncodeLabels(raw_labels);
    if (labels.names.size() < 2) {
      result.constant = true;
      recovered.targets.push_back(std::move(result));
      continue;
    }
    try {
      const QuantizedDataset supervised(first.features(), current, first.alphabet_sizes(),
                                        std::move(labels.indices), std::move(labels.names));
      const SearchResult search = RunSearch(supervised, target_config);
      result.predictors = search.best_subset;
      result.value = search.best_value;
      for (int p : search.best_subset) recovered.edges.insert({p, target});
    } catch (const Error& e) {
      result.failed = true;
      result.message = std::string(e.module()) + ": " + e.what();
    }
    recovered.targets.push_back(std::move(result));
  }
  return recovered;
}

RecoveredNetwork RecoverNetwork(const QuantizedDataset& series,
                                const SearchConfig& config) {
  return RecoverNetwork(std::span<const QuantizedDataset>(&series, 1), config);
}

NetworkScore Score(const std::set<Edge>& recovered, const std::set<Edge>& truth) {
  NetworkScore score;
  for (const Edge& e : recovered) {
    if (truth.contains(e)) {
      ++score.true_positives;
    } else {
      ++score.false_positives;
      score.false_positive_edges.insert(e);
    }
  }
  for (const Edge& e : truth) {
    if (!recovered.contains(e)) {
      ++score.false_negatives;
      score.false_negative_edges.insert(e);
    }
  }
  const int found = score.true_positives + score.false_positives;
  const int actual = score.true_positives + score.false_negatives;
  score.precision = found == 0 ? 1.0 : static_cast<double>(score.true_positives) / found;
  score.recall = actual == 0 ? 1.0 : static_cast<double>(score.true_positives) / actual;
  return score;
}

NetworkScore Score(const RecoveredNetwork& recovered, const GroundTruthNetwork& truth) {
  if (recovered.node_count != truth.node_count) {
    throw DomainError("netrecovery", "recovered and true networks differ in node count");
  }
  return Score(recovered.edges, truth.Edges());
}

}  // namespace dimred
