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

#include <gtest/gtest.h>

#include "dimred/error.h"

namespace dimred {
namespace {

BooleanFunction Copy(int source) { return {{source}, {0, 1}}; }

// 0 (constant 1) -> 1 -> 2, each node copying its predecessor.
GroundTruthNetwork Chain() { return {3, {{{}, {1}}, Copy(0), Copy(1)}}; }

// 0 -> 1 -> 2 -> 0: the single 1 rotates through the ring.
GroundTruthNetwork Ring() { return {3, {Copy(2), Copy(0), Copy(1)}}; }

SearchConfig Config(SearchAlgorithm algorithm, int max_cardinality) {
  SearchConfig config;
  config.algorithm = algorithm;
  config.max_cardinality = max_cardinality;
  return config;
}

TEST(BooleanFunctionTest, FirstInputIsMostSignificant) {
  // inputs (a, b); table rows 00, 01, 10, 11 -> a AND NOT b.
  const BooleanFunction fn{{0, 1}, {0, 0, 1, 0}};
  EXPECT_EQ(fn.Evaluate(std::vector<int>{1, 0}), 1);
  EXPECT_EQ(fn.Evaluate(std::vector<int>{0, 1}), 0);
  EXPECT_TRUE(fn.DependsOnAllInputs());
  EXPECT_FALSE((BooleanFunction{{0, 1}, {0, 0, 1, 1}}).DependsOnAllInputs());
}

TEST(GenerateNetworkTest, MeanEdgeCountMatchesTheAverage) {
  double total = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto net = GenerateNetwork(10, 1.0, seed);
    const auto edges = net.Edges();
    total += static_cast<double>(edges.size());
    for (const Edge& e : edges) EXPECT_NE(e.predictor, e.target);
    for (const auto& fn : net.functions) {
      EXPECT_EQ(fn.truth_table.size(), std::size_t{1} << fn.inputs.size());
      EXPECT_TRUE(fn.DependsOnAllInputs());
    }
  }
  EXPECT_NEAR(total / 1000, 10.0, 2.0);
}

TEST(GenerateNetworkTest, ZeroAverageGivesConstants) {
  const auto net = GenerateNetwork(6, 0.0, 3);
  EXPECT_TRUE(net.Edges().empty());
  const auto series = SimulateTimeSeries(net, 5, 9);
  for (int t = 2; t < 5; ++t) {
    for (int g = 0; g < 6; ++g) EXPECT_EQ(series.value(t, g), series.value(1, g));
  }
}

TEST(GenerateNetworkTest, SeededAndValidated) {
  const auto a = GenerateNetwork(10, 1.5, 77);
  const auto b = GenerateNetwork(10, 1.5, 77);
  EXPECT_EQ(a.Edges(), b.Edges());
  for (int g = 0; g < 10; ++g) EXPECT_EQ(a.functions[g].truth_table, b.functions[g].truth_table);
  EXPECT_EQ(SimulateTimeSeries(a, 20, 5), SimulateTimeSeries(b, 20, 5));
  EXPECT_THROW(GenerateNetwork(1, 1.0, 0), ConfigError);
  EXPECT_THROW(GenerateNetwork(5, -1.0, 0), ConfigError);
}

TEST(SimulateTest, ChainShiftsValuesAlongTime) {
  const auto series = SimulateFromState(Chain(), std::vector<int>{1, 0, 0}, 4);
  EXPECT_EQ(series.num_samples(), 4);
  for (int t = 0; t + 1 < 4; ++t) {
    EXPECT_EQ(series.value(t + 1, 1), series.value(t, 0));
    EXPECT_EQ(series.value(t + 1, 2), series.value(t, 1));
  }
  EXPECT_EQ(series.value(3, 2), 1);
  EXPECT_THROW(SimulateFromState(Chain(), std::vector<int>{1, 0, 0}, 1), ConfigError);
}

TEST(RecoverNetworkTest, RingIsRecoveredExactly) {
  const auto series = SimulateFromState(Ring(), std::vector<int>{1, 0, 0}, 10);
  for (auto algorithm : {SearchAlgorithm::kSffs, SearchAlgorithm::kExhaustive}) {
    const auto recovered = RecoverNetwork(series, Config(algorithm, 2));
    const auto score = Score(recovered, Ring());
    EXPECT_EQ(recovered.edges, Ring().Edges());
    EXPECT_EQ(score.false_positives, 0);
    EXPECT_EQ(score.false_negatives, 0);
  }
}

TEST(RecoverNetworkTest, ConstantTargetGetsNoPredictors) {
  const auto series = SimulateFromState(Chain(), std::vector<int>{1, 0, 0}, 6);
  const auto recovered = RecoverNetwork(series, Config(SearchAlgorithm::kSffs, 2));
  ASSERT_EQ(recovered.targets.size(), 3u);
  EXPECT_TRUE(recovered.targets[0].constant);
  EXPECT_TRUE(recovered.targets[0].predictors.empty());
  for (const Edge& e : recovered.edges) EXPECT_NE(e.target, 0);
}

TEST(RecoverNetworkTest, FullTransitionCoverageRecoversChain) {
  const auto segments = SimulateAllTransitions(Chain());
  EXPECT_EQ(segments.size(), 8u);
  const auto recovered = RecoverNetwork(segments, Config(SearchAlgorithm::kExhaustive, 3));
  // Node 0 is constant in every segment, so only the two copies are edges.
  EXPECT_EQ(recovered.edges, Chain().Edges());
  EXPECT_TRUE(recovered.targets[0].constant);
}

TEST(RecoverNetworkTest, SegmentsAreNotJoined) {
  // Two segments where joining them would pair (1,1,1) with (0,0,0).
  const auto a = SimulateFromState(Ring(), std::vector<int>{1, 0, 0}, 4);
  const auto b = SimulateFromState(Ring(), std::vector<int>{0, 1, 0}, 4);
  const std::vector<QuantizedDataset> segments = {a, b};
  const auto recovered = RecoverNetwork(segments, Config(SearchAlgorithm::kExhaustive, 1));
  EXPECT_EQ(recovered.edges, Ring().Edges());
}

TEST(RecoverNetworkTest, SearchFailuresAreFlaggedPerTarget) {
  const auto series = SimulateFromState(Ring(), std::vector<int>{1, 0, 0}, 10);
  auto config = Config(SearchAlgorithm::kExhaustive, 3);
  config.exhaustive_limit = 2;
  const auto recovered = RecoverNetwork(series, config);
  for (const auto& target : recovered.targets) {
    EXPECT_TRUE(target.failed);
    EXPECT_NE(target.message.find("search"), std::string::npos);
  }
  EXPECT_TRUE(recovered.edges.empty());
}

TEST(ScoreTest, SetArithmetic) {
  const std::set<Edge> truth = {{0, 1}};
  const auto exact = Score(truth, truth);
  EXPECT_EQ(exact.precision, 1.0);
  EXPECT_EQ(exact.recall, 1.0);

  const auto empty = Score(std::set<Edge>{}, truth);
  EXPECT_EQ(empty.recall, 0.0);
  EXPECT_EQ(empty.precision, 1.0);
  EXPECT_EQ(empty.false_negatives, 1);

  const auto extra = Score(std::set<Edge>{{0, 1}, {2, 1}}, truth);
  EXPECT_EQ(extra.true_positives, 1);
  EXPECT_EQ(extra.false_positives, 1);
  EXPECT_EQ(extra.false_negatives, 0);
  EXPECT_EQ(extra.false_positive_edges, (std::set<Edge>{{2, 1}}));
  EXPECT_DOUBLE_EQ(extra.precision, 0.5);
}

TEST(ScoreTest, IdentitiesOnGeneratedNetworks) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto truth = GenerateNetwork(8, 1.0, seed);
    const auto series = SimulateTimeSeries(truth, 20, seed + 100);
    const auto recovered = RecoverNetwork(series, Config(SearchAlgorithm::kSffs, 3));
    const auto score = Score(recovered, truth);
    EXPECT_EQ(score.true_positives + score.false_negatives,
              static_cast<int>(truth.Edges().size()));
    EXPECT_EQ(score.true_positives + score.false_positives,
              static_cast<int>(recovered.edges.size()));
  }
  RecoveredNetwork wrong;
  wrong.node_count = 2;
  EXPECT_THROW(Score(wrong, Ring()), DomainError);
}

}  // namespace
}  // namespace dimred
