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

#ifndef DIMRED_VALIDATION_H_
#define DIMRED_VALIDATION_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dimred/classifier.h"
#include "dimred/dataset.h"
#include "dimred/search.h"

namespace dimred {

// Repeated random holdout: each execution draws a fresh train/test split.
struct CvConfig {
  int executions = 10;
  double train_fraction = 0.8;
  SearchConfig search;
  Generalization generalization = Generalization::kNearestNeighbor;
  std::uint64_t master_seed = 0;
};

struct CvRun {
  std::uint64_t seed = 0;
  FeatureSubset subset;
  CriterionValue value;
  double accuracy = 0.0;
};

struct CvReport {
  std::vector<CvRun> runs;
  double mean_accuracy = 0.0;
  // Sample standard deviation (n - 1 denominator); 0 for a single run.
  double accuracy_std = 0.0;

  // Accuracy per execution index, for plotting.
  std::vector<double> chart_series() const;
};

// Where quantization happens when CV starts from real-valued data.
enum class QuantizationOrder {
  kPerTrainingSplit,  // fit on each training split, apply to its test split
  kBeforeSplit,       // fit once on all data, then split
};

// Instrumentation for leakage checks. `rows` are indices into the dataset
// handed to RunCrossValidation.
struct CvHooks {
  std::function<void(int execution, const QuantizedDataset& train,
                     std::span<const int> rows)>
      on_feature_selection;
  std::function<void(int execution, const QuantizationSpec& spec,
                     std::span<const int> rows)>
      on_quantizer_fit;
};

// Seed used for execution `index`.
std::uint64_t ExecutionSeed(std::uint64_t master_seed, int index);

// Recomputes mean and sample standard deviation from `runs`.
void Summarize(CvReport& report);

// Errors from an execution are rethrown as dimred::Error carrying the
// execution index in the message.
CvReport RunCrossValidation(const QuantizedDataset& data, const CvConfig& config,
                            const CvHooks& hooks = {});

CvReport RunCrossValidation(const RawDataset& data, int quantization_degree,
                            QuantizationOrder order, const CvConfig& config,
                            const CvHooks& hooks = {});

}  // namespace dimred

#endif  // DIMRED_VALIDATION_H_
