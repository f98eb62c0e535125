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

#include "dimred/validation.h"

#include <cmath>
#include <numeric>

#include "dimred/error.h"
#include "dimred/random.h"

namespace dimred {
namespace {

void CheckConfig(const CvConfig& config) {
  if (config.executions < 1) {
    throw ConfigError("validation", "executions must be >= 1");
  }
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
    throw ConfigError("validation", "train fraction must lie in (0, 1)");
  }
}

// Runs one execution on an already split, already quantized pair.
CvRun Execute(int execution, std::uint64_t seed, const QuantizedDataset& train,
              std::span<const int> train_rows, const QuantizedDataset& test,
              const CvConfig& config, const CvHooks& hooks) {
  if (hooks.on_feature_selection) {
    hooks.on_feature_selection(execution, train, train_rows);
  }
  const SearchResult selection = RunSearch(train, config.search);
  const TableClassifier classifier = TableClassifier::Design(
      train, selection.best_subset, config.generalization, seed);
  CvRun run;
  run.seed = seed;
  run.subset = selection.best_subset;
  run.value = selection.best_value;
  run.accuracy = Accuracy(classifier, test);
  return run;
}

template <typename Body>
CvRun WithExecutionContext(int execution, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.module(), "execution " + std::to_string(execution) + ": " + e.what());
  }
}

}  // namespace

std::vector<double> CvReport::chart_series() const {
  std::vector<double> series;
  series.reserve(runs.size());
  for (const auto& run : runs) series.push_back(run.accuracy);
  return series;
}

std::uint64_t ExecutionSeed(std::uint64_t master_seed, int index) {
  return DeriveSeed(master_seed, static_cast<std::uint64_t>(index));
}

void Summarize(CvReport& report) {
  const double n = static_cast<double>(report.runs.size());
  if (report.runs.empty()) {
    report.mean_accuracy = report.accuracy_std = 0.0;
    return;
  }
  double sum = 0.0;
  for (const auto& run : report.runs) sum += run.accuracy;
  report.mean_accuracy = sum / n;
  double squares = 0.0;
  for (const auto& run : report.runs) {
    const double d = run.accuracy - report.mean_accuracy;
    squares += d * d;
  }
  report.accuracy_std = report.runs.size() > 1 ? std::sqrt(squares / (n - 1)) : 0.0;
}

CvReport RunCrossValidation(const QuantizedDataset& data, const CvConfig& config,
                            const CvHooks& hooks) {
  CheckConfig(config);
  CvReport report;
  for (int e = 0; e < config.executions; ++e) {
    report.runs.push_back(WithExecutionContext(e, [&] {
      const std::uint64_t seed = ExecutionSeed(config.master_seed, e);
      const Split split = SplitDataset(data, config.train_fraction, seed);
      return Execute(e, seed, split.train, split.rows.train, split.test, config, hooks);
    }));
  }
  Summarize(report);
  return report;
}

CvReport RunCrossValidation(const RawDataset& data, int quantization_degree,
                            QuantizationOrder order, const CvConfig& config,
                            const CvHooks& hooks) {
  CheckConfig(config);
  ValidateForClassification(data);
  if (order == QuantizationOrder::kBeforeSplit) {
    const QuantizationSpec spec = FitQuantizer(data, quantization_degree);
    if (hooks.on_quantizer_fit) {
      std::vector<int> all(data.num_samples());
      std::iota(all.begin(), all.end(), 0);
      hooks.on_quantizer_fit(-1, spec, all);
    }
    return RunCrossValidation(Quantize(data, spec), config, hooks);
  }

  // Class indices over the full label set so train and test agree.
  const LabelEncoding labels = EncodeLabels(data.labels);
  CvReport report;
  for (int e = 0; e < config.executions; ++e) {
    report.runs.push_back(WithExecutionContext(e, [&] {
      const std::uint64_t seed = ExecutionSeed(config.master_seed, e);
      const SplitIndices rows = SplitRows(labels.indices, config.train_fraction, seed);
      const RawDataset raw_train = data.SelectRows(rows.train);
      const RawDataset raw_test = data.SelectRows(rows.test);
      const QuantizationSpec spec = FitQuantizer(raw_train, quantization_degree);
      if (hooks.on_quantizer_fit) hooks.on_quantizer_fit(e, spec, rows.train);

      auto quantize = [&](const RawDataset& raw, std::span<const int> idx) {
        const QuantizedDataset q = Quantize(raw, spec);
        std::vector<int> label_idx;
        for (int r : idx) label_idx.push_back(labels.indices[r]);
        return QuantizedDataset(q.features(), q.samples(), q.alphabet_sizes(),
                                std::move(label_idx), labels.names);
      };
      const QuantizedDataset train = quantize(raw_train, rows.train);
      const QuantizedDataset test = quantize(raw_test, rows.test);
      return Execute(e, seed, train, rows.train, test, config, hooks);
    }));
  }
  Summarize(report);
  return report;
}

}  // namespace dimred
