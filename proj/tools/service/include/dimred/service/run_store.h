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

#ifndef DIMRED_SERVICE_RUN_STORE_H_
#define DIMRED_SERVICE_RUN_STORE_H_

// Datasets and runs persisted under a state directory:
//
//   datasets/ds-000001.json   metadata
//   datasets/ds-000001.data   uploaded text, never modified
//   runs/run-000001.json      run record
//   results/run-000001.json   result document, written once
//
// Files are replaced atomically (write + rename). Runs found pending or
// running at startup were interrupted and are marked failed.

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dimred/dataset.h"
#include "dimred/service/pipeline.h"

namespace dimred::service {

struct DatasetRecord {
  std::string id;
  std::string name;
  std::string created;
  LoadOptions options;
};

enum class RunStatus { kPending, kRunning, kDone, kFailed };

std::string RunStatusName(RunStatus status);

struct RunRecord {
  std::string id;
  RunKind kind = RunKind::kSelect;
  RunStatus status = RunStatus::kPending;
  std::optional<std::string> dataset_id;
  Json request;
  std::optional<std::string> error_message;
  std::optional<std::string> error_module;
  std::string created;
  std::optional<std::string> started;
  std::optional<std::string> finished;

  // dimred.run.v1 document.
  Json ToJson() const;
  static RunRecord FromJson(const Json& json);
};

class RunStore {
 public:
  explicit RunStore(std::filesystem::path state_dir);

  const std::filesystem::path& state_dir() const { return dir_; }

  DatasetRecord AddDataset(const std::string& name, const std::string& text,
                           const LoadOptions& options);
  std::optional<DatasetRecord> FindDataset(const std::string& id) const;
  std::string ReadDatasetText(const std::string& id) const;

  RunRecord CreateRun(RunKind kind, std::optional<std::string> dataset_id, Json request);
  // Status only moves forward; these return false for an illegal transition.
  bool MarkRunning(const std::string& id);
  bool MarkDone(const std::string& id, const std::string& document);
  bool MarkFailed(const std::string& id, const std::string& message,
                  const std::string& module);

  std::optional<RunRecord> FindRun(const std::string& id) const;
  std::optional<std::string> ReadResult(const std::string& id) const;
  std::vector<RunRecord> ListRuns() const;

 private:
  void Load();
  void SaveRun(const RunRecord& run);
  bool Advance(const std::string& id, RunStatus from_at_most, RunStatus to,
               const std::function<void(RunRecord&)>& update);

  std::filesystem::path dir_;
  mutable std::mutex mu_;
  std::map<std::string, DatasetRecord> datasets_;
  std::map<std::string, RunRecord> runs_;
  int next_dataset_ = 1;
  int next_run_ = 1;
};

// "2026-10-16T08:30:00Z"
std::string UtcNow();

}  // namespace dimred::service

#endif  // DIMRED_SERVICE_RUN_STORE_H_
