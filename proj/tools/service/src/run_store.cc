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

#include "dimred/service/run_store.h"

#include <ctime>
#include <fstream>
#include <sstream>

#include "dimred/error.h"

namespace dimred::service {
namespace {

namespace fs = std::filesystem;

void WriteAtomically(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error("service", "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("service", "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string MakeId(const char* prefix, int n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%06d", prefix, n);
  return buf;
}

// Parses the counter out of "run-000042"; 0 if malformed.
int IdNumber(const std::string& id) {
  const auto dash = id.rfind('-');
  if (dash == std::string::npos) return 0;
  try {
    return std::stoi(id.substr(dash + 1));
  } catch (const std::exception&) {
    return 0;
  }
}

Json OptionalString(const std::optional<std::string>& s) {
  return s ? Json(*s) : Json(nullptr);
}

std::optional<std::string> StringOrNull(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::string>();
}

RunStatus ParseStatus(const std::string& name) {
  if (name == "pending") return RunStatus::kPending;
  if (name == "running") return RunStatus::kRunning;
  if (name == "done") return RunStatus::kDone;
  return RunStatus::kFailed;
}

Json DatasetMeta(const DatasetRecord& d) {
  Json label = nullptr;
  if (d.options.label) {
    label = std::visit([](const auto& v) { return Json(v); }, *d.options.label);
  }
  return {{"dataset_id", d.id},
          {"name", d.name},
          {"created", d.created},
          {"delimiter", std::string(1, d.options.delimiter)},
          {"orientation",
           d.options.orientation == Orientation::kFeaturesAsRows ? "features-rows" : "samples-rows"},
          {"label", label}};
}

DatasetRecord DatasetFromMeta(const Json& j) {
  DatasetRecord d;
  d.id = j["dataset_id"];
  d.name = j["name"];
  d.created = j["created"];
  d.options.delimiter = j["delimiter"].get<std::string>().at(0);
  d.options.orientation = *ParseOrientation(j["orientation"].get<std::string>());
  if (j["label"].is_string()) d.options.label = j["label"].get<std::string>();
  if (j["label"].is_number_integer()) d.options.label = j["label"].get<int>();
  return d;
}

}  // namespace

std::string UtcNow() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string RunStatusName(RunStatus status) {
  switch (status) {
    case RunStatus::kPending:
      return "pending";
    case RunStatus::kRunning:
      return "running";
    case RunStatus::kDone:
      return "done";
    case RunStatus::kFailed:
      return "failed";
  }
  return "failed";
}

Json RunRecord::ToJson() const {
  Json error = nullptr;
  if (error_message) error = {{"message", *error_message}, {"module", error_module.value_or("")}};
  return {{"schema", "dimred.run.v1"},
          {"run_id", id},
          {"kind", RunKindName(kind)},
          {"status", RunStatusName(status)},
          {"dataset_id", OptionalString(dataset_id)},
          {"request", request},
          {"error", error},
          {"created", created},
          {"started", OptionalString(started)},
          {"finished", OptionalString(finished)}};
}

RunRecord RunRecord::FromJson(const Json& j) {
  RunRecord r;
  r.id = j["run_id"];
  r.kind = *ParseRunKind(j["kind"].get<std::string>());
  r.status = ParseStatus(j["status"]);
  r.dataset_id = StringOrNull(j["dataset_id"]);
  r.request = j["request"];
  if (!j["error"].is_null()) {
    r.error_message = j["error"]["message"].get<std::string>();
    r.error_module = j["error"]["module"].get<std::string>();
  }
  r.created = j["created"];
  r.started = StringOrNull(j["started"]);
  r.finished = StringOrNull(j["finished"]);
  return r;
}

RunStore::RunStore(fs::path state_dir) : dir_(std::move(state_dir)) {
  for (const char* sub : {"datasets", "runs", "results"}) fs::create_directories(dir_ / sub);
  Load();
}

void RunStore::Load() {
  for (const auto& entry : fs::directory_iterator(dir_ / "datasets")) {
    if (entry.path().extension() != ".json") continue;
    DatasetRecord d = DatasetFromMeta(Json::parse(ReadFile(entry.path())));
    next_dataset_ = std::max(next_dataset_, IdNumber(d.id) + 1);
    datasets_[d.id] = std::move(d);
  }
  for (const auto& entry : fs::directory_iterator(dir_ / "runs")) {
    if (entry.path().extension() != ".json") continue;
    RunRecord r = RunRecord::FromJson(Json::parse(ReadFile(entry.path())));
    next_run_ = std::max(next_run_, IdNumber(r.id) + 1);
    if (r.status == RunStatus::kPending || r.status == RunStatus::kRunning) {
      r.status = RunStatus::kFailed;
      r.error_message = "interrupted by service restart";
      r.error_module = "service";
      r.finished = UtcNow();
      SaveRun(r);
    }
    runs_[r.id] = std::move(r);
  }
}

void RunStore::SaveRun(const RunRecord& run) {
  WriteAtomically(dir_ / "runs" / (run.id + ".json"), Serialize(run.ToJson()));
}

DatasetRecord RunStore::AddDataset(const std::string& name, const std::string& text,
                                   const LoadOptions& options) {
  std::lock_guard lock(mu_);
  DatasetRecord d;
  d.id = MakeId("ds", next_dataset_++);
  d.name = name;
  d.created = UtcNow();
  d.options = options;
  if (d.options.delimiter == 0) d.options.delimiter = ',';
  WriteAtomically(dir_ / "datasets" / (d.id + ".data"), text);
  WriteAtomically(dir_ / "datasets" / (d.id + ".json"), Serialize(DatasetMeta(d)));
  datasets_[d.id] = d;
  return d;
}

std::optional<DatasetRecord> RunStore::FindDataset(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = datasets_.find(id);
  if (it == datasets_.end()) return std::nullopt;
  return it->second;
}

std::string RunStore::ReadDatasetText(const std::string& id) const {
  return ReadFile(dir_ / "datasets" / (id + ".data"));
}

RunRecord RunStore::CreateRun(RunKind kind, std::optional<std::string> dataset_id,
                              Json request) {
  std::lock_guard lock(mu_);
  RunRecord r;
  r.id = MakeId("run", next_run_++);
  r.kind = kind;
  r.dataset_id = std::move(dataset_id);
  r.request = std::move(request);
  r.created = UtcNow();
  SaveRun(r);
  runs_[r.id] = r;
  return r;
}

bool RunStore::Advance(const std::string& id, RunStatus from_at_most, RunStatus to,
                       const std::function<void(RunRecord&)>& update) {
  std::lock_guard lock(mu_);
  const auto it = runs_.find(id);
  if (it == runs_.end() || it->second.status > from_at_most) return false;
  RunRecord next = it->second;
  next.status = to;
  update(next);
  SaveRun(next);
  it->second = std::move(next);
  return true;
}

bool RunStore::MarkRunning(const std::string& id) {
  return Advance(id, RunStatus::kPending, RunStatus::kRunning,
                 [](RunRecord& r) { r.started = UtcNow(); });
}

bool RunStore::MarkDone(const std::string& id, const std::string& document) {
  return Advance(id, RunStatus::kRunning, RunStatus::kDone, [&](RunRecord& r) {
    // The result lands before the record says done, so a done run always
    // has a readable result.
    WriteAtomically(dir_ / "results" / (id + ".json"), document);
    r.finished = UtcNow();
  });
}

bool RunStore::MarkFailed(const std::string& id, const std::string& message,
                          const std::string& module) {
  return Advance(id, RunStatus::kRunning, RunStatus::kFailed, [&](RunRecord& r) {
    r.error_message = message;
    r.error_module = module;
    r.finished = UtcNow();
  });
}

std::optional<RunRecord> RunStore::FindRun(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = runs_.find(id);
  if (it == runs_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> RunStore::ReadResult(const std::string& id) const {
  const auto run = FindRun(id);
  if (!run || run->status != RunStatus::kDone) return std::nullopt;
  return ReadFile(dir_ / "results" / (id + ".json"));
}

std::vector<RunRecord> RunStore::ListRuns() const {
  std::lock_guard lock(mu_);
  std::vector<RunRecord> out;
  for (const auto& [id, run] : runs_) out.push_back(run);
  return out;
}

}  // namespace dimred::service
