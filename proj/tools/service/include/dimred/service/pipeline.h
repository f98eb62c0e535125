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

#ifndef DIMRED_SERVICE_PIPELINE_H_
#define DIMRED_SERVICE_PIPELINE_H_

// Pipelines shared by the CLI and the HTTP service. Both front ends turn
// their input into the same JSON config object and call the functions below,
// so equal configs give byte-identical documents.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "dimred/dataset.h"

namespace dimred::service {

using Json = nlohmann::json;

enum class RunKind { kSelect, kCrossValidation, kNetworkRecovery };

std::optional<RunKind> ParseRunKind(std::string_view name);
std::string RunKindName(RunKind kind);

// Schema identifiers carried in the "schema" field of every document.
inline constexpr char kSelectSchema[] = "dimred.select.v1";
inline constexpr char kCvSchema[] = "dimred.cv.v1";
inline constexpr char kNetrecSchema[] = "dimred.netrec.v1";
inline constexpr char kQuantizeSchema[] = "dimred.quantize.v1";

// Input data plus what identifies it inside documents. File paths and
// upload ids never appear in documents.
struct DatasetInput {
  RawDataset raw;
  std::string label;  // label column designator, empty for unlabeled
};

DatasetInput LoadDatasetText(std::string_view text, const LoadOptions& options);

// "fnv1a64:<16 hex digits>" over a canonical rendering of the data.
std::string DatasetDigest(const RawDataset& data);

Json DescribeDataset(const DatasetInput& input);

// Fills defaults and rejects unknown keys or bad values (ConfigError), so
// the echoed request in every document lists every setting.
Json NormalizeConfig(RunKind kind, const Json& config);

// `config` must be normalized. `input` is required except for netrec with
// a "generate" block.
Json RunSelect(const DatasetInput& input, const Json& config);
Json RunCv(const DatasetInput& input, const Json& config);
Json RunNetrec(const DatasetInput* input, const Json& config);

// Normalizes `config` first.
Json Run(RunKind kind, const DatasetInput* input, const Json& config);

Json RunQuantize(const DatasetInput& input, int degree);

// Canonical serialization: sorted keys, two-space indent, trailing newline.
std::string Serialize(const Json& document);

}  // namespace dimred::service

#endif  // DIMRED_SERVICE_PIPELINE_H_
