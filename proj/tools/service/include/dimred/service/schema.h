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

#ifndef DIMRED_SERVICE_SCHEMA_H_
#define DIMRED_SERVICE_SCHEMA_H_

// Validation of documents against the JSON schemas in tools/service/schemas.
// Supported keywords: type, properties, required, additionalProperties
// (boolean), items, enum, const, minimum, maximum, minItems, oneOf, and
// local "$ref": "#/$defs/<name>".

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace dimred::service {

class SchemaSet {
 public:
  // Loads every *.schema.json in `dir`, keyed by its "$id".
  static SchemaSet LoadDirectory(const std::filesystem::path& dir);

  void Add(const nlohmann::json& schema);

  // Validates against the schema named by the document's "schema" field, or
  // by `schema_id` when given. Returns the list of violations, empty if valid.
  std::vector<std::string> Validate(const nlohmann::json& document,
                                    const std::string& schema_id = "") const;

  bool contains(const std::string& id) const { return schemas_.contains(id); }

 private:
  std::map<std::string, nlohmann::json> schemas_;
};

}  // namespace dimred::service

#endif  // DIMRED_SERVICE_SCHEMA_H_
