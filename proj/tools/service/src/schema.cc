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

#include "dimred/service/schema.h"

#include <fstream>

#include "dimred/error.h"

namespace dimred::service {
namespace {

using Json = nlohmann::json;

bool HasType(const Json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "integer") return value.is_number_integer();
  if (type == "number") return value.is_number();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  return false;
}

class Validator {
 public:
  explicit Validator(const Json& root) : root_(root) {}

  void Check(const Json& value, const Json& schema, const std::string& path) {
    if (schema.contains("$ref")) {
      const std::string ref = schema["$ref"];
      const std::string prefix = "#/$defs/";
      if (ref.rfind(prefix, 0) != 0 || !root_["$defs"].contains(ref.substr(prefix.size()))) {
        errors_.push_back(path + ": unresolved $ref " + ref);
        return;
      }
      Check(value, root_["$defs"][ref.substr(prefix.size())], path);
    }
    if (schema.contains("type")) {
      const Json& type = schema["type"];
      bool ok = false;
      if (type.is_string()) {
        ok = HasType(value, type);
      } else {
        for (const auto& t : type) ok = ok || HasType(value, t);
      }
      if (!ok) {
        errors_.push_back(path + ": expected type " + type.dump() + ", got " + value.type_name());
        return;
      }
    }
    if (schema.contains("const") && value != schema["const"]) {
      errors_.push_back(path + ": expected " + schema["const"].dump());
    }
    if (schema.contains("enum")) {
      bool found = false;
      for (const auto& option : schema["enum"]) found = found || option == value;
      if (!found) errors_.push_back(path + ": " + value.dump() + " not in " + schema["enum"].dump());
    }
    if (value.is_number()) {
      if (schema.contains("minimum") && value.get<double>() < schema["minimum"].get<double>()) {
        errors_.push_back(path + ": below minimum");
      }
      if (schema.contains("maximum") && value.get<double>() > schema["maximum"].get<double>()) {
        errors_.push_back(path + ": above maximum");
      }
    }
    if (value.is_object()) CheckObject(value, schema, path);
    if (value.is_array()) {
      if (schema.contains("minItems") && value.size() < schema["minItems"].get<std::size_t>()) {
        errors_.push_back(path + ": fewer than " + schema["minItems"].dump() + " items");
      }
      if (schema.contains("items")) {
        for (std::size_t i = 0; i < value.size(); ++i) {
          Check(value[i], schema["items"], path + "[" + std::to_string(i) + "]");
        }
      }
    }
    if (schema.contains("oneOf")) {
      int matches = 0;
      for (const auto& option : schema["oneOf"]) {
        Validator sub(root_);
        sub.Check(value, option, path);
        matches += sub.errors_.empty() ? 1 : 0;
      }
      if (matches != 1) {
        errors_.push_back(path + ": matches " + std::to_string(matches) + " oneOf branches");
      }
    }
  }

  std::vector<std::string> TakeErrors() { return std::move(errors_); }

 private:
  void CheckObject(const Json& value, const Json& schema, const std::string& path) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!value.contains(key.get<std::string>())) {
          errors_.push_back(path + ": missing '" + key.get<std::string>() + "'");
        }
      }
    }
    const Json properties = schema.value("properties", Json::object());
    for (const auto& [key, child] : value.items()) {
      if (properties.contains(key)) {
        Check(child, properties[key], path + "." + key);
      } else if (schema.contains("additionalProperties") &&
                 schema["additionalProperties"] == false) {
        errors_.push_back(path + ": unexpected key '" + key + "'");
      }
    }
  }

  const Json& root_;
  std::vector<std::string> errors_;
};

}  // namespace

SchemaSet SchemaSet::LoadDirectory(const std::filesystem::path& dir) {
  SchemaSet set;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (!name.ends_with(".schema.json")) continue;
    std::ifstream in(entry.path());
    set.Add(Json::parse(in));
  }
  return set;
}

void SchemaSet::Add(const Json& schema) {
  if (!schema.contains("$id") || !schema["$id"].is_string()) {
    throw ConfigError("service", "schema without a string $id");
  }
  schemas_[schema["$id"].get<std::string>()] = schema;
}

std::vector<std::string> SchemaSet::Validate(const Json& document,
                                             const std::string& schema_id) const {
  std::string id = schema_id;
  if (id.empty()) {
    if (!document.is_object() || !document.contains("schema") || !document["schema"].is_string()) {
      return {"document has no schema field"};
    }
    id = document["schema"].get<std::string>();
  }
  const auto it = schemas_.find(id);
  if (it == schemas_.end()) return {"unknown schema '" + id + "'"};
  Validator validator(it->second);
  validator.Check(document, it->second, "$");
  return validator.TakeErrors();
}

}  // namespace dimred::service
