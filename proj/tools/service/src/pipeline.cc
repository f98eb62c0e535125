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

#include "dimred/service/pipeline.h"

#include <charconv>
#include <set>

#include "dimred/classifier.h"
#include "dimred/criteria.h"
#include "dimred/error.h"
#include "dimred/netrecovery.h"
#include "dimred/random.h"
#include "dimred/search.h"
#include "dimred/validation.h"

namespace dimred::service {
namespace {

[[noreturn]] void Bad(const std::string& message) {
  throw ConfigError("service", "config: " + message);
}

void CheckKeys(const Json& object, const std::set<std::string>& allowed,
               const std::string& where) {
  if (!object.is_object()) Bad(where + " must be an object");
  for (const auto& [key, value] : object.items()) {
    if (!allowed.contains(key)) Bad("unknown key '" + where + "." + key + "'");
  }
}

std::string GetString(const Json& object, const char* key, const std::string& fallback) {
  if (!object.contains(key) || object[key].is_null()) return fallback;
  if (!object[key].is_string()) Bad(std::string(key) + " must be a string");
  return object[key].get<std::string>();
}

std::int64_t GetInt(const Json& object, const char* key, std::int64_t fallback,
                    std::int64_t min) {
  if (!object.contains(key) || object[key].is_null()) return fallback;
  const Json& v = object[key];
  if (!v.is_number_integer()) Bad(std::string(key) + " must be an integer");
  const std::int64_t value =
      v.is_number_unsigned() ? static_cast<std::int64_t>(v.get<std::uint64_t>()) : v.get<std::int64_t>();
  if (value < min) Bad(std::string(key) + " must be >= " + std::to_string(min));
  return value;
}

double GetNumber(const Json& object, const char* key, double fallback) {
  if (!object.contains(key) || object[key].is_null()) return fallback;
  if (!object[key].is_number()) Bad(std::string(key) + " must be a number");
  return object[key].get<double>();
}

bool GetBool(const Json& object, const char* key, bool fallback) {
  if (!object.contains(key) || object[key].is_null()) return fallback;
  if (!object[key].is_boolean()) Bad(std::string(key) + " must be a boolean");
  return object[key].get<bool>();
}

// Seeds are unsigned 64-bit; decimal strings are accepted for clients
// without exact 64-bit numbers.
std::uint64_t GetSeed(const Json& object, const char* key) {
  if (!object.contains(key) || object[key].is_null()) return 0;
  const Json& v = object[key];
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
    if (ec == std::errc() && ptr == s.data() + s.size() && !s.empty()) return seed;
  }
  Bad(std::string(key) + " must be a non-negative integer");
}

// Optional quantization degree: absent means the default, null means the
// data is used as-is (already discrete).
Json GetDegree(const Json& object, Json fallback) {
  if (!object.contains("degree")) return fallback;
  if (object["degree"].is_null()) return nullptr;
  return GetInt(object, "degree", 1, 1);
}

SearchConfig ToSearchConfig(const Json& config) {
  SearchConfig search;
  search.algorithm = *ParseSearchAlgorithm(config["algorithm"].get<std::string>());
  search.max_cardinality = config["max_cardinality"].get<int>();
  if (!config["threshold"].is_null()) search.threshold = config["threshold"].get<double>();
  search.criterion = CriterionSpec::Parse(config["criterion"].get<std::string>(),
                                          config["penalty"].get<std::string>());
  search.exhaustive_limit = config["exhaustive_limit"].get<std::uint64_t>();
  return search;
}

QuantizedDataset Discretize(const RawDataset& raw, const Json& degree) {
  if (degree.is_null()) return QuantizedDataset::FromIntegerData(raw);
  return Quantize(raw, FitQuantizer(raw, degree.get<int>()));
}

std::string PolarityName(Polarity p) {
  return p == Polarity::kMinimize ? "minimize" : "maximize";
}

Json ToJson(const CriterionValue& value) {
  return {{"value", value.value},
          {"polarity", PolarityName(value.polarity)},
          {"saturated", value.saturated}};
}

Json ToJson(const FeatureSubset& subset, const std::vector<std::string>& names) {
  Json indices = Json::array(), labels = Json::array();
  for (int f : subset) {
    indices.push_back(f);
    labels.push_back(names[f]);
  }
  return {{"indices", indices}, {"names", labels}};
}

Json ToJson(const SearchResult& result, const std::vector<std::string>& names) {
  Json trace = Json::array();
  for (const auto& entry : result.per_cardinality) {
    trace.push_back({{"cardinality", entry.cardinality},
                     {"subset", ToJson(entry.subset, names)},
                     {"value", ToJson(entry.value)}});
  }
  return {{"best_subset", ToJson(result.best_subset, names)},
          {"best_value", ToJson(result.best_value)},
          {"per_cardinality", trace},
          {"evaluations", result.evaluations}};
}

Json EdgeList(const std::set<Edge>& edges) {
  Json list = Json::array();
  for (const Edge& e : edges) list.push_back({{"predictor", e.predictor}, {"target", e.target}});
  return list;
}

void AppendValue(std::string& out, double v) {
  char buf[32];
  out.append(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

}  // namespace

std::optional<RunKind> ParseRunKind(std::string_view name) {
  if (name == "select") return RunKind::kSelect;
  if (name == "cv") return RunKind::kCrossValidation;
  if (name == "netrec") return RunKind::kNetworkRecovery;
  return std::nullopt;
}

std::string RunKindName(RunKind kind) {
  switch (kind) {
    case RunKind::kSelect:
      return "select";
    case RunKind::kCrossValidation:
      return "cv";
    case RunKind::kNetworkRecovery:
      return "netrec";
  }
  return "unknown";
}

DatasetInput LoadDatasetText(std::string_view text, const LoadOptions& options) {
  DatasetInput input;
  input.raw = ParseDelimited(text, options);
  if (options.label) {
    input.label = std::visit(
        [](const auto& v) -> std::string {
          if constexpr (std::is_same_v<std::decay_t<decltype(v)>, int>) {
            return "#" + std::to_string(v);
          } else {
            return v;
          }
        },
        *options.label);
  }
  return input;
}

std::string DatasetDigest(const RawDataset& data) {
  std::string canon;
  for (const auto& name : data.features) canon += name + '\x1f';
  canon += '\n';
  for (int i = 0; i < data.num_samples(); ++i) {
    for (double v : data.samples.row(i)) {
      AppendValue(canon, v);
      canon += '\x1f';
    }
    if (data.labeled()) canon += data.labels[i];
    canon += '\n';
  }
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : canon) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
  return std::string("fnv1a64:") + hex;
}

Json DescribeDataset(const DatasetInput& input) {
  Json classes = nullptr;
  if (input.raw.labeled()) classes = EncodeLabels(input.raw.labels).names;
  return {{"digest", DatasetDigest(input.raw)},
          {"samples", input.raw.num_samples()},
          {"features", input.raw.features},
          {"label", input.label.empty() ? Json(nullptr) : Json(input.label)},
          {"classes", classes}};
}

Json NormalizeConfig(RunKind kind, const Json& config) {
  std::set<std::string> allowed = {"algorithm", "criterion", "penalty", "max_cardinality",
                                   "threshold", "exhaustive_limit", "degree"};
  if (kind == RunKind::kCrossValidation) {
    allowed.insert({"executions", "train_fraction", "generalization", "seed",
                    "quantize_before_split"});
  }
  if (kind == RunKind::kNetworkRecovery) allowed.insert("generate");
  const Json input = config.is_null() ? Json::object() : config;
  CheckKeys(input, allowed, "config");

  Json out;
  const std::string algorithm = GetString(input, "algorithm", "sffs");
  const auto parsed_algorithm = ParseSearchAlgorithm(algorithm);
  if (!parsed_algorithm) Bad("unknown algorithm '" + algorithm + "'");
  out["algorithm"] = SearchAlgorithmName(*parsed_algorithm);
  const CriterionSpec spec = CriterionSpec::Parse(GetString(input, "criterion", "mce"),
                                                  GetString(input, "penalty", "none"));
  out["criterion"] = spec.KindName();
  out["penalty"] = spec.PenaltyName();
  out["max_cardinality"] = GetInt(input, "max_cardinality", 3, 1);
  out["threshold"] = input.contains("threshold") && !input["threshold"].is_null()
                         ? Json(GetNumber(input, "threshold", 0.0))
                         : Json(nullptr);
  out["exhaustive_limit"] = static_cast<std::uint64_t>(
      GetInt(input, "exhaustive_limit", static_cast<std::int64_t>(kDefaultExhaustiveLimit), 1));

  switch (kind) {
    case RunKind::kSelect:
      out["degree"] = GetDegree(input, 1);
      break;
    case RunKind::kCrossValidation: {
      out["degree"] = GetDegree(input, 1);
      out["executions"] = GetInt(input, "executions", 10, 1);
      const double fraction = GetNumber(input, "train_fraction", 0.8);
      if (!(fraction > 0.0 && fraction < 1.0)) Bad("train_fraction must lie in (0, 1)");
      out["train_fraction"] = fraction;
      const std::string mode = GetString(input, "generalization", "nn");
      const auto generalization = ParseGeneralization(mode);
      if (!generalization) Bad("unknown generalization '" + mode + "'");
      out["generalization"] = GeneralizationName(*generalization);
      out["seed"] = GetSeed(input, "seed");
      out["quantize_before_split"] = GetBool(input, "quantize_before_split", false);
      if (out["quantize_before_split"].get<bool>() && out["degree"].is_null()) {
        Bad("quantize_before_split needs a quantization degree");
      }
      break;
    }
    case RunKind::kNetworkRecovery: {
      out["degree"] = GetDegree(input, nullptr);
      if (input.contains("generate") && !input["generate"].is_null()) {
        const Json& g = input["generate"];
        CheckKeys(g, {"nodes", "avg_edges", "timestamps", "seed"}, "generate");
        const double avg = GetNumber(g, "avg_edges", 1.0);
        if (!(avg >= 0.0)) Bad("generate.avg_edges must be >= 0");
        out["generate"] = {{"nodes", GetInt(g, "nodes", 10, 2)},
                           {"avg_edges", avg},
                           {"timestamps", GetInt(g, "timestamps", 20, 2)},
                           {"seed", GetSeed(g, "seed")}};
      } else {
        out["generate"] = nullptr;
      }
      break;
    }
  }
  return out;
}

Json RunSelect(const DatasetInput& input, const Json& config) {
  ValidateForClassification(input.raw);
  const QuantizedDataset data = Discretize(input.raw, config["degree"]);
  const SearchResult result = RunSearch(data, ToSearchConfig(config));
  return {{"schema", kSelectSchema},
          {"dataset", DescribeDataset(input)},
          {"request", config},
          {"result", ToJson(result, data.features())}};
}

Json RunCv(const DatasetInput& input, const Json& config) {
  ValidateForClassification(input.raw);
  CvConfig cv;
  cv.executions = config["executions"].get<int>();
  cv.train_fraction = config["train_fraction"].get<double>();
  cv.search = ToSearchConfig(config);
  cv.generalization = *ParseGeneralization(config["generalization"].get<std::string>());
  cv.master_seed = config["seed"].get<std::uint64_t>();

  CvReport report;
  if (config["degree"].is_null()) {
    report = RunCrossValidation(QuantizedDataset::FromIntegerData(input.raw), cv);
  } else {
    report = RunCrossValidation(input.raw, config["degree"].get<int>(),
                                config["quantize_before_split"].get<bool>()
                                    ? QuantizationOrder::kBeforeSplit
                                    : QuantizationOrder::kPerTrainingSplit,
                                cv);
  }
  Json runs = Json::array();
  for (std::size_t e = 0; e < report.runs.size(); ++e) {
    const CvRun& run = report.runs[e];
    runs.push_back({{"execution", e},
                    {"seed", run.seed},
                    {"subset", ToJson(run.subset, input.raw.features)},
                    {"value", ToJson(run.value)},
                    {"accuracy", run.accuracy}});
  }
  return {{"schema", kCvSchema},
          {"dataset", DescribeDataset(input)},
          {"request", config},
          {"result",
           {{"runs", runs},
            {"mean_accuracy", report.mean_accuracy},
            {"accuracy_std", report.accuracy_std},
            {"chart_series", report.chart_series()}}}};
}

Json RunNetrec(const DatasetInput* input, const Json& config) {
  std::optional<GroundTruthNetwork> truth;
  QuantizedDataset series;
  if (!config["generate"].is_null()) {
    const Json& g = config["generate"];
    const std::uint64_t seed = g["seed"].get<std::uint64_t>();
    truth = GenerateNetwork(g["nodes"].get<int>(), g["avg_edges"].get<double>(), seed);
    series = SimulateTimeSeries(*truth, g["timestamps"].get<int>(), DeriveSeed(seed, 1));
  } else {
    if (input == nullptr) {
      throw ConfigError("service", "netrec needs a time series or a generate block");
    }
    series = Discretize(input->raw, config["degree"]);
  }

  const RecoveredNetwork recovered = RecoverNetwork(series, ToSearchConfig(config));
  Json targets = Json::array();
  for (const auto& t : recovered.targets) {
    targets.push_back({{"target", t.target},
                       {"predictors", ToJson(t.predictors, series.features())},
                       {"value", t.value ? ToJson(*t.value) : Json(nullptr)},
                       {"constant", t.constant},
                       {"failed", t.failed},
                       {"message", t.failed ? Json(t.message) : Json(nullptr)}});
  }
  Json network = {{"nodes", series.num_features()},
                  {"names", series.features()},
                  {"timestamps", series.num_samples()},
                  {"recovered", EdgeList(recovered.edges)},
                  {"truth", truth ? EdgeList(truth->Edges()) : Json(nullptr)},
                  {"targets", targets}};
  Json score = nullptr;
  if (truth) {
    const NetworkScore s = Score(recovered, *truth);
    score = {{"true_positives", s.true_positives},
             {"false_positives", s.false_positives},
             {"false_negatives", s.false_negatives},
             {"precision", s.precision},
             {"recall", s.recall},
             {"false_positive_edges", EdgeList(s.false_positive_edges)},
             {"false_negative_edges", EdgeList(s.false_negative_edges)}};
  }
  return {{"schema", kNetrecSchema},
          {"dataset", input != nullptr ? DescribeDataset(*input) : Json(nullptr)},
          {"request", config},
          {"result", {{"network", network}, {"score", score}}}};
}

Json Run(RunKind kind, const DatasetInput* input, const Json& config) {
  if (kind != RunKind::kNetworkRecovery && input == nullptr) {
    throw ConfigError("service", RunKindName(kind) + " needs a dataset");
  }
  const Json normalized = NormalizeConfig(kind, config);
  switch (kind) {
    case RunKind::kSelect:
      return RunSelect(*input, normalized);
    case RunKind::kCrossValidation:
      return RunCv(*input, normalized);
    case RunKind::kNetworkRecovery:
      return RunNetrec(input, normalized);
  }
  throw ConfigError("service", "unknown run kind");
}

Json RunQuantize(const DatasetInput& input, int degree) {
  const QuantizationSpec spec = FitQuantizer(input.raw, degree);
  const QuantizedDataset q = Quantize(input.raw, spec);
  Json bounds = Json::array();
  for (std::size_t j = 0; j < spec.bounds.size(); ++j) {
    bounds.push_back({{"feature", spec.features[j]},
                      {"min_negative", spec.bounds[j].min_negative},
                      {"max_positive", spec.bounds[j].max_positive}});
  }
  Json values = Json::array();
  for (int i = 0; i < q.num_samples(); ++i) {
    const auto row = q.sample(i);
    values.push_back(std::vector<int>(row.begin(), row.end()));
  }
  return {{"schema", kQuantizeSchema},
          {"dataset", DescribeDataset(input)},
          {"degree", degree},
          {"levels", spec.levels()},
          {"bounds", bounds},
          {"values", values},
          {"labels", input.raw.labeled() ? Json(input.raw.labels) : Json(nullptr)}};
}

std::string Serialize(const Json& document) {
  return document.dump(2, ' ', false, Json::error_handler_t::strict) + "\n";
}

}  // namespace dimred::service
