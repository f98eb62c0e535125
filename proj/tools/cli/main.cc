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

// dimred command line: batch pipelines and the HTTP service.

#include <pthread.h>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "dimred/error.h"
#include "dimred/service/pipeline.h"
#include "dimred/service/server.h"

namespace {

using dimred::service::Json;

constexpr int kPipelineError = 1;
constexpr int kUsageError = 2;

// Flag values rejected before any data is touched.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputFlags {
  std::string path;
  std::string label;
  std::string delimiter;
  std::string orientation;

  void Register(CLI::App* app, bool labeled) {
    auto* input = app->add_option("--input,-i", path, "Delimited data file")->check(CLI::ExistingFile);
    if (labeled) {
      input->required();
      app->add_option("--label", label, "Label column name or 0-based index")->required();
    }
    app->add_option("--delimiter", delimiter, "comma or tab (default: by extension)")
        ->check(CLI::IsMember({"comma", "tab"}));
    app->add_option("--orientation", orientation, "samples-rows or features-rows")
        ->check(CLI::IsMember({"samples-rows", "features-rows"}));
  }

  dimred::service::DatasetInput Load() const {
    dimred::LoadOptions options;
    if (delimiter == "comma") options.delimiter = ',';
    if (delimiter == "tab") options.delimiter = '\t';
    if (!orientation.empty()) options.orientation = *dimred::ParseOrientation(orientation);
    if (!label.empty()) options.label = label;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw dimred::ConfigError("dataset", "cannot open " + path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (options.delimiter == 0) {
      options.delimiter = path.ends_with(".tsv") || path.ends_with(".tab") ? '\t' : ',';
    }
    return dimred::service::LoadDatasetText(text, options);
  }
};

// Search flags shared by select, cv and netrec. Unset flags stay out of
// the config so the pipeline defaults apply, exactly as for the service.
struct SearchFlags {
  std::optional<std::string> algorithm, criterion, penalty;
  std::optional<int> max_card;
  std::optional<double> threshold;
  std::optional<std::uint64_t> exhaustive_limit;
  std::optional<int> degree;
  bool no_quantize = false;

  void Register(CLI::App* app) {
    app->add_option("--algorithm", algorithm, "exhaustive, sfs or sffs");
    app->add_option("--criterion", criterion, "mce or cod");
    app->add_option("--penalty", penalty, "none, alpha=<x> or beta=<x>");
    app->add_option("--max-card", max_card, "Largest subset size");
    app->add_option("--threshold", threshold, "Stop once the criterion reaches this value");
    app->add_option("--exhaustive-limit", exhaustive_limit, "Refuse larger exhaustive searches");
    auto* degree_opt = app->add_option("--degree", degree, "Quantization degree (2k+1 levels)");
    app->add_flag("--no-quantize", no_quantize, "Use the values as discrete levels")
        ->excludes(degree_opt);
  }

  Json ToConfig() const {
    Json config = Json::object();
    if (algorithm) config["algorithm"] = *algorithm;
    if (criterion) config["criterion"] = *criterion;
    if (penalty) config["penalty"] = *penalty;
    if (max_card) config["max_cardinality"] = *max_card;
    if (threshold) config["threshold"] = *threshold;
    if (exhaustive_limit) config["exhaustive_limit"] = *exhaustive_limit;
    if (degree) config["degree"] = *degree;
    if (no_quantize) config["degree"] = nullptr;
    return config;
  }
};

// "nodes=10,avg-edges=1,timestamps=20,seed=7"
Json ParseGenerateSpec(const std::string& spec) {
  Json out = Json::object();
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = std::min(spec.find(',', start), spec.size());
    const std::string item = spec.substr(start, comma - start);
    start = comma + 1;
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--generate: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      std::size_t used = 0;
      if (key == "nodes" || key == "timestamps") {
        out[key] = std::stoi(value, &used);
      } else if (key == "avg-edges") {
        out["avg_edges"] = std::stod(value, &used);
      } else if (key == "seed") {
        out["seed"] = static_cast<std::uint64_t>(std::stoull(value, &used));
      } else {
        throw UsageError("--generate: unknown key '" + key + "'");
      }
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::logic_error&) {
      throw UsageError("--generate: bad value for " + key + ": '" + value + "'");
    }
  }
  return out;
}

Json Normalize(dimred::service::RunKind kind, const Json& config) {
  try {
    return dimred::service::NormalizeConfig(kind, config);
  } catch (const dimred::ConfigError& e) {
    throw UsageError(e.what());
  }
}

void Emit(const Json& document, const std::string& output) {
  const std::string text = dimred::service::Serialize(document);
  if (output.empty() || output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw dimred::Error("service", "cannot write " + output);
}

int Serve(const std::string& bind, std::string state_dir, int workers, double max_upload_mb) {
  if (state_dir.empty()) {
    const char* env = std::getenv("DIMRED_STATE_DIR");
    state_dir = env != nullptr && *env != '\0' ? env : "dimred-state";
  }
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw UsageError("--bind must be host:port");
  const std::string host = bind.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(bind.substr(colon + 1));
  } catch (const std::logic_error&) {
    throw UsageError("--bind must be host:port");
  }

  // Signals are taken synchronously by a helper thread, which stops the
  // server from outside any signal handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  dimred::service::ServerOptions options;
  options.state_dir = state_dir;
  options.workers = workers;
  options.max_upload_bytes = static_cast<std::size_t>(max_upload_mb * 1024 * 1024);
  dimred::service::Server server(options);
  if (!server.Bind(host, port)) {
    std::cerr << "dimred: cannot bind " << bind << "\n";
    return kPipelineError;
  }
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.Stop();
  });
  std::cerr << "dimred: serving on " << bind << ", state in " << state_dir << "\n";
  server.ListenAfterBind();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature selection with penalized entropy and CoD criteria"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "dimred 0.1.0");

  std::string output;
  InputFlags input;
  SearchFlags search;

  auto* select = app.add_subcommand("select", "Select a feature subset on the whole dataset");
  input.Register(select, true);
  search.Register(select);
  select->add_option("--output,-o", output, "Result document (default: stdout)");

  std::optional<int> executions;
  std::optional<double> train_fraction;
  std::optional<std::string> generalization;
  std::optional<std::uint64_t> seed;
  bool before_split = false;
  auto* cv = app.add_subcommand("cv", "Repeated-holdout cross-validation");
  input.Register(cv, true);
  search.Register(cv);
  cv->add_option("--executions", executions, "Number of train/test splits");
  cv->add_option("--train-fraction", train_fraction, "Training share of each split");
  cv->add_option("--generalization", generalization, "nn or random");
  cv->add_option("--seed", seed, "Master seed");
  cv->add_flag("--quantize-before-split", before_split,
               "Fit the quantizer on all data before splitting");
  cv->add_option("--output,-o", output, "Result document (default: stdout)");

  std::string generate;
  auto* netrec = app.add_subcommand("netrec", "Recover a regulatory network from a time series");
  input.Register(netrec, false);
  search.Register(netrec);
  netrec->add_option("--generate", generate,
                     "Simulate a network: nodes=N,avg-edges=X,timestamps=T,seed=S");
  netrec->add_option("--seed", seed, "Generator seed (same as seed= in --generate)");
  netrec->add_option("--output,-o", output, "Result document (default: stdout)");

  int degree = 1;
  auto* quantize = app.add_subcommand("quantize", "Quantize a dataset");
  input.Register(quantize, false);
  quantize->get_option("--input")->required();
  quantize->add_option("--label", input.label, "Label column name or 0-based index");
  quantize->add_option("--degree", degree, "Quantization degree (2k+1 levels)")
      ->check(CLI::PositiveNumber);
  quantize->add_option("--output,-o", output, "Result document (default: stdout)");

  std::string bind = "127.0.0.1:8080";
  std::string state_dir;
  int workers = 2;
  double max_upload_mb = 64;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--bind", bind, "host:port");
  serve->add_option("--state-dir", state_dir, "State directory (default: $DIMRED_STATE_DIR)");
  serve->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  serve->add_option("--max-upload-mb", max_upload_mb, "Upload size limit")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  using dimred::service::RunKind;
  try {
    if (*select) {
      const Json config = Normalize(RunKind::kSelect, search.ToConfig());
      Emit(dimred::service::RunSelect(input.Load(), config), output);
    } else if (*cv) {
      Json config = search.ToConfig();
      if (executions) config["executions"] = *executions;
      if (train_fraction) config["train_fraction"] = *train_fraction;
      if (generalization) config["generalization"] = *generalization;
      if (seed) config["seed"] = *seed;
      if (before_split) config["quantize_before_split"] = true;
      config = Normalize(RunKind::kCrossValidation, config);
      Emit(dimred::service::RunCv(input.Load(), config), output);
    } else if (*netrec) {
      Json config = search.ToConfig();
      if (generate.empty() == input.path.empty()) {
        throw UsageError("netrec needs exactly one of --generate and --input");
      }
      if (!generate.empty()) {
        Json spec = ParseGenerateSpec(generate);
        if (seed) {
          if (spec.contains("seed") && spec["seed"] != *seed) {
            throw UsageError("--seed disagrees with seed= in --generate");
          }
          spec["seed"] = *seed;
        }
        config["generate"] = spec;
      } else if (seed) {
        throw UsageError("--seed only applies with --generate");
      }
      config = Normalize(RunKind::kNetworkRecovery, config);
      if (!generate.empty()) {
        Emit(dimred::service::RunNetrec(nullptr, config), output);
      } else {
        const auto data = input.Load();
        Emit(dimred::service::RunNetrec(&data, config), output);
      }
    } else if (*quantize) {
      Emit(dimred::service::RunQuantize(input.Load(), degree), output);
    } else if (*serve) {
      return Serve(bind, state_dir, workers, max_upload_mb);
    }
  } catch (const UsageError& e) {
    std::cerr << "dimred: usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const dimred::Error& e) {
    std::cerr << "dimred: error [" << e.module() << "]: " << e.what() << "\n";
    return kPipelineError;
  } catch (const std::exception& e) {
    std::cerr << "dimred: error [internal]: " << e.what() << "\n";
    return kPipelineError;
  }
  return 0;
}
