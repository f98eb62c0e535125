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

#include "dimred/service/server.h"

#include <charconv>
#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include <httplib.h>

#include "dimred/error.h"
#include "dimred/service/pipeline.h"
#include "dimred/service/run_store.h"

namespace dimred::service {
namespace {

constexpr char kVersion[] = "0.1.0";
constexpr int kPreviewRows = 10;

class WorkerPool {
 public:
  explicit WorkerPool(int workers) {
    for (int i = 0; i < std::max(1, workers); ++i) {
      threads_.emplace_back([this] { Loop(); });
    }
  }

  ~WorkerPool() {
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
    }
    wake_.notify_all();
    for (auto& t : threads_) t.join();
  }

  void Submit(std::function<void()> job) {
    {
      std::lock_guard lock(mu_);
      queue_.push_back(std::move(job));
      ++outstanding_;
    }
    wake_.notify_one();
  }

  void WaitForIdle() {
    std::unique_lock lock(mu_);
    idle_.wait(lock, [this] { return outstanding_ == 0; });
  }

  int size() const { return static_cast<int>(threads_.size()); }

 private:
  void Loop() {
    while (true) {
      std::function<void()> job;
      {
        std::unique_lock lock(mu_);
        wake_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
        // Queued runs are abandoned; the store marks them failed on restart.
        if (stopping_) return;
        job = std::move(queue_.front());
        queue_.pop_front();
      }
      job();
      std::lock_guard lock(mu_);
      if (--outstanding_ == 0) idle_.notify_all();
    }
  }

  std::mutex mu_;
  std::condition_variable wake_;
  std::condition_variable idle_;
  std::deque<std::function<void()>> queue_;
  std::vector<std::thread> threads_;
  int outstanding_ = 0;
  bool stopping_ = false;
};

// Thrown inside handlers and turned into a dimred.error.v1 response.
struct HttpError {
  int status;
  std::string code;
  std::string message;
  std::string module;
};

Json ErrorDocument(const std::string& code, const std::string& message,
                   const std::string& module) {
  return {{"schema", "dimred.error.v1"},
          {"error",
           {{"code", code},
            {"message", message},
            {"module", module.empty() ? Json(nullptr) : Json(module)}}}};
}

void Reply(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "application/json");
}

void Reply(httplib::Response& res, int status, const Json& document) {
  Reply(res, status, Serialize(document));
}

Json ParseBody(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const Json::parse_error& e) {
    throw HttpError{400, "bad_json", e.what(), "service"};
  }
}

std::string Param(const httplib::Request& req, const std::string& key) {
  if (req.has_param(key)) return req.get_param_value(key);
  if (req.is_multipart_form_data() && req.has_file(key)) return req.get_file_value(key).content;
  return "";
}

// A feature named by header or by 0-based index.
int ResolveFeature(const RawDataset& data, const std::string& token) {
  for (int j = 0; j < data.num_features(); ++j) {
    if (data.features[j] == token) return j;
  }
  int index = -1;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), index);
  if (ec != std::errc() || ptr != token.data() + token.size() || index < 0 ||
      index >= data.num_features()) {
    throw HttpError{400, "bad_feature", "unknown feature '" + token + "'", "service"};
  }
  return index;
}

std::optional<int> DegreeParam(const httplib::Request& req) {
  if (!req.has_param("degree")) return std::nullopt;
  const std::string s = req.get_param_value("degree");
  int degree = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), degree);
  if (ec != std::errc() || ptr != s.data() + s.size() || degree < 1) {
    throw HttpError{400, "bad_degree", "degree must be a positive integer", "service"};
  }
  return degree;
}

Json Axis(const RawDataset& data, int j) {
  return {{"index", j}, {"name", data.features[j]}};
}

}  // namespace

class Server::Impl {
 public:
  explicit Impl(ServerOptions options)
      : options_(std::move(options)), store_(options_.state_dir), pool_(options_.workers) {
    http_.set_payload_max_length(options_.max_upload_bytes);
    http_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      const std::string code = res.status == 404   ? "not_found"
                               : res.status == 413 ? "payload_too_large"
                                                   : "http_error";
      res.set_content(Serialize(ErrorDocument(code, httplib::status_message(res.status), "service")),
                      "application/json");
    });
    http_.set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
          Reply(res, 500, ErrorDocument("internal", "unhandled exception", "service"));
        });
    Route();
  }

  ~Impl() { Stop(); }

  void Stop() { http_.stop(); }

  ServerOptions options_;
  RunStore store_;
  std::mutex cache_mu_;
  std::map<std::string, std::shared_ptr<const DatasetInput>> cache_;
  httplib::Server http_;
  // Last, so its threads stop before anything they use is destroyed.
  WorkerPool pool_;

 private:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  // Maps exceptions to structured errors.
  static httplib::Server::Handler Guard(Handler handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const HttpError& e) {
        Reply(res, e.status, ErrorDocument(e.code, e.message, e.module));
      } catch (const ParseError& e) {
        Reply(res, 400, ErrorDocument("parse_error", e.what(), e.module()));
      } catch (const ConfigError& e) {
        Reply(res, 400, ErrorDocument("bad_config", e.what(), e.module()));
      } catch (const DomainError& e) {
        Reply(res, 400, ErrorDocument("bad_data", e.what(), e.module()));
      } catch (const Error& e) {
        Reply(res, 500, ErrorDocument("internal", e.what(), e.module()));
      } catch (const std::exception& e) {
        Reply(res, 500, ErrorDocument("internal", e.what(), "service"));
      }
    };
  }

  void Route() {
    http_.Get("/api/v1/health", Guard([this](const auto&, auto& res) {
                Reply(res, 200,
                      Json{{"schema", "dimred.health.v1"},
                           {"status", "ok"},
                           {"version", kVersion},
                           {"workers", pool_.size()}});
              }));
    http_.Post("/api/v1/datasets", Guard([this](const auto& req, auto& res) { Upload(req, res); }));
    http_.Get("/api/v1/datasets/:id", Guard([this](const auto& req, auto& res) {
                const std::string& id = req.path_params.at("id");
                Reply(res, 200, DatasetDocument(RequireDataset(id), *Data(id)));
              }));
    http_.Post("/api/v1/datasets/:id/quantize", Guard([this](const auto& req, auto& res) {
                 const Json body = ParseBody(req);
                 if (!body.contains("degree") || !body["degree"].is_number_integer() ||
                     body["degree"].template get<int>() < 1) {
                   throw HttpError{400, "bad_config", "degree must be a positive integer",
                                   "service"};
                 }
                 const auto input = Data(req.path_params.at("id"));
                 Reply(res, 200, RunQuantize(*input, body["degree"].template get<int>()));
               }));
    http_.Get("/api/v1/datasets/:id/scatter",
              Guard([this](const auto& req, auto& res) { Scatter(req, res); }));
    http_.Get("/api/v1/datasets/:id/parallel",
              Guard([this](const auto& req, auto& res) { Parallel(req, res); }));
    http_.Post("/api/v1/runs", Guard([this](const auto& req, auto& res) { Submit(req, res); }));
    http_.Get("/api/v1/runs/:id", Guard([this](const auto& req, auto& res) {
                Reply(res, 200, RequireRun(req.path_params.at("id")).ToJson());
              }));
    http_.Get("/api/v1/runs/:id/result", Guard([this](const auto& req, auto& res) {
                Reply(res, 200, Result(req.path_params.at("id")));
              }));
    http_.Get("/api/v1/runs/:id/network",
              Guard([this](const auto& req, auto& res) { Network(req, res); }));
  }

  DatasetRecord RequireDataset(const std::string& id) {
    auto record = store_.FindDataset(id);
    if (!record) throw HttpError{404, "not_found", "no dataset '" + id + "'", "service"};
    return *record;
  }

  RunRecord RequireRun(const std::string& id) {
    auto record = store_.FindRun(id);
    if (!record) throw HttpError{404, "not_found", "no run '" + id + "'", "service"};
    return *record;
  }

  // Parsed datasets are cached; the stored text is immutable.
  std::shared_ptr<const DatasetInput> Data(const std::string& id) {
    const DatasetRecord record = RequireDataset(id);
    {
      std::lock_guard lock(cache_mu_);
      if (const auto it = cache_.find(id); it != cache_.end()) return it->second;
    }
    auto input = std::make_shared<const DatasetInput>(
        LoadDatasetText(store_.ReadDatasetText(id), record.options));
    std::lock_guard lock(cache_mu_);
    return cache_.emplace(id, std::move(input)).first->second;
  }

  Json DatasetDocument(const DatasetRecord& record, const DatasetInput& input) {
    Json preview = Json::array();
    for (int i = 0; i < std::min(kPreviewRows, input.raw.num_samples()); ++i) {
      const auto row = input.raw.samples.row(i);
      preview.push_back({{"values", std::vector<double>(row.begin(), row.end())},
                         {"label", input.raw.labeled() ? Json(input.raw.labels[i]) : Json(nullptr)}});
    }
    return {{"schema", "dimred.dataset.v1"},
            {"dataset_id", record.id},
            {"name", record.name},
            {"created", record.created},
            {"orientation", record.options.orientation == Orientation::kFeaturesAsRows
                                ? "features-rows"
                                : "samples-rows"},
            {"summary", DescribeDataset(input)},
            {"preview", preview}};
  }

  void Upload(const httplib::Request& req, httplib::Response& res) {
    std::string text = req.body;
    std::string name = Param(req, "name");
    if (req.is_multipart_form_data()) {
      if (!req.has_file("file")) {
        throw HttpError{400, "bad_upload", "multipart upload needs a 'file' field", "service"};
      }
      const auto file = req.get_file_value("file");
      text = file.content;
      if (name.empty()) name = file.filename;
    }
    if (text.empty()) throw HttpError{400, "bad_upload", "empty dataset", "service"};

    LoadOptions options;
    const std::string delimiter = Param(req, "delimiter");
    if (delimiter.empty() || delimiter == "comma" || delimiter == ",") {
      options.delimiter = ',';
    } else if (delimiter == "tab" || delimiter == "\t") {
      options.delimiter = '\t';
    } else {
      throw HttpError{400, "bad_upload", "delimiter must be 'comma' or 'tab'", "service"};
    }
    if (const std::string o = Param(req, "orientation"); !o.empty()) {
      const auto orientation = ParseOrientation(o);
      if (!orientation) {
        throw HttpError{400, "bad_upload", "orientation must be samples-rows or features-rows",
                        "service"};
      }
      options.orientation = *orientation;
    }
    if (const std::string label = Param(req, "label"); !label.empty()) options.label = label;

    // Parse before storing so malformed uploads are rejected up front.
    auto input = std::make_shared<const DatasetInput>(LoadDatasetText(text, options));
    const DatasetRecord record = store_.AddDataset(name.empty() ? "dataset" : name, text, options);
    {
      std::lock_guard lock(cache_mu_);
      cache_[record.id] = input;
    }
    Reply(res, 201, DatasetDocument(record, *input));
  }

  void Submit(const httplib::Request& req, httplib::Response& res) {
    const Json body = ParseBody(req);
    if (!body.is_object()) throw HttpError{400, "bad_request", "body must be an object", "service"};
    for (const auto& [key, value] : body.items()) {
      if (key != "kind" && key != "dataset_id" && key != "config") {
        throw HttpError{400, "bad_request", "unknown key '" + key + "'", "service"};
      }
    }
    const auto kind =
        body.contains("kind") && body["kind"].is_string()
            ? ParseRunKind(body["kind"].get<std::string>())
            : std::nullopt;
    if (!kind) throw HttpError{400, "bad_request", "kind must be select, cv or netrec", "service"};
    const Json config = NormalizeConfig(*kind, body.value("config", Json::object()));

    std::optional<std::string> dataset_id;
    if (body.contains("dataset_id") && !body["dataset_id"].is_null()) {
      if (!body["dataset_id"].is_string()) {
        throw HttpError{400, "bad_request", "dataset_id must be a string", "service"};
      }
      dataset_id = body["dataset_id"].get<std::string>();
      RequireDataset(*dataset_id);
    }
    const bool generated = *kind == RunKind::kNetworkRecovery && !config["generate"].is_null();
    if (!dataset_id && !generated) {
      throw HttpError{400, "bad_request", RunKindName(*kind) + " needs a dataset_id", "service"};
    }
    if (dataset_id && generated) {
      throw HttpError{400, "bad_request", "give either dataset_id or generate, not both",
                      "service"};
    }

    const RunRecord run = store_.CreateRun(*kind, dataset_id, config);
    pool_.Submit([this, id = run.id, kind = *kind, dataset_id, config] {
      store_.MarkRunning(id);
      try {
        std::shared_ptr<const DatasetInput> input;
        if (dataset_id) input = Data(*dataset_id);
        store_.MarkDone(id, Serialize(Run(kind, input.get(), config)));
      } catch (const Error& e) {
        store_.MarkFailed(id, e.what(), e.module());
      } catch (const HttpError& e) {
        store_.MarkFailed(id, e.message, e.module);
      } catch (const std::exception& e) {
        store_.MarkFailed(id, e.what(), "internal");
      }
    });
    Reply(res, 202, run.ToJson());
  }

  std::string Result(const std::string& id) {
    const RunRecord run = RequireRun(id);
    if (run.status == RunStatus::kFailed) {
      throw HttpError{500, "run_failed", run.error_message.value_or(""),
                      run.error_module.value_or("")};
    }
    if (run.status != RunStatus::kDone) {
      throw HttpError{409, "not_ready", "run " + id + " is " + RunStatusName(run.status),
                      "service"};
    }
    return *store_.ReadResult(id);
  }

  void Scatter(const httplib::Request& req, httplib::Response& res) {
    const std::string& id = req.path_params.at("id");
    const auto input = Data(id);
    if (!req.has_param("x") || !req.has_param("y")) {
      throw HttpError{400, "bad_request", "scatter needs x and y", "service"};
    }
    const int x = ResolveFeature(input->raw, req.get_param_value("x"));
    const int y = ResolveFeature(input->raw, req.get_param_value("y"));
    const auto degree = DegreeParam(req);
    const auto values = Values(*input, degree);
    Json points = Json::array();
    for (int i = 0; i < input->raw.num_samples(); ++i) {
      points.push_back({{"x", values(i, x)},
                        {"y", values(i, y)},
                        {"label", input->raw.labeled() ? Json(input->raw.labels[i]) : Json(nullptr)}});
    }
    Reply(res, 200,
          Json{{"schema", "dimred.scatter.v1"},
               {"dataset_id", id},
               {"x", Axis(input->raw, x)},
               {"y", Axis(input->raw, y)},
               {"degree", degree ? Json(*degree) : Json(nullptr)},
               {"points", points}});
  }

  void Parallel(const httplib::Request& req, httplib::Response& res) {
    const std::string& id = req.path_params.at("id");
    const auto input = Data(id);
    std::vector<int> order;
    const std::string list = req.has_param("features") ? req.get_param_value("features") : "";
    std::size_t start = 0;
    while (start < list.size()) {
      const std::size_t comma = std::min(list.find(',', start), list.size());
      order.push_back(ResolveFeature(input->raw, list.substr(start, comma - start)));
      start = comma + 1;
    }
    if (order.empty()) {
      throw HttpError{400, "bad_request", "parallel needs a features list", "service"};
    }
    const auto degree = DegreeParam(req);
    const auto values = Values(*input, degree);
    Json axes = Json::array();
    for (int j : order) axes.push_back(Axis(input->raw, j));
    Json rows = Json::array();
    for (int i = 0; i < input->raw.num_samples(); ++i) {
      std::vector<double> row;
      for (int j : order) row.push_back(values(i, j));
      rows.push_back({{"values", row},
                      {"label", input->raw.labeled() ? Json(input->raw.labels[i]) : Json(nullptr)}});
    }
    Reply(res, 200,
          Json{{"schema", "dimred.parallel.v1"},
               {"dataset_id", id},
               {"axes", axes},
               {"degree", degree ? Json(*degree) : Json(nullptr)},
               {"rows", rows}});
  }

  // Raw values, or quantized levels when a degree is given.
  static Matrix<double> Values(const DatasetInput& input, std::optional<int> degree) {
    if (!degree) return input.raw.samples;
    const QuantizedDataset q = Quantize(input.raw, FitQuantizer(input.raw, *degree));
    Matrix<double> out(q.num_samples(), q.num_features());
    for (int i = 0; i < q.num_samples(); ++i) {
      for (int j = 0; j < q.num_features(); ++j) out(i, j) = q.value(i, j);
    }
    return out;
  }

  void Network(const httplib::Request& req, httplib::Response& res) {
    const std::string& id = req.path_params.at("id");
    if (RequireRun(id).kind != RunKind::kNetworkRecovery) {
      throw HttpError{400, "bad_request", "run " + id + " is not a network recovery", "service"};
    }
    const Json doc = Json::parse(Result(id));
    const Json& network = doc["result"]["network"];
    const Json& score = doc["result"]["score"];
    auto key = [](const Json& e) {
      return std::pair(e["predictor"].get<int>(), e["target"].get<int>());
    };
    std::set<std::pair<int, int>> truth;
    if (!network["truth"].is_null()) {
      for (const auto& e : network["truth"]) truth.insert(key(e));
    }
    Json edges = Json::array();
    std::set<std::pair<int, int>> recovered;
    for (const auto& e : network["recovered"]) {
      recovered.insert(key(e));
      const char* status = network["truth"].is_null() ? "recovered"
                           : truth.contains(key(e))   ? "true_positive"
                                                      : "false_positive";
      edges.push_back({{"predictor", e["predictor"]}, {"target", e["target"]}, {"status", status}});
    }
    for (const auto& [p, t] : truth) {
      if (!recovered.contains({p, t})) {
        edges.push_back({{"predictor", p}, {"target", t}, {"status", "false_negative"}});
      }
    }
    Reply(res, 200,
          Json{{"schema", "dimred.network.v1"},
               {"run_id", id},
               {"nodes", network["nodes"]},
               {"names", network["names"]},
               {"edges", edges},
               {"score", score}});
  }
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() = default;

int Server::BindToAnyPort(const std::string& host) { return impl_->http_.bind_to_any_port(host); }

bool Server::Bind(const std::string& host, int port) {
  return impl_->http_.bind_to_port(host, port);
}

bool Server::ListenAfterBind() { return impl_->http_.listen_after_bind(); }

void Server::Stop() { impl_->Stop(); }

void Server::WaitForIdle() { impl_->pool_.WaitForIdle(); }

}  // namespace dimred::service
