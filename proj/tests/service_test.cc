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

#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "dimred/service/pipeline.h"
#include "dimred/service/run_store.h"
#include "dimred/service/schema.h"
#include "service_harness.h"

namespace dimred::testing {
namespace {

using service::SchemaSet;

const SchemaSet& Schemas() {
  static const SchemaSet schemas = SchemaSet::LoadDirectory(DIMRED_SCHEMA_DIR);
  return schemas;
}

void ExpectValid(const Json& doc, const std::string& id = "") {
  const auto errors = Schemas().Validate(doc, id);
  std::string all;
  for (const auto& e : errors) all += e + "\n";
  EXPECT_TRUE(errors.empty()) << all << doc.dump(2).substr(0, 2000);
}

// 5 real-valued features, label column "class" last; class 1 iff f1+f3 > 0.
std::string SmallCsv(int samples = 60, std::uint32_t seed = 3) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal;
  std::ostringstream out;
  out << "f0,f1,f2,f3,f4,class\n";
  out.precision(6);
  for (int i = 0; i < samples; ++i) {
    double v[5];
    for (double& x : v) x = normal(gen);
    for (double x : v) out << x << ',';
    out << (v[1] + v[3] > 0 ? "pos" : "neg") << '\n';
  }
  return out.str();
}

service::DatasetInput SmallInput() {
  LoadOptions options;
  options.label = "class";
  return service::LoadDatasetText(SmallCsv(), options);
}

class ServiceTest : public ::testing::Test {
 protected:
  TempDir dir_;
};

TEST_F(ServiceTest, HealthValidates) {
  TestServer server(dir_.path());
  const Response r = server.Get("/api/v1/health");
  ASSERT_EQ(r.status, 200);
  ExpectValid(r.json());
  EXPECT_EQ(r.json()["workers"], 2);
}

TEST_F(ServiceTest, UploadSubmitPollFetch) {
  TestServer server(dir_.path());
  const Response up = server.Post("/api/v1/datasets?name=small.csv&label=class", SmallCsv(),
                                  "text/csv");
  ASSERT_EQ(up.status, 201) << up.body;
  ExpectValid(up.json());
  EXPECT_EQ(up.json()["summary"]["samples"], 60);
  EXPECT_EQ(up.json()["preview"].size(), 10u);
  const std::string ds = up.json()["dataset_id"];

  const Response again = server.Get("/api/v1/datasets/" + ds);
  ASSERT_EQ(again.status, 200);
  EXPECT_EQ(again.body, up.body);

  const Json config = {{"algorithm", "sffs"}, {"penalty", "alpha=1"}, {"max_cardinality", 2}};
  const Response sub =
      server.Post("/api/v1/runs", Json{{"kind", "select"}, {"dataset_id", ds}, {"config", config}});
  ASSERT_EQ(sub.status, 202) << sub.body;
  ExpectValid(sub.json());
  const std::string run = sub.json()["run_id"];

  const Json record = server.Await(run);
  ExpectValid(record);
  EXPECT_EQ(record["status"], "done");
  EXPECT_EQ(record["dataset_id"], ds);
  EXPECT_FALSE(record["started"].is_null());
  EXPECT_FALSE(record["finished"].is_null());

  const Response result = server.Get("/api/v1/runs/" + run + "/result");
  ASSERT_EQ(result.status, 200);
  ExpectValid(result.json());
  const auto input = SmallInput();
  EXPECT_EQ(result.body,
            service::Serialize(service::Run(service::RunKind::kSelect, &input, config)));
  // f1 and f3 jointly determine the class.
  EXPECT_EQ(result.json()["result"]["best_subset"]["names"], (Json{"f1", "f3"}));
}

TEST_F(ServiceTest, MultipartUpload) {
  TestServer server(dir_.path());
  const Response r = server.PostMultipart(
      "/api/v1/datasets", {{"file", SmallCsv(), "small.csv", "text/csv"}, {"label", "class", "", ""}});
  ASSERT_EQ(r.status, 201) << r.body;
  ExpectValid(r.json());
  EXPECT_EQ(r.json()["name"], "small.csv");
  EXPECT_EQ(r.json()["summary"]["label"], "class");
}

TEST_F(ServiceTest, LargeFormEncodedUpload) {
  // curl --data-binary sends this content type by default.
  TestServer server(dir_.path());
  const std::string csv = SmallCsv(400);
  ASSERT_GT(csv.size(), 8192u);
  const Response r = server.Post("/api/v1/datasets?label=class", csv,
                                 "application/x-www-form-urlencoded");
  ASSERT_EQ(r.status, 201) << r.body;
  EXPECT_EQ(r.json()["summary"]["samples"], 400);
}

TEST_F(ServiceTest, ParallelAxesFollowRequestedOrder) {
  TestServer server(dir_.path());
  const std::string ds = server.Upload(SmallCsv(), "class");
  const auto input = SmallInput();
  for (const std::string degree : {"", "&degree=1"}) {
    const Response r = server.Get("/api/v1/datasets/" + ds + "/parallel?features=3,1,2" + degree);
    ASSERT_EQ(r.status, 200) << r.body;
    const Json doc = r.json();
    ExpectValid(doc);
    ASSERT_EQ(doc["axes"].size(), 3u);
    EXPECT_EQ(doc["axes"][0]["index"], 3);
    EXPECT_EQ(doc["axes"][1]["index"], 1);
    EXPECT_EQ(doc["axes"][2]["index"], 2);
    EXPECT_EQ(doc["axes"][0]["name"], "f3");
    ASSERT_EQ(doc["rows"].size(), 60u);
    if (degree.empty()) {
      for (int i = 0; i < 60; ++i) {
        const Json& row = doc["rows"][i]["values"];
        EXPECT_EQ(row[0].get<double>(), input.raw.samples(i, 3));
        EXPECT_EQ(row[1].get<double>(), input.raw.samples(i, 1));
        EXPECT_EQ(row[2].get<double>(), input.raw.samples(i, 2));
      }
    } else {
      const auto q = Quantize(input.raw, FitQuantizer(input.raw, 1));
      for (int i = 0; i < 60; ++i) {
        const Json& row = doc["rows"][i]["values"];
        EXPECT_EQ(row[0].get<double>(), q.value(i, 3));
        EXPECT_EQ(row[1].get<double>(), q.value(i, 1));
        EXPECT_EQ(row[2].get<double>(), q.value(i, 2));
      }
    }
  }
  // Names work as well as indices.
  const Response named = server.Get("/api/v1/datasets/" + ds + "/parallel?features=f4,f0");
  ASSERT_EQ(named.status, 200);
  EXPECT_EQ(named.json()["axes"][0]["index"], 4);
}

TEST_F(ServiceTest, ScatterAndQuantizeValidate) {
  TestServer server(dir_.path());
  const std::string ds = server.Upload(SmallCsv(), "class");
  const Response s = server.Get("/api/v1/datasets/" + ds + "/scatter?x=f0&y=2&degree=2");
  ASSERT_EQ(s.status, 200) << s.body;
  ExpectValid(s.json());
  EXPECT_EQ(s.json()["points"].size(), 60u);
  EXPECT_EQ(s.json()["y"]["name"], "f2");

  const Response q = server.Post("/api/v1/datasets/" + ds + "/quantize", Json{{"degree", 1}});
  ASSERT_EQ(q.status, 200) << q.body;
  ExpectValid(q.json());
  EXPECT_EQ(q.json()["levels"], 3);
  EXPECT_EQ(q.body, service::Serialize(service::RunQuantize(SmallInput(), 1)));
}

TEST_F(ServiceTest, CrossValidationRun) {
  TestServer server(dir_.path());
  const std::string ds = server.Upload(SmallCsv(), "class");
  const std::string run = server.Submit(
      {{"kind", "cv"}, {"dataset_id", ds}, {"config", {{"executions", 4}, {"seed", 11}}}});
  const Json doc = Json::parse(server.ResultText(run));
  ExpectValid(doc);
  EXPECT_EQ(doc["result"]["runs"].size(), 4u);
  EXPECT_EQ(doc["result"]["chart_series"].size(), 4u);
}

TEST_F(ServiceTest, NetworkPayloadMatchesScore) {
  TestServer server(dir_.path());
  const std::string run = server.Submit(
      {{"kind", "netrec"},
       {"config", {{"generate", {{"nodes", 8}, {"timestamps", 30}, {"seed", 5}}}}}});
  const Json result = Json::parse(server.ResultText(run));
  ExpectValid(result);
  const Response r = server.Get("/api/v1/runs/" + run + "/network");
  ASSERT_EQ(r.status, 200) << r.body;
  const Json doc = r.json();
  ExpectValid(doc);
  std::map<std::string, int> counts;
  for (const auto& e : doc["edges"]) ++counts[e["status"].get<std::string>()];
  const Json& score = result["result"]["score"];
  EXPECT_EQ(counts["true_positive"], score["true_positives"]);
  EXPECT_EQ(counts["false_positive"], score["false_positives"]);
  EXPECT_EQ(counts["false_negative"], score["false_negatives"]);
  std::set<std::pair<int, int>> fp;
  for (const auto& e : score["false_positive_edges"]) fp.insert({e["predictor"].get<int>(), e["target"].get<int>()});
  for (const auto& e : doc["edges"]) {
    EXPECT_EQ(e["status"] == "false_positive", fp.contains({e["predictor"].get<int>(), e["target"].get<int>()}));
  }
}

TEST_F(ServiceTest, StructuredClientErrors) {
  TestServer server(dir_.path());
  const std::string ds = server.Upload(SmallCsv(), "class");
  auto expect_error = [&](const Response& r, int status, const std::string& code) {
    EXPECT_EQ(r.status, status) << r.body;
    const Json doc = r.json();
    ExpectValid(doc);
    EXPECT_EQ(doc["error"]["code"], code) << r.body;
  };
  expect_error(server.Get("/api/v1/datasets/ds-999999"), 404, "not_found");
  expect_error(server.Get("/api/v1/runs/run-999999"), 404, "not_found");
  expect_error(server.Get("/api/v1/runs/run-999999/result"), 404, "not_found");
  expect_error(server.Get("/api/v1/nothing-here"), 404, "not_found");
  expect_error(server.Post("/api/v1/runs", std::string("{not json")), 400, "bad_json");
  expect_error(server.Post("/api/v1/runs", Json{{"kind", "dance"}, {"dataset_id", ds}}), 400,
               "bad_request");
  expect_error(server.Post("/api/v1/runs", Json{{"kind", "select"}}), 400, "bad_request");
  expect_error(server.Post("/api/v1/runs", Json{{"kind", "select"}, {"dataset_id", "ds-404"}}),
               404, "not_found");
  expect_error(server.Post("/api/v1/runs", Json{{"kind", "select"},
                                                {"dataset_id", ds},
                                                {"config", {{"colour", "red"}}}}),
               400, "bad_config");
  expect_error(server.Post("/api/v1/runs", Json{{"kind", "select"},
                                                {"dataset_id", ds},
                                                {"config", {{"penalty", "beta=7"}}}}),
               400, "bad_config");
  expect_error(
      server.Post("/api/v1/datasets?label=class", std::string("a,b,class\n1,x,0\n"), "text/csv"),
      400, "parse_error");
  expect_error(server.Post("/api/v1/datasets?label=nope", SmallCsv(), "text/csv"), 400,
               "bad_config");
  expect_error(server.Post("/api/v1/datasets", std::string(), "text/csv"), 400, "bad_upload");
  expect_error(server.Post("/api/v1/datasets", std::string(2 << 20, '1'), "text/csv"), 413,
               "payload_too_large");
  expect_error(server.Get("/api/v1/datasets/" + ds + "/parallel"), 400, "bad_request");
  expect_error(server.Get("/api/v1/datasets/" + ds + "/parallel?features=1,99"), 400,
               "bad_feature");
  expect_error(server.Get("/api/v1/datasets/" + ds + "/scatter?x=1&y=2&degree=0"), 400,
               "bad_degree");
  expect_error(server.Post("/api/v1/datasets/" + ds + "/quantize", Json{{"degree", "two"}}), 400,
               "bad_config");

  const std::string select = server.Submit({{"kind", "select"}, {"dataset_id", ds}});
  server.Await(select);
  expect_error(server.Get("/api/v1/runs/" + select + "/network"), 400, "bad_request");
}

TEST_F(ServiceTest, FailedRunReportsModule) {
  TestServer server(dir_.path());
  const std::string ds = server.Upload(SmallCsv(), "class");
  const std::string run = server.Submit(
      {{"kind", "select"},
       {"dataset_id", ds},
       {"config", {{"algorithm", "exhaustive"}, {"exhaustive_limit", 1}}}});
  const Json record = server.Await(run);
  ExpectValid(record);
  EXPECT_EQ(record["status"], "failed");
  EXPECT_EQ(record["error"]["module"], "search");
  const Response r = server.Get("/api/v1/runs/" + run + "/result");
  EXPECT_EQ(r.status, 500);
  ExpectValid(r.json());
  EXPECT_EQ(r.json()["error"]["code"], "run_failed");
  EXPECT_EQ(r.json()["error"]["module"], "search");
}

TEST_F(ServiceTest, ResultOfQueuedRunIsNotReady) {
  // One worker busy with cross-validation keeps the later run queued.
  TestServer server(dir_.path(), 1);
  const std::string ds = server.Upload(SmallCsv(400), "class");
  server.Submit({{"kind", "cv"},
                 {"dataset_id", ds},
                 {"config", {{"executions", 30}, {"algorithm", "exhaustive"}}}});
  const std::string queued = server.Submit({{"kind", "select"}, {"dataset_id", ds}});
  const Response r = server.Get("/api/v1/runs/" + queued + "/result");
  EXPECT_EQ(r.status, 409) << r.body;
  ExpectValid(r.json());
  EXPECT_EQ(r.json()["error"]["code"], "not_ready");
  EXPECT_EQ(server.Await(queued)["status"], "done");
}

TEST_F(ServiceTest, ConcurrentRunsStayIsolated) {
  TestServer server(dir_.path(), 4);
  const std::string ds = server.Upload(SmallCsv(), "class");
  const auto input = SmallInput();
  std::vector<Json> configs;
  for (const char* criterion : {"mce", "cod"}) {
    for (const char* penalty : {"none", "alpha=1", "beta=0.8"}) {
      for (const char* algorithm : {"sfs", "sffs"}) {
        configs.push_back({{"criterion", criterion}, {"penalty", penalty}, {"algorithm", algorithm}});
      }
    }
  }
  std::vector<std::string> ids(configs.size());
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    threads.emplace_back([&, i] {
      ids[i] = server.Submit({{"kind", "select"}, {"dataset_id", ds}, {"config", configs[i]}});
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), ids.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    EXPECT_EQ(server.ResultText(ids[i]),
              service::Serialize(service::Run(service::RunKind::kSelect, &input, configs[i])))
        << configs[i].dump();
  }
}

TEST_F(ServiceTest, RunsSurviveRestart) {
  std::string ds, run, text;
  {
    TestServer server(dir_.path());
    ds = server.Upload(SmallCsv(), "class");
    run = server.Submit({{"kind", "select"}, {"dataset_id", ds}});
    text = server.ResultText(run);
  }
  TestServer server(dir_.path());
  const Json record = server.Get("/api/v1/runs/" + run).json();
  EXPECT_EQ(record["status"], "done");
  ExpectValid(record);
  const Response r = server.Get("/api/v1/runs/" + run + "/result");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body, text);
  EXPECT_EQ(server.Get("/api/v1/datasets/" + ds).status, 200);
  // New ids continue after the persisted ones.
  EXPECT_NE(server.Upload(SmallCsv(), "class"), ds);
  const std::string run2 = server.Submit({{"kind", "select"}, {"dataset_id", ds}});
  EXPECT_NE(run2, run);
  EXPECT_EQ(server.ResultText(run2), text);
}

TEST_F(ServiceTest, InterruptedRunsAreFailedOnRestart) {
  std::string id;
  {
    service::RunStore store(dir_.path());
    id = store.CreateRun(service::RunKind::kNetworkRecovery, std::nullopt,
                         service::NormalizeConfig(service::RunKind::kNetworkRecovery,
                                                  {{"generate", Json::object()}}))
             .id;
    ASSERT_TRUE(store.MarkRunning(id));
  }
  TestServer server(dir_.path());
  const Json record = server.Get("/api/v1/runs/" + id).json();
  ExpectValid(record);
  EXPECT_EQ(record["status"], "failed");
  EXPECT_NE(record["error"]["message"].get<std::string>().find("interrupted"), std::string::npos);
}

TEST(RunStoreTest, StatusOnlyMovesForward) {
  TempDir dir;
  service::RunStore store(dir.path());
  const auto run = store.CreateRun(service::RunKind::kSelect, std::nullopt, Json::object());
  EXPECT_TRUE(store.MarkRunning(run.id));
  EXPECT_FALSE(store.MarkRunning(run.id));
  EXPECT_TRUE(store.MarkDone(run.id, "{}\n"));
  EXPECT_FALSE(store.MarkFailed(run.id, "late", "x"));
  EXPECT_FALSE(store.MarkDone(run.id, "{}\n"));
  EXPECT_EQ(store.FindRun(run.id)->status, service::RunStatus::kDone);
  EXPECT_EQ(*store.ReadResult(run.id), "{}\n");
}

TEST(RunStoreTest, RecordRoundTrips) {
  TempDir dir;
  service::RunStore store(dir.path());
  const auto run = store.CreateRun(service::RunKind::kCrossValidation, "ds-000001",
                                   Json{{"seed", 3}, {"penalty", "beta=0.5"}});
  store.MarkRunning(run.id);
  store.MarkFailed(run.id, "boom", "validation");
  const auto stored = *store.FindRun(run.id);
  EXPECT_EQ(service::RunRecord::FromJson(stored.ToJson()).ToJson(), stored.ToJson());
  service::RunStore reopened(dir.path());
  EXPECT_EQ(reopened.FindRun(run.id)->ToJson(), stored.ToJson());
  ExpectValid(stored.ToJson());
}

TEST(SchemaTest, RejectsMalformedDocuments) {
  Json doc = {{"schema", "dimred.health.v1"}, {"status", "ok"}, {"version", "1"}, {"workers", 2}};
  EXPECT_TRUE(Schemas().Validate(doc).empty());
  doc["workers"] = "two";
  EXPECT_FALSE(Schemas().Validate(doc).empty());
  doc["workers"] = 2;
  doc["extra"] = true;
  EXPECT_FALSE(Schemas().Validate(doc).empty());
  doc.erase("extra");
  doc.erase("status");
  EXPECT_FALSE(Schemas().Validate(doc).empty());
  EXPECT_FALSE(Schemas().Validate(Json{{"schema", "dimred.unknown.v1"}}).empty());
}

class CliParityTest : public ::testing::Test {
 protected:
  void SetUp() override {
    csv_ = dir_.path() / "small.csv";
    std::ofstream(csv_) << SmallCsv();
    series_ = dir_.path() / "series.csv";
    std::ofstream(series_) << SeriesCsv();
  }

  // Binary time series, one row per step: g1 copies g0, g2 = g0 and g1.
  static std::string SeriesCsv() {
    std::ostringstream out;
    out << "g0,g1,g2\n";
    int g0 = 0, g1 = 1, g2 = 0;
    for (int t = 0; t < 16; ++t) {
      out << g0 << ',' << g1 << ',' << g2 << '\n';
      const int next0 = (t * 7 + 3) % 5 < 2;
      g2 = g0 & g1;
      g1 = g0;
      g0 = next0;
    }
    return out.str();
  }

  TempDir dir_;
  std::filesystem::path csv_;
  std::filesystem::path series_;
};

TEST_F(CliParityTest, DocumentsMatchService) {
  TempDir state;
  TestServer server(state.path());
  const std::string ds = server.Upload(SmallCsv(), "class");
  const Response series = server.Post("/api/v1/datasets", SeriesCsv(), "text/csv");
  ASSERT_EQ(series.status, 201) << series.body;
  const std::string series_id = series.json()["dataset_id"];
  struct Case {
    std::vector<std::string> args;
    Json request;
  };
  const std::vector<Case> cases = {
      {{"select", "--input", csv_.string(), "--label", "class", "--criterion", "cod", "--penalty",
        "beta=0.7", "--max-card", "2"},
       {{"kind", "select"},
        {"dataset_id", ds},
        {"config", {{"criterion", "cod"}, {"penalty", "beta=0.7"}, {"max_cardinality", 2}}}}},
      {{"cv", "--input", csv_.string(), "--label", "class", "--executions", "3", "--seed", "9",
        "--generalization", "random"},
       {{"kind", "cv"},
        {"dataset_id", ds},
        {"config", {{"executions", 3}, {"seed", 9}, {"generalization", "random"}}}}},
      {{"netrec", "--generate", "nodes=6,timestamps=12", "--seed", "4"},
       {{"kind", "netrec"}, {"config", {{"generate", {{"nodes", 6}, {"timestamps", 12}, {"seed", 4}}}}}}},
      {{"netrec", "--input", series_.string(), "--no-quantize", "--max-card", "2"},
       {{"kind", "netrec"}, {"dataset_id", series_id}, {"config", {{"max_cardinality", 2}}}}},
  };
  for (const auto& c : cases) {
    const CliResult cli = RunCli(DIMRED_CLI_PATH, c.args);
    ASSERT_EQ(cli.exit_code, 0) << c.args[0];
    EXPECT_EQ(cli.out, server.ResultText(server.Submit(c.request))) << c.request.dump();
  }
}

TEST_F(CliParityTest, ExitCodes) {
  EXPECT_EQ(RunCli(DIMRED_CLI_PATH, {}).exit_code, 2);
  EXPECT_EQ(RunCli(DIMRED_CLI_PATH, {"select", "--input", csv_.string()}).exit_code, 2);
  EXPECT_EQ(RunCli(DIMRED_CLI_PATH, {"select", "--input", csv_.string(), "--label", "class",
                                     "--penalty", "gamma"})
                .exit_code,
            2);
  EXPECT_EQ(RunCli(DIMRED_CLI_PATH, {"netrec", "--generate", "nodes=x"}).exit_code, 2);
  EXPECT_EQ(RunCli(DIMRED_CLI_PATH, {"select", "--input", csv_.string(), "--label", "missing"})
                .exit_code,
            1);
  EXPECT_EQ(RunCli(DIMRED_CLI_PATH, {"select", "--input", csv_.string(), "--label", "class",
                                     "--algorithm", "exhaustive", "--exhaustive-limit", "1"})
                .exit_code,
            1);
  const auto out = dir_.path() / "out.json";
  EXPECT_EQ(RunCli(DIMRED_CLI_PATH,
                   {"quantize", "--input", csv_.string(), "--label", "class", "--output", out.string()})
                .exit_code,
            0);
  std::ifstream in(out);
  const Json doc = Json::parse(in);
  ExpectValid(doc);
}

}  // namespace
}  // namespace dimred::testing
