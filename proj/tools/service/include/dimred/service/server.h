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

#ifndef DIMRED_SERVICE_SERVER_H_
#define DIMRED_SERVICE_SERVER_H_

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>

namespace dimred::service {

struct ServerOptions {
  std::filesystem::path state_dir;
  int workers = 2;
  std::size_t max_upload_bytes = std::size_t{64} << 20;
};

// JSON-over-HTTP front end for the pipelines. Runs are queued on a worker
// pool and persisted in a RunStore under `state_dir`.
//
//   POST /api/v1/datasets                     upload (raw body or multipart "file")
//   GET  /api/v1/datasets/{id}
//   POST /api/v1/datasets/{id}/quantize       {"degree": k}
//   GET  /api/v1/datasets/{id}/scatter?x=&y=[&degree=]
//   GET  /api/v1/datasets/{id}/parallel?features=3,1,2[&degree=]
//   POST /api/v1/runs                         {"kind", "dataset_id", "config"}
//   GET  /api/v1/runs/{id}
//   GET  /api/v1/runs/{id}/result
//   GET  /api/v1/runs/{id}/network
//   GET  /api/v1/health
class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Returns the bound port, or -1.
  int BindToAnyPort(const std::string& host);
  bool Bind(const std::string& host, int port);
  // Blocks until Stop().
  bool ListenAfterBind();
  void Stop();

  // Blocks until every queued run has finished.
  void WaitForIdle();

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dimred::service

#endif  // DIMRED_SERVICE_SERVER_H_
