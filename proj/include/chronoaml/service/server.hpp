// Copyright 2026 The chronoaml Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <thread>

#include <httplib.h>

#include "chronoaml/core/error.hpp"
#include "chronoaml/service/api.hpp"

namespace chronoaml {

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;              // 0 picks a free port
  std::filesystem::path static_dir;  // served at / when set
};

// HTTP front end for an ApiService. start() binds and serves on a background
// thread; the service must outlive the server.
class ApiServer {
 public:
  explicit ApiServer(const ApiService& api) : api_(api) {
    server_.Get(R"(/api/.*)", [this](const httplib::Request& req, httplib::Response& res) {
      std::map<std::string, std::string> query;
      for (const auto& [k, v] : req.params) query.emplace(k, v);
      const ApiResponse r = api_.handle(req.path, query);
      res.status = r.status;
      res.set_content(r.body, r.content_type);
    });
  }

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;
  ~ApiServer() { stop(); }

  // Returns the bound port.
  int start(const ServeOptions& opts) {
    if (!opts.static_dir.empty() && !server_.set_mount_point("/", opts.static_dir.string()))
      throw ConfigError("static directory not found: " + opts.static_dir.string());
    port_ = opts.port == 0 ? server_.bind_to_any_port(opts.host)
                           : (server_.bind_to_port(opts.host, opts.port) ? opts.port : -1);
    if (port_ < 0)
      throw Error("cannot bind " + opts.host + ":" + std::to_string(opts.port));
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  // Blocks until stop() is called from elsewhere.
  void wait() {
    if (thread_.joinable()) thread_.join();
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const noexcept { return port_; }

 private:
  const ApiService& api_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace chronoaml
