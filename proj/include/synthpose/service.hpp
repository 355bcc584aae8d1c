// Copyright 2026 The synthpose Authors
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

// JSON-over-HTTP service behind the annotation tool:
//   GET    /layouts            built-in layouts
//   POST   /lift               lift one annotated 2D pose
//   GET    /seeds              stored seed files (ids)
//   GET    /seeds/<id>         one seed file, byte-for-byte as posted
//   POST   /seeds[?id=<id>]    store a seed file (array) or a single seed
//   DELETE /seeds/<id>
// Everything else is served from the static UI directory when one is set.
// Errors: {"error": {"code": "<stable code>", "message": "..."}}.

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace synthpose {

// Seed files kept as <dir>/<id>.json; writes go through a temp file and a
// rename so readers never see a partial file.
class SeedStore {
 public:
  explicit SeedStore(std::filesystem::path dir);

  std::vector<std::string> list() const;
  std::optional<std::string> get(const std::string& id) const;
  // Validates `body` as a seed file or single seed; returns the id used
  // (content hash when `id` is empty). Throws Error(kFormat).
  std::string put(const std::string& body, const std::string& id = {});
  bool remove(const std::string& id);

  static bool valid_id(const std::string& id);

 private:
  std::filesystem::path dir_;
  mutable std::mutex mu_;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Pure request handler for /lift, shared by the server and the CLI.
HttpResponse handle_lift(const std::string& content_type, const std::string& body);
HttpResponse handle_layouts();
HttpResponse error_response(int status, const std::string& code, const std::string& message);

struct ServiceOptions {
  std::filesystem::path seed_dir = "out/seeds";
  std::filesystem::path static_dir;  // optional
};

class Service {
 public:
  explicit Service(ServiceOptions options);
  void register_routes(httplib::Server& server);
  SeedStore& seeds() { return store_; }

 private:
  ServiceOptions options_;
  SeedStore store_;
};

}  // namespace synthpose
