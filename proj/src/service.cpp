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

#include "synthpose/service.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "binary_io.hpp"
#include "httplib.h"
#include "json.hpp"
#include "synthpose/error.hpp"
#include "synthpose/layout_io.hpp"
#include "synthpose/pose_io.hpp"
#include "synthpose/seedlift.hpp"

namespace synthpose {
namespace {

using json = nlohmann::json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

bool is_json_content(const std::string& content_type) {
  const auto semi = content_type.find(';');
  std::string base = content_type.substr(0, semi);
  base.erase(std::remove_if(base.begin(), base.end(), [](unsigned char c) { return std::isspace(c); }), base.end());
  std::transform(base.begin(), base.end(), base.begin(), [](unsigned char c) { return std::tolower(c); });
  return base == "application/json";
}

void send(httplib::Response& res, const HttpResponse& r) {
  res.status = r.status;
  res.set_content(r.body, r.content_type);
}

}  // namespace

HttpResponse error_response(int status, const std::string& code, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = {{"code", code}, {"message", message}};
  return {status, j.dump(), "application/json"};
}

HttpResponse handle_layouts() {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const JointLayout* l : builtin_layouts()) arr.push_back(nlohmann::ordered_json::parse(serialize_layout(l->spec())));
  nlohmann::ordered_json j;
  j["layouts"] = std::move(arr);
  return {200, j.dump(), "application/json"};
}

HttpResponse handle_lift(const std::string& content_type, const std::string& body) {
  if (!is_json_content(content_type))
    return error_response(415, "unsupported_media_type", "expected Content-Type: application/json");
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    return error_response(400, "format_error", std::string("malformed JSON: ") + e.what());
  }
  try {
    const LiftRequest req = parse_lift_request(j);
    const JointLayout* layout = find_builtin_layout(req.pose.layout_id);
    if (!layout) return error_response(400, "invalid_layout", "unknown layout_id '" + req.pose.layout_id + "'");
    const LiftResult r = lift(req.pose, *layout, head_spec_for(req, *layout));
    return {200, lift_result_to_json(r).dump(), "application/json"};
  } catch (const NoRealSolution& e) {
    nlohmann::ordered_json out;
    out["error"] = {{"code", std::string(to_string(e.code()))},
                    {"message", e.what()},
                    {"best_residual", e.best_residual()}};
    return {422, out.dump(), "application/json"};
  } catch (const MissingSign& e) {
    nlohmann::ordered_json out;
    out["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}, {"joint", e.joint()}};
    return {400, out.dump(), "application/json"};
  } catch (const Error& e) {
    return error_response(400, std::string(to_string(e.code())), e.what());
  }
}

SeedStore::SeedStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

bool SeedStore::valid_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(),
                     [](unsigned char c) { return std::isalnum(c) || c == '_' || c == '-'; });
}

std::vector<std::string> SeedStore::list() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<std::string> out;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir_, ec)) return out;
  for (const auto& e : std::filesystem::directory_iterator(dir_)) {
    if (e.path().extension() != ".json") continue;
    const std::string id = e.path().stem().string();
    if (valid_id(id)) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::string> SeedStore::get(const std::string& id) const {
  if (!valid_id(id)) return std::nullopt;
  std::lock_guard<std::mutex> lock(mu_);
  const auto p = dir_ / (id + ".json");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(p, ec)) return std::nullopt;
  return detail::read_file(p);
}

std::string SeedStore::put(const std::string& body, const std::string& id) {
  // Validate before touching the disk.
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("malformed JSON: ") + e.what());
  }
  if (j.is_array()) {
    decode_seed_file(body);
  } else {
    seed_from_json(j);
  }
  const std::string use = id.empty() ? "seed-" + hex64(fnv1a64(body)) : id;
  if (!valid_id(use)) throw Error(ErrorCode::kFormat, "seed id must match [A-Za-z0-9_-]{1,64}");

  static std::atomic<unsigned long> counter{0};
  std::lock_guard<std::mutex> lock(mu_);
  std::filesystem::create_directories(dir_);
  std::ostringstream tmp_name;
  tmp_name << "." << use << ".tmp" << counter++ << "-" << std::hash<std::thread::id>{}(std::this_thread::get_id());
  const auto tmp = dir_ / tmp_name.str();
  detail::write_file(tmp, body);
  std::filesystem::rename(tmp, dir_ / (use + ".json"));
  return use;
}

bool SeedStore::remove(const std::string& id) {
  if (!valid_id(id)) return false;
  std::lock_guard<std::mutex> lock(mu_);
  std::error_code ec;
  return std::filesystem::remove(dir_ / (id + ".json"), ec);
}

Service::Service(ServiceOptions options) : options_(std::move(options)), store_(options_.seed_dir) {}

void Service::register_routes(httplib::Server& server) {
  server.Get("/layouts", [](const httplib::Request&, httplib::Response& res) { send(res, handle_layouts()); });

  server.Post("/lift", [](const httplib::Request& req, httplib::Response& res) {
    send(res, handle_lift(req.get_header_value("Content-Type"), req.body));
  });

  server.Get("/seeds", [this](const httplib::Request&, httplib::Response& res) {
    json j;
    j["seeds"] = store_.list();
    send(res, {200, j.dump(), "application/json"});
  });

  server.Get(R"(/seeds/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (auto body = store_.get(id)) {
      send(res, {200, *body, "application/json"});
    } else {
      send(res, error_response(404, "not_found", "no seed '" + id + "'"));
    }
  });

  server.Post("/seeds", [this](const httplib::Request& req, httplib::Response& res) {
    if (!is_json_content(req.get_header_value("Content-Type"))) {
      send(res, error_response(415, "unsupported_media_type", "expected Content-Type: application/json"));
      return;
    }
    try {
      const std::string id = store_.put(req.body, req.has_param("id") ? req.get_param_value("id") : "");
      json j;
      j["id"] = id;
      send(res, {201, j.dump(), "application/json"});
    } catch (const Error& e) {
      send(res, error_response(400, std::string(to_string(e.code())), e.what()));
    } catch (const std::filesystem::filesystem_error& e) {
      send(res, error_response(500, "io", e.what()));
    }
  });

  server.Delete(R"(/seeds/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (store_.remove(id)) {
      res.status = 204;
    } else {
      send(res, error_response(404, "not_found", "no seed '" + id + "'"));
    }
  });

  if (!options_.static_dir.empty()) server.set_mount_point("/", options_.static_dir.string());

  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string msg = "internal error";
    try {
      if (ep) std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      msg = e.what();
    } catch (...) {
    }
    send(res, error_response(500, "internal", msg));
  });
}

}  // namespace synthpose
