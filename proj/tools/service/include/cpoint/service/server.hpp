// Copyright 2026 The cpoint Authors
//
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

// HTTP front end. Routes:
//   GET  /healthz
//   POST /api/models                (multipart: model, moments, correl, deriv?)
//   GET  /api/models/{id}/frontier
//   POST /api/models/{id}/select    ({"by": "eta|e|s|r", "value": v, "strict": b})

#ifndef CPOINT_SERVICE_SERVER_HPP_
#define CPOINT_SERVICE_SERVER_HPP_

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include "cpoint/error.hpp"
#include "cpoint/service/bundle.hpp"

namespace httplib {
class Server;
}

namespace cpoint::service {

// Bundles keyed by id. With a directory, new bundles are written there as
// <id>.json and unknown ids are looked up on disk before giving up.
class ModelStore {
 public:
  explicit ModelStore(std::optional<std::filesystem::path> dir = std::nullopt);

  // Returns the id; storing the same model twice is a no-op.
  std::string put(std::shared_ptr<const ModelBundle> bundle);
  std::shared_ptr<const ModelBundle> find(const std::string& id) const;
  std::size_t size() const;

 private:
  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mu_;
  mutable std::map<std::string, std::shared_ptr<const ModelBundle>> bundles_;
};

std::filesystem::path bundle_path(const std::filesystem::path& dir, const std::string& id);

// 400 for input errors, 404 NotFound, 422 OutOfRange, 500 otherwise.
int http_status(ErrorCode code);

void register_routes(httplib::Server& server, ModelStore& store);

// Blocks until the server stops.
void serve(const std::string& host, int port, ModelStore& store);

}  // namespace cpoint::service

#endif  // CPOINT_SERVICE_SERVER_HPP_
