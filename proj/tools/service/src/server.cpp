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

#include "cpoint/service/server.hpp"

#include <fstream>
#include <mutex>
#include <sstream>

#include "httplib.h"

#include "cpoint/service/json_io.hpp"

namespace cpoint::service {

namespace {

constexpr const char* kJson = "application/json";

bool valid_id(const std::string& id) {
  if (id.size() != 16) return false;
  for (char c : id)
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  return true;
}

void send_error(httplib::Response& res, const Error& e) {
  res.status = http_status(e.code());
  res.set_content(error_json(e), kJson);
}

std::string form_field(const httplib::Request& req, const char* name) {
  if (!req.has_file(name)) return {};
  return req.get_file_value(name).content;
}

// Runs fn, turning library errors into JSON error bodies.
template <typename F>
void guarded(httplib::Response& res, F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    send_error(res, e);
  } catch (const std::exception& e) {
    res.status = 500;
    res.set_content(error_json("Internal", e.what()), kJson);
  }
}

std::shared_ptr<const ModelBundle> require(const ModelStore& store, const std::string& id) {
  auto b = valid_id(id) ? store.find(id) : nullptr;
  if (!b) throw Error(ErrorCode::kNotFound, "no model with id '" + id + "'");
  return b;
}

}  // namespace

ModelStore::ModelStore(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {
  if (dir_) {
    std::error_code ec;
    std::filesystem::create_directories(*dir_, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir_->string() + ": " + ec.message());
  }
}

std::filesystem::path bundle_path(const std::filesystem::path& dir, const std::string& id) {
  return dir / (id + ".json");
}

std::string ModelStore::put(std::shared_ptr<const ModelBundle> bundle) {
  const std::string id = bundle->id;
  {
    std::unique_lock lock(mu_);
    if (!bundles_.emplace(id, bundle).second) return id;
  }
  if (dir_) {
    // Write then rename so readers never see a partial file.
    const auto path = bundle_path(*dir_, id);
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      out << bundle_file(*bundle);
      if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot write " + path.string() + ": " + ec.message());
  }
  return id;
}

std::shared_ptr<const ModelBundle> ModelStore::find(const std::string& id) const {
  {
    std::shared_lock lock(mu_);
    auto it = bundles_.find(id);
    if (it != bundles_.end()) return it->second;
  }
  if (!dir_) return nullptr;
  std::ifstream in(bundle_path(*dir_, id), std::ios::binary);
  if (!in) return nullptr;
  std::ostringstream text;
  text << in.rdbuf();
  auto b = load_bundle_file(text.str());
  if (b->id != id) return nullptr;
  std::unique_lock lock(mu_);
  return bundles_.emplace(id, std::move(b)).first->second;
}

std::size_t ModelStore::size() const {
  std::shared_lock lock(mu_);
  return bundles_.size();
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kOutOfRange:
      return 422;
    case ErrorCode::kSingularBasis:
    case ErrorCode::kCycleLimit:
    case ErrorCode::kNumericalBreakdown:
    case ErrorCode::kQuadratureFailure:
    case ErrorCode::kIoError:
      return 500;
    default:
      return 400;
  }
}

void register_routes(httplib::Server& server, ModelStore& store) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"status\":\"ok\"}\n", kJson);
  });

  server.Post("/api/models", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      if (!req.is_multipart_form_data()) {
        throw Error(ErrorCode::kInvalidArgument, "expected multipart/form-data with model, moments and correl");
      }
      ModelSources src;
      src.model = form_field(req, "model");
      src.moments = form_field(req, "moments");
      src.correl = form_field(req, "correl");
      src.deriv = form_field(req, "deriv");
      for (const char* part : {"model", "moments", "correl"}) {
        if (!req.has_file(part)) throw Error(ErrorCode::kInvalidArgument, std::string("missing part '") + part + "'");
      }
      if (req.has_file("horizon_days")) {
        const std::string h = req.get_file_value("horizon_days").content;
        try {
          src.horizon_days = std::stod(h);
        } catch (const std::exception&) {
          throw Error(ErrorCode::kInvalidArgument, "horizon_days must be a number");
        }
      }
      std::vector<std::string> log;
      QpModel model = compile_sources(src, &log);
      const std::string id = store.put(make_bundle(std::move(model), std::move(log)));
      res.status = 201;
      res.set_content("{\"id\":\"" + id + "\"}\n", kJson);
    });
  });

  server.Get(R"(/api/models/([^/]+)/frontier)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { res.set_content(frontier_json(*require(store, req.matches[1])), kJson); });
  });

  server.Post(R"(/api/models/([^/]+)/select)", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto b = require(store, req.matches[1]);
      const SelectRequest r = parse_select_request(req.body);
      res.set_content(selection_json(run_select(*b, r)), kJson);
    });
  });

  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty() && res.status == 404) {
      res.set_content(error_json("NotFound", "no such route"), kJson);
    }
  });
}

void serve(const std::string& host, int port, ModelStore& store) {
  httplib::Server server;
  register_routes(server, store);
  if (!server.listen(host, port)) {
    throw Error(ErrorCode::kIoError, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

}  // namespace cpoint::service
