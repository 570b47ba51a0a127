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

#include "cpoint/service/json_io.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

#include "cpoint/frontier.hpp"

namespace cpoint::service {

namespace {

using Json = nlohmann::ordered_json;

// nlohmann prints the shortest round-trip form; the interface promises a
// fixed 17-digit form instead, so documents are written here.
void write(std::string& out, const Json& j) {
  switch (j.type()) {
    case Json::value_t::null:
    case Json::value_t::discarded:
      out += "null";
      break;
    case Json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case Json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      break;
    case Json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      break;
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        break;
      }
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", v == 0.0 ? 0.0 : v);  // no "-0"
      out += buf;
      break;
    }
    case Json::value_t::string:
      out += j.dump();
      break;
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ',';
        first = false;
        write(out, e);
      }
      out += ']';
      break;
    }
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ',';
        first = false;
        out += Json(k).dump();
        out += ':';
        write(out, v);
      }
      out += '}';
      break;
    }
    case Json::value_t::binary:
      throw Error(ErrorCode::kInvalidArgument, "binary JSON values are not supported");
  }
}

std::string document(const Json& j) {
  std::string out;
  write(out, j);
  out += '\n';
  return out;
}

Json vec(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Json mat(const Matrix& m) {
  Json a = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i)));
  return a;
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("malformed JSON: ") + e.what());
  }
}

Vector read_vec(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw Error(ErrorCode::kFormatError, std::string("missing array '") + key + "'");
  }
  Vector v;
  for (const auto& x : j[key]) {
    if (!x.is_number()) throw Error(ErrorCode::kFormatError, std::string("non-numeric entry in '") + key + "'");
    v.push_back(x.get<double>());
  }
  return v;
}

Matrix read_mat(const Json& j, const char* key, std::size_t cols) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw Error(ErrorCode::kFormatError, std::string("missing matrix '") + key + "'");
  }
  Matrix m(j[key].size(), cols);
  std::size_t i = 0;
  for (const auto& row : j[key]) {
    if (!row.is_array() || row.size() != cols) {
      throw Error(ErrorCode::kFormatError, std::string("ragged matrix '") + key + "'");
    }
    std::size_t c = 0;
    for (const auto& x : row) {
      if (!x.is_number()) throw Error(ErrorCode::kFormatError, std::string("non-numeric entry in '") + key + "'");
      m(i, c++) = x.get<double>();
    }
    ++i;
  }
  return m;
}

}  // namespace

namespace {

Json model_object(const QpModel& m) {
  Json j;
  j["format"] = "cpoint-model/1";
  j["names"] = m.names;
  j["q"] = mat(m.q);
  j["p"] = vec(m.p);
  j["te"] = mat(m.eq);
  j["te_rhs"] = vec(m.eq_rhs);
  j["tl"] = mat(m.ineq);
  j["tl_rhs"] = vec(m.ineq_rhs);
  return j;
}

QpModel model_from(const Json& j) {
  if (!j.is_object() || j.value("format", "") != "cpoint-model/1") {
    throw Error(ErrorCode::kFormatError, "not a cpoint-model/1 document");
  }
  QpModel m;
  try {
    m.names = j.at("names").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kFormatError, "missing asset names");
  }
  const std::size_t n = m.names.size();
  m.q = read_mat(j, "q", n);
  m.p = read_vec(j, "p");
  m.eq = read_mat(j, "te", n);
  m.eq_rhs = read_vec(j, "te_rhs");
  m.ineq = read_mat(j, "tl", n);
  m.ineq_rhs = read_vec(j, "tl_rhs");
  m.validate();
  return m;
}

}  // namespace

std::string model_json(const QpModel& m) { return document(model_object(m)); }

QpModel parse_model_json(std::string_view text) { return model_from(parse_json(text)); }

std::string bundle_file(const ModelBundle& b) {
  Json j;
  j["format"] = "cpoint-bundle/1";
  j["id"] = b.id;
  j["model"] = model_object(b.model);
  j["log"] = b.log;
  return document(j);
}

std::shared_ptr<const ModelBundle> load_bundle_file(std::string_view text) {
  const Json j = parse_json(text);
  if (!j.is_object() || j.value("format", "") != "cpoint-bundle/1" || !j.contains("model")) {
    throw Error(ErrorCode::kFormatError, "not a cpoint-bundle/1 document");
  }
  QpModel m = model_from(j["model"]);
  std::vector<std::string> log;
  if (j.contains("log") && j["log"].is_array()) {
    for (const auto& line : j["log"])
      if (line.is_string()) log.push_back(line.get<std::string>());
  }
  auto b = make_bundle(std::move(m), std::move(log));
  if (j.value("id", "") != b->id) {
    throw Error(ErrorCode::kFormatError, "bundle id does not match its model");
  }
  return b;
}

std::string frontier_json(const ModelBundle& b) {
  const Frontier& f = b.frontier;
  Json j;
  j["id"] = b.id;
  j["names"] = f.path.names;
  j["min_return"] = f.min_return();
  j["max_return"] = f.max_return();
  j["min_std"] = f.min_std();
  j["max_std"] = f.max_std();
  j["open_ended"] = f.path.open_ended;
  if (f.path.open_ended) j["tail"] = vec(f.path.tail);
  Json points = Json::array();
  for (const CriticalPoint& c : f.path.points) {
    Json p;
    p["eta"] = c.eta;
    p["e"] = c.ret;
    p["v"] = c.variance;
    p["s"] = std::sqrt(std::max(c.variance, 0.0));
    p["x"] = vec(c.x);
    points.push_back(std::move(p));
  }
  j["points"] = std::move(points);
  Json segs = Json::array();
  for (const FrontierSegment& s : f.segments) {
    Json g;
    g["k"] = s.k;
    g["eta0"] = s.eta0;
    g["eta1"] = s.eta1;
    g["e0"] = s.e0;
    g["e1"] = s.e1;
    g["v00"] = s.v00;
    g["v01"] = s.v01;
    g["v11"] = s.v11;
    segs.push_back(std::move(g));
  }
  j["segments"] = std::move(segs);
  return document(j);
}

std::string selection_json(const PortfolioSelection& s) {
  Json j;
  j["by"] = select_by_name(s.by);
  j["query"] = s.query;
  j["status"] = status_name(s.status);
  j["critical"] = s.status == SelectionStatus::kCriticalPoint;
  j["eta"] = s.eta;
  j["e"] = s.ret;
  j["v"] = s.variance;
  j["s"] = s.std;
  j["rate"] = s.rate;
  j["k"] = s.k;
  j["l"] = s.l;
  Json w = Json::array();
  for (std::size_t i = 0; i < s.names.size(); ++i) {
    Json e;
    e["name"] = s.names[i];
    e["weight"] = s.weights[i];
    w.push_back(std::move(e));
  }
  j["weights"] = std::move(w);
  j["report"] = render_report({s});
  return document(j);
}

std::string error_json(const Error& e) {
  Json j;
  j["code"] = error_code_name(e.code());
  j["message"] = e.what();
  if (e.where()) {
    j["line"] = e.where()->line;
    j["column"] = e.where()->column;
  }
  return document(j);
}

std::string error_json(std::string_view code, std::string_view message) {
  Json j;
  j["code"] = code;
  j["message"] = message;
  return document(j);
}

SelectRequest parse_select_request(std::string_view text) {
  const Json j = parse_json(text);
  if (!j.is_object()) throw Error(ErrorCode::kFormatError, "the select request must be a JSON object");
  SelectRequest r;
  if (!j.contains("by") || !j["by"].is_string()) throw Error(ErrorCode::kInvalidArgument, "missing 'by'");
  r.by = parse_select_by(j["by"].get<std::string>());
  if (!j.contains("value") || !j["value"].is_number()) {
    throw Error(ErrorCode::kInvalidArgument, "missing numeric 'value'");
  }
  r.value = j["value"].get<double>();
  if (!std::isfinite(r.value)) throw Error(ErrorCode::kInvalidArgument, "'value' must be finite");
  if (j.contains("strict")) {
    if (!j["strict"].is_boolean()) throw Error(ErrorCode::kInvalidArgument, "'strict' must be a boolean");
    r.strict = j["strict"].get<bool>();
  }
  return r;
}

std::optional<Error> strict_violation(const SelectRequest& r, const PortfolioSelection& s) {
  if (!r.strict) return std::nullopt;
  if (s.status != SelectionStatus::kOutOfRangeHigh && s.status != SelectionStatus::kOutOfRangeLow) {
    return std::nullopt;
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%s = %.17g lies outside the frontier (%s)",
                std::string(select_by_name(r.by)).c_str(), r.value, std::string(status_name(s.status)).c_str());
  return Error(ErrorCode::kOutOfRange, buf);
}

PortfolioSelection run_select(const ModelBundle& b, const SelectRequest& r) {
  PortfolioSelection s = select(b.frontier, r.by, r.value);
  if (auto err = strict_violation(r, s)) throw *err;
  return s;
}

}  // namespace cpoint::service
