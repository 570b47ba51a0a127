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

// The HTTP service and the command line tool, driven end to end. The CLI
// runs as a child process so its stdout is compared with response bodies
// byte for byte.

#include <sys/wait.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "httplib.h"
#include "json.hpp"

#include "cpoint/mdl/compiler.hpp"
#include "cpoint/service/bundle.hpp"
#include "cpoint/service/json_io.hpp"
#include "cpoint/service/server.hpp"
#include "oracles.hpp"

namespace cpoint::service {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

struct RunResult {
  int status = -1;
  std::string out;
};

// Runs the CLI with CPOINT_DATA_DIR=dir; stderr is discarded.
RunResult run_cli(const fs::path& dir, const std::string& args) {
  const std::string cmd =
      "CPOINT_DATA_DIR='" + dir.string() + "' '" CPOINT_CLI_PATH "' " + args + " 2>/dev/null";
  RunResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("cpoint_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// Copies the fixtures into a scratch data directory.
fs::path data_dir(const std::string& name) {
  const fs::path d = fresh_dir(name);
  for (const char* f : {"MODEL.CP", "MODEL_PRINTED.CP", "MODPS.CP", "CORRELF.M", "DERIV.CP", "TEL3.ofc"}) {
    write(d / f, oracle::read_fixture(f));
  }
  return d;
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    register_routes(server_, store_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(30, 0);
    return c;
  }

  httplib::Result post_model(const std::string& model, const std::string& deriv = "") {
    httplib::MultipartFormDataItems items = {
        {"model", model, "MODEL.CP", "text/plain"},
        {"moments", oracle::read_fixture("MODPS.CP"), "MODPS.CP", "text/plain"},
        {"correl", oracle::read_fixture("CORRELF.M"), "CORRELF.M", "text/plain"},
    };
    if (!deriv.empty()) items.push_back({"deriv", deriv, "DERIV.CP", "text/plain"});
    return client().Post("/api/models", items);
  }

  std::string model_id() {
    auto r = post_model(oracle::read_fixture("MODEL.CP"));
    EXPECT_EQ(r->status, 201) << r->body;
    return Json::parse(r->body).at("id").get<std::string>();
  }

  httplib::Result post_select(const std::string& id, const std::string& body) {
    return client().Post("/api/models/" + id + "/select", body, "application/json");
  }

  ModelStore store_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST_F(ServiceTest, Healthz) {
  auto r = client().Get("/healthz");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(Json::parse(r->body).at("status"), "ok");
}

TEST_F(ServiceTest, PostThenGetReturnsTheSameFrontier) {
  const std::string id = model_id();
  auto a = client().Get("/api/models/" + id + "/frontier");
  auto b = client().Get("/api/models/" + id + "/frontier");
  ASSERT_EQ(a->status, 200);
  EXPECT_EQ(a->body, b->body);
  EXPECT_EQ(a->get_header_value("Content-Type"), "application/json");

  // The body is the library frontier, read back exactly.
  const Json j = Json::parse(a->body);
  auto bundle = store_.find(id);
  ASSERT_TRUE(bundle);
  const auto& pts = bundle->frontier.path.points;
  ASSERT_EQ(j.at("points").size(), pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    EXPECT_EQ(j["points"][k]["eta"].get<double>(), pts[k].eta);
    EXPECT_EQ(j["points"][k]["e"].get<double>(), pts[k].ret);
    for (std::size_t i = 0; i < pts[k].x.size(); ++i) EXPECT_EQ(j["points"][k]["x"][i].get<double>(), pts[k].x[i]);
  }
  EXPECT_EQ(j.at("segments").size(), bundle->frontier.segments.size());
}

TEST_F(ServiceTest, SamePostTwiceGivesTheSameId) {
  EXPECT_EQ(model_id(), model_id());
  EXPECT_EQ(store_.size(), 1u);
}

TEST_F(ServiceTest, MalformedModelIs400WithLine) {
  auto r = post_model("all = {TEL4,ELE6};\nnormal: sum[all] $ == 1;\nx = .5;\n");
  ASSERT_EQ(r->status, 400);
  const Json j = Json::parse(r->body);
  EXPECT_EQ(j.at("code"), "LexError");
  EXPECT_EQ(j.at("line"), 3);
  EXPECT_EQ(j.at("column"), 5);

  r = post_model(oracle::read_fixture("MODEL_PRINTED.CP"));
  ASSERT_EQ(r->status, 400);
  EXPECT_EQ(Json::parse(r->body).at("code"), "UnknownName");
  EXPECT_EQ(Json::parse(r->body).at("line"), 13);

  r = post_model("all = {TEL4,ELE6};\nlim: sum[all] $ <= 1;\n");
  ASSERT_EQ(r->status, 400);
  EXPECT_EQ(Json::parse(r->body).at("code"), "MissingNormalConstraint");
}

TEST_F(ServiceTest, MissingPartsAre400) {
  auto r = client().Post("/api/models", httplib::MultipartFormDataItems{{"model", "all={A};", "", ""}});
  ASSERT_EQ(r->status, 400);
  EXPECT_EQ(Json::parse(r->body).at("code"), "InvalidArgument");
  r = client().Post("/api/models", "{}", "application/json");
  EXPECT_EQ(r->status, 400);
}

TEST_F(ServiceTest, UnknownIdIs404) {
  for (const std::string id : {"0000000000000000", "not-an-id", "../../etc"}) {
    auto r = client().Get("/api/models/" + id + "/frontier");
    ASSERT_EQ(r->status, 404) << id;
    EXPECT_EQ(Json::parse(r->body).at("code"), "NotFound");
    r = post_select(id, R"({"by":"eta","value":0})");
    EXPECT_EQ(r->status, 404);
  }
}

TEST_F(ServiceTest, OutOfRangeIsStatusUnlessStrict) {
  const std::string id = model_id();
  auto r = post_select(id, R"({"by":"e","value":5})");
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(Json::parse(r->body).at("status"), "OutOfRangeHigh");
  r = post_select(id, R"({"by":"s","value":0.01,"strict":false})");
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(Json::parse(r->body).at("status"), "OutOfRangeLow");

  r = post_select(id, R"({"by":"e","value":5,"strict":true})");
  ASSERT_EQ(r->status, 422);
  EXPECT_EQ(Json::parse(r->body).at("code"), "OutOfRange");
  r = post_select(id, R"({"by":"e","value":0.05,"strict":true})");
  EXPECT_EQ(r->status, 200);
}

TEST_F(ServiceTest, BadSelectRequestsAre400) {
  const std::string id = model_id();
  for (const char* body : {R"({"by":"x","value":1})", R"({"by":"eta"})", R"({"by":"eta","value":"1"})",
                           R"({"by":"eta","value":1,"strict":1})", "[1]", "{"}) {
    auto r = post_select(id, body);
    EXPECT_EQ(r->status, 400) << body;
    EXPECT_TRUE(Json::parse(r->body).contains("code")) << body;
  }
}

TEST_F(ServiceTest, SelectionMatchesTheLibrary) {
  const std::string id = model_id();
  auto bundle = store_.find(id);
  const Frontier& f = bundle->frontier;
  // A critical eta reports itself as critical.
  const double eta1 = f.path.points[1].eta;
  auto r = post_select(id, Json{{"by", "eta"}, {"value", eta1}}.dump());
  ASSERT_EQ(r->status, 200);
  const Json j = Json::parse(r->body);
  EXPECT_TRUE(j.at("critical").get<bool>());
  EXPECT_EQ(j.at("k"), 1);

  // Mid-segment return query, identical to a direct library call.
  const double e = 0.5 * (f.path.points[2].ret + f.path.points[3].ret);
  r = post_select(id, Json{{"by", "e"}, {"value", e}}.dump());
  EXPECT_EQ(r->body, selection_json(select(f, SelectBy::kReturn, e)));
  EXPECT_FALSE(Json::parse(r->body).at("critical").get<bool>());
  EXPECT_EQ(Json::parse(r->body).at("e").get<double>(), e);
}

TEST_F(ServiceTest, ConcurrentSelectsAgree) {
  const std::string id = model_id();
  const std::string want = post_select(id, R"({"by":"r","value":0.01})")->body;
  std::vector<std::thread> threads;
  std::atomic<int> same{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 10; ++i) {
        auto r = post_select(id, R"({"by":"r","value":0.01})");
        if (r && r->status == 200 && r->body == want) ++same;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(same.load(), 80);
}

TEST_F(ServiceTest, DerivativesExtendTheUniverse) {
  std::string model = oracle::read_fixture("MODEL.CP");
  model.replace(model.find("BRH4}"), 5, "BRH4,OTP19,OTP24,OTC16,OTC17}");
  model.replace(model.find("0.3@BRH4}"), 9, "0.3@BRH4,1@OTP19,1@OTP24,1@OTC16,1@OTC17}");
  auto r = post_model(model, oracle::read_fixture("DERIV.CP"));
  ASSERT_EQ(r->status, 201) << r->body;
  auto b = store_.find(Json::parse(r->body).at("id"));
  EXPECT_EQ(b->model.n(), 12u);
  EXPECT_EQ(b->model.names.back(), "OTC17");
}

TEST_F(ServiceTest, CliAndServiceAreByteIdentical) {
  const fs::path dir = data_dir("cli_http");
  const RunResult compiled = run_cli(dir, "compile --model MODEL.CP --moments MODPS.CP --correl CORRELF.M");
  ASSERT_EQ(compiled.status, 0);
  const std::string id = model_id();
  EXPECT_EQ(compiled.out, id + "\n");

  EXPECT_EQ(run_cli(dir, "frontier " + id).out, client().Get("/api/models/" + id + "/frontier")->body);
  struct Query {
    const char* by;
    double value;
  };
  std::mt19937_64 rng(11);
  auto bundle = store_.find(id);
  const double lo = bundle->frontier.min_return(), hi = bundle->frontier.max_return();
  std::vector<Query> queries = {{"eta", 0.0}, {"eta", 0.2}, {"e", 0.05}, {"s", 0.14}, {"r", 0.0}, {"r", -0.5}, {"e", 1.0}};
  for (int i = 0; i < 5; ++i) queries.push_back({"e", std::uniform_real_distribution<double>(lo, hi)(rng)});
  for (const auto& q : queries) {
    char value[32];
    std::snprintf(value, sizeof(value), "%.17g", q.value);
    const RunResult cli = run_cli(dir, "select " + id + " --by " + q.by + " --value " + value);
    ASSERT_EQ(cli.status, 0) << q.by << " " << value;
    const std::string body = post_select(id, std::string(R"({"by":")") + q.by + R"(","value":)" + value + "}")->body;
    EXPECT_EQ(cli.out, body) << q.by << " " << value;
  }
  fs::remove_all(dir);
}

TEST(Cli, CompileIsDeterministicAndIdIsStable) {
  const fs::path dir = data_dir("cli_ids");
  const std::string args = "compile --model MODEL.CP --moments MODPS.CP --correl CORRELF.M";
  const RunResult a = run_cli(dir, args);
  const std::string first = [&] {
    std::ifstream in(dir / "models" / (a.out.substr(0, 16) + ".json"));
    return std::string(std::istreambuf_iterator<char>(in), {});
  }();
  const RunResult b = run_cli(dir, args + " --out again.json");
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  std::ifstream in(dir / "again.json");
  EXPECT_EQ(std::string(std::istreambuf_iterator<char>(in), {}), first);
  // Pinned: the id depends only on the canonical model text.
  EXPECT_EQ(a.out, "ab655f3e1810373e\n");
  fs::remove_all(dir);
}

TEST(Cli, CompileKeepsPrintLog) {
  const fs::path dir = data_dir("cli_log");
  write(dir / "P.CP", oracle::read_fixture("MODEL.CP") + "\nprint statebanks;\n");
  const std::string id = run_cli(dir, "compile --model P.CP --moments MODPS.CP --correl CORRELF.M").out.substr(0, 16);
  std::ifstream in(dir / "models" / (id + ".json"));
  const Json j = Json::parse(std::string(std::istreambuf_iterator<char>(in), {}));
  EXPECT_EQ(j.at("log"), Json::array({"statebanks = {BB4}"}));
  fs::remove_all(dir);
}

TEST(Cli, CompileErrorsExitNonzero) {
  const fs::path dir = data_dir("cli_errors");
  EXPECT_EQ(run_cli(dir, "compile --model MODEL_PRINTED.CP --moments MODPS.CP --correl CORRELF.M").status, 1);
  EXPECT_EQ(run_cli(dir, "compile --model NOPE.CP --moments MODPS.CP --correl CORRELF.M").status, 1);
  EXPECT_NE(run_cli(dir, "compile --model MODEL.CP").status, 0);
  EXPECT_NE(run_cli(dir, "bogus").status, 0);
  fs::remove_all(dir);
}

TEST(Cli, StrictSelectFailsOutsideTheFrontier) {
  const fs::path dir = data_dir("cli_strict");
  const std::string id = run_cli(dir, "compile --model MODEL.CP --moments MODPS.CP --correl CORRELF.M").out.substr(0, 16);
  EXPECT_EQ(run_cli(dir, "select " + id + " --by e --value 5").status, 0);
  EXPECT_EQ(run_cli(dir, "select " + id + " --by e --value 5 --strict").status, 1);
  fs::remove_all(dir);
}

TEST(Cli, ReportAppends) {
  const fs::path dir = data_dir("cli_report");
  const std::string id = run_cli(dir, "compile --model MODEL.CP --moments MODPS.CP --correl CORRELF.M").out.substr(0, 16);
  const RunResult one = run_cli(dir, "report " + id + " --select eta=0.1 --select e=0.05");
  ASSERT_EQ(one.status, 0);
  ASSERT_EQ(run_cli(dir, "report " + id + " --select eta=0.1 --select e=0.05").status, 0);
  std::ifstream in(dir / "REPORT.CP");
  const std::string text(std::istreambuf_iterator<char>(in), {});
  EXPECT_EQ(text, one.out + one.out);
  // The compositions read back as the selected weights.
  auto b = load_bundle_file([&] {
    std::ifstream f(dir / "models" / (id + ".json"));
    return std::string(std::istreambuf_iterator<char>(f), {});
  }());
  const auto comps = parse_report_compositions(one.out);
  ASSERT_EQ(comps.size(), 2u);
  const PortfolioSelection s = select(b->frontier, SelectBy::kEta, 0.1);
  for (const auto& [name, w] : comps[0]) {
    const auto i = std::find(s.names.begin(), s.names.end(), name) - s.names.begin();
    EXPECT_NEAR(w, s.weights[i], 5e-7 * std::max(1.0, std::abs(s.weights[i])));
  }
  EXPECT_NE(run_cli(dir, "report " + id + " --select eta").status, 0);
  fs::remove_all(dir);
}

TEST(Cli, FilterConstantPricesGivesZeroMoments) {
  const fs::path dir = fresh_dir("cli_filter");
  for (const auto& [name, price] : {std::pair<const char*, double>{"AAA", 10.0}, {"BBB", 42.5}}) {
    std::string text = std::string("Asset: ") + name + "\nDeflator: NONE\nShares: 1\nDate Price\n";
    for (int d = 30; d >= 1; --d) {
      char row[64];
      std::snprintf(row, sizeof(row), "%02d/06/95 %g\n", d, price);
      text += row;
    }
    write(dir / (std::string(name) + ".ofc"), text + "*\n");
  }
  ASSERT_EQ(run_cli(dir, "filter AAA.ofc BBB.ofc --final-date 30/06/95 --samples 20").status, 0);
  std::ifstream mom(dir / "MOMENTS.CP"), cor(dir / "CORRELF.M");
  const std::string moments(std::istreambuf_iterator<char>(mom), {});
  const std::string correl(std::istreambuf_iterator<char>(cor), {});
  const MomentSet ms = mdl::load_moments(moments, correl);
  EXPECT_EQ(ms.names, (std::vector<std::string>{"AAA", "BBB"}));
  EXPECT_EQ(ms.er, (Vector{0.0, 0.0}));
  EXPECT_EQ(ms.std, (Vector{0.0, 0.0}));
  EXPECT_EQ(ms.correl, Matrix::identity(2));

  EXPECT_EQ(run_cli(dir, "filter AAA.ofc BBB.ofc --final-date 30/06/95 --samples 1").status, 1);
  EXPECT_EQ(run_cli(dir, "filter AAA.ofc --final-date 30/06/96 --samples 5").status, 1);
  fs::remove_all(dir);
}

TEST(Store, PersistsToDirectory) {
  const fs::path dir = fresh_dir("store");
  ModelSources src{oracle::read_fixture("MODEL.CP"), oracle::read_fixture("MODPS.CP"),
                   oracle::read_fixture("CORRELF.M"), "", 30.0};
  auto b = make_bundle(compile_sources(src));
  {
    ModelStore store(dir);
    store.put(b);
  }
  ModelStore reopened(dir);
  auto back = reopened.find(b->id);
  ASSERT_TRUE(back);
  EXPECT_EQ(frontier_json(*back), frontier_json(*b));
  EXPECT_FALSE(reopened.find("ffffffffffffffff"));

  // A tampered file no longer matches its id.
  std::string text = bundle_file(*b);
  text.replace(text.find("\"p\":[") + 5, 1, "9");
  EXPECT_EQ(oracle::thrown_code([&] { load_bundle_file(text); }), ErrorCode::kFormatError);
  fs::remove_all(dir);
}

TEST(Bundle, SingleAssetFrontierIsOnePoint) {
  const std::string moments = "all={A};\ner[all]={1.0E-01@A};\nstd[all]={2.0E-01@A};\n";
  auto b = make_bundle(compile_sources({"all={A}; normal: sum[all] $ == 1;", moments, "A\n1\n", "", 30.0}));
  const Json j = Json::parse(frontier_json(*b));
  ASSERT_EQ(j.at("points").size(), 1u);
  EXPECT_EQ(j.at("segments").size(), 0u);
  EXPECT_EQ(j["points"][0]["x"][0].get<double>(), 1.0);
}

TEST(Json, NumbersRoundTripExactly) {
  ModelSources src{oracle::read_fixture("MODEL.CP"), oracle::read_fixture("MODPS.CP"),
                   oracle::read_fixture("CORRELF.M"), "", 30.0};
  const QpModel m = compile_sources(src);
  EXPECT_EQ(parse_model_json(model_json(m)), m);
  EXPECT_EQ(model_json(parse_model_json(model_json(m))), model_json(m));
  EXPECT_EQ(oracle::thrown_code([] { parse_model_json("{\"format\":\"other\"}"); }), ErrorCode::kFormatError);
  EXPECT_EQ(oracle::thrown_code([] { parse_model_json("{"); }), ErrorCode::kFormatError);
}

}  // namespace
}  // namespace cpoint::service
