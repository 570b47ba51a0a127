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

// cpoint filter|compile|frontier|select|report|serve
//
// Relative paths resolve against --data-dir, which defaults to
// $CPOINT_DATA_DIR and then to the working directory. Compiled bundles live
// in <data-dir>/models/<id>.json, the same layout the service persists to,
// so a model may be named either by path or by id.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cpoint/error.hpp"
#include "cpoint/frontier.hpp"
#include "cpoint/moments.hpp"
#include "cpoint/service/bundle.hpp"
#include "cpoint/service/json_io.hpp"
#include "cpoint/service/server.hpp"

namespace fs = std::filesystem;
using namespace cpoint;
using namespace cpoint::service;

namespace {

struct Context {
  std::string data_dir;

  fs::path resolve(const std::string& p) const {
    const fs::path path(p);
    return path.is_absolute() ? path : fs::path(data_dir) / path;
  }
  fs::path models_dir() const { return resolve("models"); }
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text, bool append = false) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

// The stdout document, or the file given by --out.
void emit(const Context& ctx, const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(ctx.resolve(out), text);
  }
}

std::shared_ptr<const ModelBundle> load_model(const Context& ctx, const std::string& ref) {
  fs::path path = ctx.resolve(ref);
  if (!fs::exists(path)) {
    const fs::path by_id = bundle_path(ctx.models_dir(), ref);
    if (fs::exists(by_id)) path = by_id;
  }
  return load_bundle_file(read_file(path));
}

// "by=value", e.g. "e=0.05".
SelectRequest parse_selection_arg(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "selection '" + arg + "' is not by=value");
  SelectRequest r;
  r.by = parse_select_by(arg.substr(0, eq));
  try {
    std::size_t used = 0;
    r.value = std::stod(arg.substr(eq + 1), &used);
    if (used != arg.size() - eq - 1) throw std::invalid_argument("trailing text");
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "selection '" + arg + "' has no numeric value");
  }
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cpoint: mean-variance frontiers from modelling-language programs"};
  app.require_subcommand(1);
  Context ctx;
  if (const char* env = std::getenv("CPOINT_DATA_DIR")) ctx.data_dir = env;
  if (ctx.data_dir.empty()) ctx.data_dir = ".";
  app.add_option("--data-dir", ctx.data_dir, "Base directory for relative paths (env CPOINT_DATA_DIR)");

  // filter
  auto* filter = app.add_subcommand("filter", "Estimate return moments from price series");
  std::vector<std::string> series_files;
  std::string final_date;
  FilterParams fp;
  std::string moments_out = "MOMENTS.CP", correl_out = "CORRELF.M";
  filter->add_option("series", series_files, "Price series files")->required();
  filter->add_option("--final-date", final_date, "Last date of the sample (dd/mm/yy or yyyy-mm-dd)")->required();
  filter->add_option("--interval", fp.interval_days, "Days between observations")->check(CLI::PositiveNumber);
  filter->add_option("--samples", fp.samples, "Number of returns")->required();
  filter->add_option("--extrap", fp.extrap, "Horizon in intervals");
  filter->add_option("--hurst", fp.hurst, "Hurst exponent for volatility scaling");
  filter->add_option("--max-carry", fp.max_carry, "Intervals a stale quote may be carried");
  filter->add_option("--moments-out", moments_out, "Moments file written")->capture_default_str();
  filter->add_option("--correl-out", correl_out, "Correlation file written")->capture_default_str();

  // compile
  auto* compile = app.add_subcommand("compile", "Compile a model into a frontier bundle");
  ModelSources src_paths;
  std::string compile_out;
  compile->add_option("--model", src_paths.model, "Model program")->required();
  compile->add_option("--moments", src_paths.moments, "Moments program")->required();
  compile->add_option("--correl", src_paths.correl, "Correlation file")->required();
  compile->add_option("--deriv", src_paths.deriv, "Derivatives block");
  compile->add_option("--horizon-days", src_paths.horizon_days, "Investment horizon in days")->capture_default_str();
  compile->add_option("--out", compile_out, "Bundle path (default models/<id>.json)");

  // frontier
  auto* frontier = app.add_subcommand("frontier", "Print the frontier of a compiled model");
  std::string model_ref, frontier_out;
  frontier->add_option("model", model_ref, "Bundle path or id")->required();
  frontier->add_option("--out", frontier_out, "Write to this file instead of stdout");

  // select
  auto* select_cmd = app.add_subcommand("select", "Select one frontier portfolio");
  std::string by;
  double value = 0.0;
  bool strict = false;
  std::string select_out;
  select_cmd->add_option("model", model_ref, "Bundle path or id")->required();
  select_cmd->add_option("--by", by, "eta, e, s or r")->required();
  select_cmd->add_option("--value", value, "Query value")->required();
  select_cmd->add_flag("--strict", strict, "Fail when the query lies outside the frontier");
  select_cmd->add_option("--out", select_out, "Write to this file instead of stdout");

  // report
  auto* report = app.add_subcommand("report", "Append selected portfolios to a report file");
  std::vector<std::string> selections;
  std::string report_out = "REPORT.CP";
  report->add_option("model", model_ref, "Bundle path or id")->required();
  report->add_option("--select", selections, "by=value, repeatable")->required();
  report->add_option("--out", report_out, "Report file (appended)")->capture_default_str();

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string store_dir;
  serve_cmd->add_option("--host", host)->capture_default_str();
  serve_cmd->add_option("--port", port)->capture_default_str();
  serve_cmd->add_option("--store", store_dir, "Bundle directory (default <data-dir>/models)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*filter) {
      fp.final_date = parse_date(final_date);
      std::vector<PriceSeries> series;
      for (const auto& f : series_files) series.push_back(parse_price_series(read_file(ctx.resolve(f))));
      const FilterResult r = filter_estimate(series, fp);
      write_file(ctx.resolve(moments_out),
                 write_moments(r.simple, {{"extrap", fp.extrap},
                                          {"hurst", fp.hurst},
                                          {"interval", static_cast<double>(fp.interval_days)},
                                          {"samples", static_cast<double>(fp.samples)}}));
      write_file(ctx.resolve(correl_out), write_correlation(r.simple.names, r.simple.correl));
    } else if (*compile) {
      ModelSources src;
      src.model = read_file(ctx.resolve(src_paths.model));
      src.moments = read_file(ctx.resolve(src_paths.moments));
      src.correl = read_file(ctx.resolve(src_paths.correl));
      if (!src_paths.deriv.empty()) src.deriv = read_file(ctx.resolve(src_paths.deriv));
      src.horizon_days = src_paths.horizon_days;
      std::vector<std::string> log;
      QpModel model = compile_sources(src, &log);
      auto b = make_bundle(std::move(model), std::move(log));
      for (const auto& line : b->log) std::cerr << line << "\n";
      const fs::path out = compile_out.empty() ? bundle_path(ctx.models_dir(), b->id) : ctx.resolve(compile_out);
      write_file(out, bundle_file(*b));
      std::cout << b->id << "\n";
    } else if (*frontier) {
      emit(ctx, frontier_out, frontier_json(*load_model(ctx, model_ref)));
    } else if (*select_cmd) {
      SelectRequest r;
      r.by = parse_select_by(by);
      r.value = value;
      r.strict = strict;
      emit(ctx, select_out, selection_json(run_select(*load_model(ctx, model_ref), r)));
    } else if (*report) {
      auto b = load_model(ctx, model_ref);
      std::vector<PortfolioSelection> picked;
      for (const auto& s : selections) picked.push_back(run_select(*b, parse_selection_arg(s)));
      const std::string text = render_report(picked);
      write_file(ctx.resolve(report_out), text, /*append=*/true);
      std::cout << text;
    } else if (*serve_cmd) {
      ModelStore store(store_dir.empty() ? ctx.models_dir() : ctx.resolve(store_dir));
      std::cerr << "listening on " << host << ":" << port << "\n";
      cpoint::service::serve(host, port, store);
    }
  } catch (const Error& e) {
    std::cerr << error_json(e);
    return 1;
  } catch (const std::exception& e) {
    std::cerr << error_json("Internal", e.what());
    return 1;
  }
  return 0;
}
