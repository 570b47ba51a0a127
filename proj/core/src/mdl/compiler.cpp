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

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "cpoint/mdl/compiler.hpp"

namespace cpoint::mdl {

namespace {

Vector as_vector(const Value* v, std::size_t n) {
  if (!v) return Vector(n, 0.0);
  if (v->kind == Value::Kind::kScalar) return Vector(n, v->scalar);
  return v->v;
}

Matrix stack(const std::vector<Vector>& rows, std::size_t n) {
  Matrix m(rows.size(), n);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  return m;
}

}  // namespace

CompiledModel compile(std::string_view model_source, const MomentSet& moments) {
  return compile(parse(model_source), moments);
}

CompiledModel compile(const Program& program, const MomentSet& moments) {
  moments.check_shape();
  Environment env(moments.names);
  env.on_universe = [&moments](Environment& e) {
    const auto& u = e.universe();
    Value er{Value::Kind::kVector, 0.0, Vector(u.size())};
    Value sd{Value::Kind::kVector, 0.0, Vector(u.size())};
    for (std::size_t i = 0; i < u.size(); ++i) {
      const std::size_t k = *moments.index_of(u[i]);
      er.v[i] = moments.er[k];
      sd.v[i] = moments.std[k];
    }
    e.bind("er", std::move(er));
    e.bind("std", std::move(sd));
  };
  env.run(program);
  if (!env.has_universe()) throw Error(ErrorCode::kUniverseViolation, "the model does not define the universe 'all'");

  const auto& u = env.universe();
  const std::size_t n = u.size();
  const std::set<std::string> shorts(env.short_assets().begin(), env.short_assets().end());

  // The normal constraint: an unweighted sum over the whole universe held at
  // equality.
  bool has_normal = false;
  for (const auto& r : env.rows()) {
    if (r.kind != RowKind::kEquality) continue;
    has_normal = has_normal || (n > 0 && std::all_of(r.coeffs.begin(), r.coeffs.end(), [](double c) { return c == 1.0; }));
  }
  if (!has_normal) {
    throw Error(ErrorCode::kMissingNormalConstraint, "the model needs a constraint of the form 'sum[all] $ == total'");
  }

  MomentSet restricted;
  restricted.names = u;
  restricted.er = as_vector(env.lookup("er"), n);
  restricted.std = as_vector(env.lookup("std"), n);
  restricted.correl = Matrix(n, n);
  std::vector<double> sign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    if (shorts.count(u[i])) sign[i] = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = *moments.index_of(u[i]);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t b = *moments.index_of(u[j]);
      restricted.correl(i, j) = sign[i] * sign[j] * moments.correl(a, b);
    }
  }

  CompiledModel out;
  out.model.names = u;
  out.model.q = covariance_from_corr(restricted);
  out.model.p.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.model.p[i] = sign[i] * restricted.er[i];

  std::vector<Vector> eq, ineq;
  for (const auto& r : env.rows()) {
    if (r.kind == RowKind::kEquality) {
      eq.push_back(r.coeffs);
      out.model.eq_rhs.push_back(r.rhs);
    } else if (r.kind == RowKind::kLessEq) {
      ineq.push_back(r.coeffs);
      out.model.ineq_rhs.push_back(r.rhs);
    } else {
      Vector c = r.coeffs;
      for (auto& x : c) x = -x;
      ineq.push_back(std::move(c));
      out.model.ineq_rhs.push_back(-r.rhs);
    }
  }
  out.model.eq = stack(eq, n);
  out.model.ineq = stack(ineq, n);
  out.model.validate();

  out.rows = env.rows();
  out.log = env.log();
  out.short_assets = env.short_assets();
  return out;
}

MomentSet load_moments(std::string_view moments_source, std::string_view correl_source) {
  Environment env;
  env.on_universe = [](Environment& e) {
    const std::size_t n = e.universe().size();
    e.bind("er", Value{Value::Kind::kVector, 0.0, Vector(n, 0.0)});
    e.bind("std", Value{Value::Kind::kVector, 0.0, Vector(n, 0.0)});
  };
  env.run(parse(moments_source));
  if (!env.has_universe()) throw Error(ErrorCode::kUniverseViolation, "the moments file does not define 'all'");

  MomentSet ms;
  ms.names = env.universe();
  const std::size_t n = ms.names.size();
  ms.er = as_vector(env.lookup("er"), n);
  ms.std = as_vector(env.lookup("std"), n);

  const NamedMatrix c = parse_correlation(correl_source);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = std::find(c.names.begin(), c.names.end(), ms.names[i]);
    if (it == c.names.end()) {
      throw Error(ErrorCode::kUniverseViolation, "asset '" + ms.names[i] + "' is missing from the correlation file");
    }
    idx[i] = static_cast<std::size_t>(it - c.names.begin());
  }
  ms.correl = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) ms.correl(i, j) = c.values(idx[i], idx[j]);
  ms.check_shape();
  return ms;
}

namespace {

// Statements of the form NAME = { item, ... }; where an item is NAME@NAME or
// number@NAME.
struct DerivList {
  std::string name;
  std::vector<std::pair<std::string, std::string>> refs;  // option, underlying
  std::vector<std::pair<std::string, double>> values;     // option, value
  SourcePos pos;
};

std::vector<DerivList> read_deriv_lists(std::string_view source) {
  const std::vector<Token> t = tokenize(source);
  std::size_t i = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw Error(ErrorCode::kParseError, msg + " near '" + t[i].text + "'", t[i].pos);
  };
  auto expect = [&](TokenKind k, const char* what) {
    if (t[i].kind != k) fail(std::string("expected ") + what);
    return t[i++];
  };
  std::vector<DerivList> out;
  while (t[i].kind != TokenKind::kEnd) {
    DerivList l;
    l.pos = t[i].pos;
    l.name = expect(TokenKind::kName, "a list name").text;
    expect(TokenKind::kAssign, "'='");
    expect(TokenKind::kLBrace, "'{'");
    while (t[i].kind != TokenKind::kRBrace) {
      if (t[i].kind == TokenKind::kName) {
        std::string opt = t[i++].text;
        expect(TokenKind::kAt, "'@'");
        l.refs.emplace_back(std::move(opt), expect(TokenKind::kName, "an underlying name").text);
      } else {
        double sign = 1.0;
        if (t[i].kind == TokenKind::kMinus || t[i].kind == TokenKind::kPlus) sign = t[i++].text == "-" ? -1.0 : 1.0;
        const double v = sign * expect(TokenKind::kNumber, "a number or a name").number;
        expect(TokenKind::kAt, "'@'");
        l.values.emplace_back(expect(TokenKind::kName, "an option name").text, v);
      }
      if (t[i].kind == TokenKind::kComma) {
        ++i;
      } else if (t[i].kind != TokenKind::kRBrace) {
        fail("expected ',' or '}'");
      }
    }
    ++i;
    expect(TokenKind::kSemicolon, "';'");
    out.push_back(std::move(l));
  }
  return out;
}

}  // namespace

std::vector<OptionSpec> parse_deriv(std::string_view source) {
  std::vector<OptionSpec> specs;
  std::map<std::string, std::map<std::string, double>> fields;
  std::set<std::string> seen;
  for (const auto& l : read_deriv_lists(source)) {
    if (l.name == "put" || l.name == "call") {
      if (!l.values.empty()) throw Error(ErrorCode::kParseError, "'" + l.name + "' lists OPTION@UNDERLYING", l.pos);
      for (const auto& [opt, under] : l.refs) {
        if (!seen.insert(opt).second) throw Error(ErrorCode::kDuplicateName, "option '" + opt + "' declared twice", l.pos);
        OptionSpec s;
        s.name = opt;
        s.underlying = under;
        s.kind = l.name == "put" ? LegKind::kPut : LegKind::kCall;
        specs.push_back(std::move(s));
      }
    } else if (l.name == "exdays" || l.name == "O" || l.name == "S" || l.name == "K") {
      if (!l.refs.empty()) throw Error(ErrorCode::kParseError, "'" + l.name + "' lists value@OPTION", l.pos);
      for (const auto& [opt, v] : l.values) fields[l.name][opt] = v;
    } else {
      throw Error(ErrorCode::kUnknownName, "unknown derivative field '" + l.name + "'", l.pos);
    }
  }
  for (const auto& [field, by_opt] : fields)
    for (const auto& [opt, v] : by_opt)
      if (!seen.count(opt)) throw Error(ErrorCode::kUnknownName, "'" + field + "' refers to undeclared option '" + opt + "'");
  for (auto& s : specs) {
    auto get = [&](const char* field) {
      auto f = fields[field].find(s.name);
      if (f == fields[field].end()) {
        throw Error(ErrorCode::kFormatError, "option '" + s.name + "' has no " + field + " value");
      }
      return f->second;
    };
    const double days = get("exdays");
    if (days <= 0.0 || days != std::floor(days)) {
      throw Error(ErrorCode::kInvalidArgument, "option '" + s.name + "' needs a positive whole number of exdays");
    }
    s.exdays = static_cast<int>(days);
    s.premium = get("O");
    s.spot = get("S");
    s.strike = get("K");
    if (s.premium <= 0.0 || s.spot <= 0.0 || s.strike <= 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "option '" + s.name + "' needs positive O, S and K");
    }
  }
  return specs;
}

}  // namespace cpoint::mdl
