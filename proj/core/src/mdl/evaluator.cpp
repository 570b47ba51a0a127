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
#include <cstdio>
#include <set>
#include <string>

#include "cpoint/mdl/compiler.hpp"

namespace cpoint::mdl {

namespace {

using Kind = Value::Kind;

double at(const Value& v, std::size_t i) { return v.kind == Kind::kScalar ? v.scalar : v.v[i]; }

bool in_domain(const std::vector<char>* domain, std::size_t i) { return !domain || (*domain)[i]; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5e", v);
  return buf;
}

}  // namespace

Environment::Environment(std::vector<std::string> base_universe) : base_(std::move(base_universe)) {}

std::optional<std::size_t> Environment::asset_index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const Value* Environment::lookup(const std::string& name) const {
  auto it = vars_.find(name);
  return it == vars_.end() ? nullptr : &it->second;
}

void Environment::bind(const std::string& name, Value v) {
  vars_[name] = std::move(v);
  predefined_.insert(name);
}

bool Environment::in_base(const std::string& name) const {
  return std::find(base_.begin(), base_.end(), name) != base_.end();
}

void Environment::fail(ErrorCode code, const std::string& msg, SourcePos pos) const {
  throw Error(code, msg, pos);
}

void Environment::run(const Program& program) {
  for (const auto& s : program.statements) run(s);
}

void Environment::run(const Statement& s) {
  if (first_) {
    first_ = false;
    if (s.kind != StmtKind::kAssign || s.name != "all" || s.domain) {
      fail(ErrorCode::kUniverseViolation, "the first statement must define the universe 'all'", s.pos);
    }
    define_universe(s);
    return;
  }
  switch (s.kind) {
    case StmtKind::kAssign:
      assign(s);
      break;
    case StmtKind::kConstraint:
      constraint(s);
      break;
    case StmtKind::kPrint: {
      const Value* v = lookup(s.name);
      if (!v) fail(ErrorCode::kUnknownName, "unknown name '" + s.name + "'", s.pos);
      log_.push_back(s.name + " = " + format_value(*v, universe_));
      break;
    }
  }
}

void Environment::define_universe(const Statement& s) {
  if (s.value.kind != ExprKind::kList) {
    fail(ErrorCode::kTypeError, "the universe must be a list of asset names", s.pos);
  }
  for (const auto& item : s.value.items) {
    if (item.value) fail(ErrorCode::kTypeError, "the universe lists names without values", s.value.pos);
    if (index_.count(item.name)) {
      fail(ErrorCode::kDuplicateName, "asset '" + item.name + "' appears twice in the universe", s.value.pos);
    }
    if (!base_.empty() && !in_base(item.name)) {
      fail(ErrorCode::kUniverseViolation, "asset '" + item.name + "' has no moments", s.value.pos);
    }
    index_[item.name] = universe_.size();
    universe_.push_back(item.name);
  }
  has_universe_ = true;
  vars_["all"] = Value{Kind::kSet, 0.0, Vector(universe_.size(), 1.0)};
  if (on_universe) on_universe(*this);
}

std::vector<char> Environment::mask_of(const Expr& e) const {
  if (e.kind == ExprKind::kName && !lookup(e.name)) {
    if (auto i = asset_index(e.name)) {
      std::vector<char> m(universe_.size(), 0);
      m[*i] = 1;
      return m;
    }
  }
  const Value v = eval(e, nullptr);
  if (v.kind != Kind::kSet) fail(ErrorCode::kTypeError, "expected a set in '" + render(e) + "'", e.pos);
  std::vector<char> m(v.v.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = v.v[i] != 0.0;
  return m;
}

void Environment::assign(const Statement& s) {
  if (s.name == "all") fail(ErrorCode::kDuplicateName, "the universe 'all' is defined only once", s.pos);
  if (constraint_names_.count(s.name)) {
    fail(ErrorCode::kDuplicateName, "'" + s.name + "' already names a constraint", s.pos);
  }
  if (!s.domain) {
    if (lookup(s.name) && !predefined_.count(s.name)) {
      fail(ErrorCode::kDuplicateName, "'" + s.name + "' is already defined", s.pos);
    }
    Value v = eval(s.value, nullptr);
    predefined_.erase(s.name);
    vars_[s.name] = std::move(v);
  } else {
    const std::vector<char> mask = mask_of(*s.domain);
    const Value rhs = eval(s.value, &mask);
    Value target;
    if (const Value* old = lookup(s.name)) {
      target = *old;
      if (target.kind == Kind::kScalar) {
        fail(ErrorCode::kTypeError, "'" + s.name + "' is a scalar and cannot be indexed", s.pos);
      }
    } else {
      target = Value{rhs.kind == Kind::kSet ? Kind::kSet : Kind::kVector, 0.0, Vector(universe_.size(), 0.0)};
    }
    bool binary = true;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i]) target.v[i] = at(rhs, i);
      binary = binary && (target.v[i] == 0.0 || target.v[i] == 1.0);
    }
    if (target.kind == Kind::kSet && !binary) target.kind = Kind::kVector;
    vars_[s.name] = std::move(target);
  }
  if (s.name == "short") {
    const Value& v = vars_["short"];
    if (v.kind != Kind::kSet) fail(ErrorCode::kTypeError, "'short' must be a set", s.pos);
    short_.clear();
    for (std::size_t i = 0; i < universe_.size(); ++i)
      if (v.v[i] != 0.0) short_.push_back(universe_[i]);
  }
}

void Environment::constraint(const Statement& s) {
  if (lookup(s.name) || !constraint_names_.insert(s.name).second) {
    fail(ErrorCode::kDuplicateName, "'" + s.name + "' is already defined", s.pos);
  }
  RowKind kind = RowKind::kLessEq;
  if (s.relop == "==") kind = RowKind::kEquality;
  if (s.relop == ">=") kind = RowKind::kGreaterEq;
  const std::size_t n = universe_.size();

  if (s.form == ConstraintForm::kSingle) {
    auto i = asset_index(s.asset);
    if (!i && in_base(s.asset)) return;  // asset removed from the universe
    if (!i) fail(ErrorCode::kUniverseViolation, "asset '" + s.asset + "' is not in the universe", s.pos);
    std::vector<char> mask(n, 0);
    mask[*i] = 1;
    const Value rhs = eval(s.value, &mask);
    ConstraintRow row{s.name, kind, Vector(n, 0.0), at(rhs, *i), s.pos};
    row.coeffs[*i] = 1.0;
    rows_.push_back(std::move(row));
    return;
  }

  const std::vector<char> mask = mask_of(*s.set);
  const Value coeff = s.coeff ? eval(*s.coeff, &mask) : Value::of_scalar(1.0);
  const Value rhs = eval(s.value, &mask);
  if (s.form == ConstraintForm::kSum) {
    if (rhs.kind != Kind::kScalar) {
      fail(ErrorCode::kTypeError, "the right side of a sum constraint must be a scalar", s.value.pos);
    }
    ConstraintRow row{s.name, kind, Vector(n, 0.0), rhs.scalar, s.pos};
    for (std::size_t i = 0; i < n; ++i)
      if (mask[i]) row.coeffs[i] = at(coeff, i);
    rows_.push_back(std::move(row));
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    ConstraintRow row{s.name + "[" + universe_[i] + "]", kind, Vector(n, 0.0), at(rhs, i), s.pos};
    row.coeffs[i] = at(coeff, i);
    rows_.push_back(std::move(row));
  }
}

Value Environment::eval(const Expr& e) const { return eval(e, nullptr); }

Value Environment::eval_list(const Expr& e) const {
  const std::size_t n = universe_.size();
  std::size_t with_values = 0;
  for (const auto& item : e.items) with_values += item.value.has_value();
  if (with_values != 0 && with_values != e.items.size()) {
    fail(ErrorCode::kTypeError, "a list mixes names with valued entries", e.pos);
  }
  Value out{with_values ? Kind::kVector : Kind::kSet, 0.0, Vector(n, 0.0)};
  std::set<std::string> seen;
  for (const auto& item : e.items) {
    if (!seen.insert(item.name).second) {
      fail(ErrorCode::kDuplicateName, "asset '" + item.name + "' appears twice in the list", e.pos);
    }
    auto i = asset_index(item.name);
    if (!i) {
      // Assets removed by restricting the universe are dropped silently.
      if (in_base(item.name)) continue;
      fail(ErrorCode::kUniverseViolation, "asset '" + item.name + "' is not in the universe", e.pos);
    }
    out.v[*i] = item.value ? *item.value : 1.0;
  }
  return out;
}

Value Environment::eval(const Expr& e, const std::vector<char>* domain) const {
  const std::size_t n = universe_.size();
  // Elementwise combination with scalar broadcast; the result is a scalar only
  // when every operand is.
  auto map1 = [&](const Value& a, auto f) {
    if (a.kind == Kind::kScalar) return Value::of_scalar(f(a.scalar, true));
    Value out{Kind::kVector, 0.0, Vector(n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) out.v[i] = f(a.v[i], in_domain(domain, i));
    return out;
  };
  auto map2 = [&](const Value& a, const Value& b, Kind kind, auto f) {
    if (a.kind == Kind::kScalar && b.kind == Kind::kScalar) return Value::of_scalar(f(a.scalar, b.scalar, true));
    Value out{kind, 0.0, Vector(n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) out.v[i] = f(at(a, i), at(b, i), in_domain(domain, i));
    return out;
  };
  auto require_set = [&](const Value& v, const Expr& at_expr) {
    if (v.kind != Kind::kSet) fail(ErrorCode::kTypeError, "expected a set in '" + render(at_expr) + "'", at_expr.pos);
  };

  switch (e.kind) {
    case ExprKind::kNumber:
      return Value::of_scalar(e.number);
    case ExprKind::kName: {
      const Value* v = lookup(e.name);
      if (!v) fail(ErrorCode::kUnknownName, "unknown name '" + e.name + "'", e.pos);
      return *v;
    }
    case ExprKind::kList:
      if (domain) {
        for (const auto& item : e.items) {
          auto i = asset_index(item.name);
          if (i && !(*domain)[*i]) {
            fail(ErrorCode::kUniverseViolation,
                 "asset '" + item.name + "' is outside the domain of the assignment", e.pos);
          }
        }
      }
      return eval_list(e);
    case ExprKind::kUnary: {
      const Value a = eval(e.args[0], domain);
      if (e.op == "~") {
        require_set(a, e.args[0]);
        Value out = a;
        for (auto& x : out.v) x = x != 0.0 ? 0.0 : 1.0;
        return out;
      }
      if (e.op == "-") return map1(a, [](double x, bool) { return -x; });
      return a.kind == Kind::kSet ? map1(a, [](double x, bool) { return x; }) : a;
    }
    case ExprKind::kBinary: {
      const Value a = eval(e.args[0], domain);
      const Value b = eval(e.args[1], domain);
      const std::string& op = e.op;
      if (op == "&" || op == "|" || op == "\\") {
        require_set(a, e.args[0]);
        require_set(b, e.args[1]);
        return map2(a, b, Kind::kSet, [&](double x, double y, bool) {
          const bool p = x != 0.0, q = y != 0.0;
          const bool r = op == "&" ? (p && q) : op == "|" ? (p || q) : (p && !q);
          return r ? 1.0 : 0.0;
        });
      }
      if (op == "==" || op == "~=" || op == "<" || op == "<=" || op == ">" || op == ">=") {
        return map2(a, b, Kind::kSet, [&](double x, double y, bool) {
          bool r = false;
          if (op == "==") r = x == y;
          if (op == "~=") r = x != y;
          if (op == "<") r = x < y;
          if (op == "<=") r = x <= y;
          if (op == ">") r = x > y;
          if (op == ">=") r = x >= y;
          return r ? 1.0 : 0.0;
        });
      }
      return map2(a, b, Kind::kVector, [&](double x, double y, bool inside) {
        if (op == "+") return x + y;
        if (op == "-") return x - y;
        if (op == "*") return x * y;
        if (op == "/") {
          if (y == 0.0) {
            if (inside) fail(ErrorCode::kDivisionByZero, "division by zero in '" + render(e) + "'", e.pos);
            return 0.0;
          }
          return x / y;
        }
        // ^
        if (x < 0.0 && y != std::floor(y)) {
          if (inside) {
            fail(ErrorCode::kInvalidArgument, "negative base with a fractional exponent in '" + render(e) + "'",
                 e.pos);
          }
          return 0.0;
        }
        return std::pow(x, y);
      });
    }
    case ExprKind::kCall: {
      const std::string& f = e.op;
      if (f == "max" || f == "min") {
        const Value a = eval(e.args[0], domain);
        const Value b = eval(e.args[1], domain);
        return map2(a, b, Kind::kVector,
                    [&](double x, double y, bool) { return f == "max" ? std::max(x, y) : std::min(x, y); });
      }
      const Value a = eval(e.args[0], domain);
      if (f == "sum" || f == "maxe" || f == "mine") {
        if (a.kind == Kind::kScalar) return a;
        if (f == "sum") {
          double s = 0.0;
          for (double x : a.v) s += x;
          return Value::of_scalar(s);
        }
        if (a.v.empty()) return Value::of_scalar(0.0);
        return Value::of_scalar(f == "maxe" ? *std::max_element(a.v.begin(), a.v.end())
                                            : *std::min_element(a.v.begin(), a.v.end()));
      }
      return map1(a, [&](double x, bool inside) {
        if (f == "ln") {
          if (x <= 0.0) {
            if (inside) fail(ErrorCode::kInvalidArgument, "ln of a non-positive value in '" + render(e) + "'", e.pos);
            return 0.0;
          }
          return std::log(x);
        }
        if (f == "exp") return std::exp(x);
        if (f == "abs") return std::fabs(x);
        return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);  // sign
      });
    }
    case ExprKind::kIndex: {
      const Value* base = lookup(e.name);
      if (!base) fail(ErrorCode::kUnknownName, "unknown name '" + e.name + "'", e.pos);
      if (base->kind == Kind::kScalar) {
        fail(ErrorCode::kTypeError, "'" + e.name + "' is a scalar and cannot be indexed", e.pos);
      }
      const Expr& arg = e.args[0];
      if (arg.kind == ExprKind::kName && !lookup(arg.name)) {
        auto i = asset_index(arg.name);
        if (!i) fail(ErrorCode::kUnknownName, "unknown name '" + arg.name + "'", arg.pos);
        return Value::of_scalar(base->v[*i]);
      }
      const std::vector<char> mask = mask_of(arg);
      Value out = *base;
      for (std::size_t i = 0; i < n; ++i)
        if (!mask[i]) out.v[i] = 0.0;
      return out;
    }
  }
  return {};
}

std::string format_value(const Value& v, const std::vector<std::string>& universe) {
  if (v.kind == Kind::kScalar) return fmt(v.scalar);
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < universe.size() && i < v.v.size(); ++i) {
    if (v.kind == Kind::kSet && v.v[i] == 0.0) continue;
    if (!first) out += ", ";
    first = false;
    out += v.kind == Kind::kSet ? universe[i] : fmt(v.v[i]) + "@" + universe[i];
  }
  return out + "}";
}

}  // namespace cpoint::mdl
