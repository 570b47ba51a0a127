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

// Canonical rendering. Every binary node is parenthesized and every unary
// node and its operand are wrapped, so the text re-parses to the same tree.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "cpoint/mdl/syntax.hpp"

namespace cpoint::mdl {

std::string render_number(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string render(const Expr& e) {
  switch (e.kind) {
    case ExprKind::kNumber:
      return render_number(e.number);
    case ExprKind::kName:
      return e.name;
    case ExprKind::kList: {
      std::string s = "{";
      for (std::size_t i = 0; i < e.items.size(); ++i) {
        if (i) s += ", ";
        if (e.items[i].value) s += render_number(*e.items[i].value) + "@";
        s += e.items[i].name;
      }
      return s + "}";
    }
    case ExprKind::kUnary:
      return "(" + e.op + "(" + render(e.args[0]) + "))";
    case ExprKind::kBinary:
      return "(" + render(e.args[0]) + " " + e.op + " " + render(e.args[1]) + ")";
    case ExprKind::kCall: {
      std::string s = e.op + "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) s += (i ? ", " : "") + render(e.args[i]);
      return s + ")";
    }
    case ExprKind::kIndex:
      return e.name + "[" + render(e.args[0]) + "]";
  }
  return {};
}

std::string render(const Statement& s) {
  switch (s.kind) {
    case StmtKind::kPrint:
      return "print " + s.name + ";";
    case StmtKind::kAssign: {
      std::string out = s.name;
      if (s.domain) out += "[" + render(*s.domain) + "]";
      return out + " = " + render(s.value) + ";";
    }
    case StmtKind::kConstraint: {
      std::string out = s.name + ": ";
      if (s.form == ConstraintForm::kSingle) {
        out += "$[" + s.asset + "]";
      } else {
        out += (s.form == ConstraintForm::kSum ? "sum[" : "for[") + render(*s.set) + "] ";
        if (s.coeff) out += "(" + render(*s.coeff) + ") * ";
        out += "$";
      }
      return out + " " + s.relop + " " + render(s.value) + ";";
    }
  }
  return {};
}

std::string render(const Program& p) {
  std::string out;
  for (const auto& s : p.statements) out += render(s) + "\n";
  return out;
}

}  // namespace cpoint::mdl
