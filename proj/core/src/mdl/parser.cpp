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

// Recursive descent. Precedence, loosest first:
//   | \      union, difference
//   &        intersection
//   > >= < <= == ~=
//   + -
//   * /
//   unary - + ~
//   ^        right associative
//   primary, name[index]

#include <string>

#include "cpoint/mdl/syntax.hpp"

namespace cpoint::mdl {

namespace {

bool is_function(const std::string& w) {
  return w == "ln" || w == "exp" || w == "abs" || w == "sign" || w == "maxe" || w == "mine" ||
         w == "sum" || w == "max" || w == "min";
}

std::size_t function_arity(const std::string& w) { return (w == "max" || w == "min") ? 2 : 1; }

class Parser {
 public:
  explicit Parser(const std::vector<Token>& toks) : t_(toks) {}

  Program program() {
    Program p;
    while (cur().kind != TokenKind::kEnd) p.statements.push_back(statement());
    return p;
  }

 private:
  const Token& cur() const { return t_[i_]; }
  const Token& next(std::size_t k = 1) const {
    return t_[std::min(i_ + k, t_.size() - 1)];
  }
  bool is(TokenKind k) const { return cur().kind == k; }
  const Token& take() { return t_[i_ < t_.size() - 1 ? i_++ : i_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    const std::string near = cur().kind == TokenKind::kEnd ? "end of input" : "'" + cur().text + "'";
    throw Error(ErrorCode::kParseError, msg + " near " + near, cur().pos);
  }

  const Token& expect(TokenKind k, const char* what) {
    if (!is(k)) fail(std::string("expected ") + what);
    return take();
  }

  Statement statement() {
    Statement s;
    s.pos = cur().pos;
    if (is(TokenKind::kKeyword) && cur().text == "print") {
      take();
      s.kind = StmtKind::kPrint;
      s.name = expect(TokenKind::kName, "a name after print").text;
      expect(TokenKind::kSemicolon, "';'");
      return s;
    }
    if (is(TokenKind::kKeyword)) {
      const TokenKind k = next().kind;
      if (k == TokenKind::kAssign || k == TokenKind::kLBracket || k == TokenKind::kColon) {
        throw Error(ErrorCode::kLexError, "reserved word '" + cur().text + "' cannot be used as a name",
                    cur().pos);
      }
      fail("a statement must start with a name");
    }
    s.name = expect(TokenKind::kName, "a statement name").text;
    if (is(TokenKind::kColon)) {
      take();
      s.kind = StmtKind::kConstraint;
      constraint(s);
      expect(TokenKind::kSemicolon, "';' after the constraint");
      return s;
    }
    s.kind = StmtKind::kAssign;
    if (is(TokenKind::kLBracket)) {
      take();
      s.domain = expr();
      expect(TokenKind::kRBracket, "']'");
    }
    if (!is(TokenKind::kAssign)) fail("expected '=' or ':' after '" + s.name + "'");
    take();
    s.value = expr();
    expect(TokenKind::kSemicolon, "';' after the assignment");
    return s;
  }

  void constraint(Statement& s) {
    if (is(TokenKind::kKeyword) && (cur().text == "sum" || cur().text == "for")) {
      s.form = cur().text == "sum" ? ConstraintForm::kSum : ConstraintForm::kForEach;
      take();
      expect(TokenKind::kLBracket, "'[' after sum/for");
      s.set = expr();
      expect(TokenKind::kRBracket, "']'");
      if (!is(TokenKind::kDollar)) {
        s.coeff = unary();
        expect(TokenKind::kStar, "'*' between the coefficient and '$'");
      }
      expect(TokenKind::kDollar, "'$'");
    } else if (is(TokenKind::kDollar)) {
      take();
      s.form = ConstraintForm::kSingle;
      expect(TokenKind::kLBracket, "'[' after '$'");
      s.asset = expect(TokenKind::kName, "an asset name").text;
      expect(TokenKind::kRBracket, "']'");
    } else {
      fail("a constraint starts with sum[...], for[...] or $[...]");
    }
    switch (cur().kind) {
      case TokenKind::kEq:
      case TokenKind::kLe:
      case TokenKind::kGe:
        s.relop = take().text;
        break;
      default:
        fail("expected ==, <= or >= in the constraint");
    }
    s.value = expr();
  }

  static Expr binary(std::string op, Expr l, Expr r, SourcePos pos) {
    Expr e;
    e.kind = ExprKind::kBinary;
    e.op = std::move(op);
    e.pos = pos;
    e.args.push_back(std::move(l));
    e.args.push_back(std::move(r));
    return e;
  }

  Expr expr() { return union_expr(); }

  Expr union_expr() {
    Expr l = inter_expr();
    while (is(TokenKind::kPipe) || is(TokenKind::kBackslash)) {
      const Token& op = take();
      l = binary(op.text, std::move(l), inter_expr(), op.pos);
    }
    return l;
  }

  Expr inter_expr() {
    Expr l = compare_expr();
    while (is(TokenKind::kAmp)) {
      const Token& op = take();
      l = binary(op.text, std::move(l), compare_expr(), op.pos);
    }
    return l;
  }

  Expr compare_expr() {
    Expr l = additive();
    switch (cur().kind) {
      case TokenKind::kEq:
      case TokenKind::kNe:
      case TokenKind::kLe:
      case TokenKind::kGe:
      case TokenKind::kLt:
      case TokenKind::kGt: {
        const Token& op = take();
        return binary(op.text, std::move(l), additive(), op.pos);
      }
      default:
        return l;
    }
  }

  Expr additive() {
    Expr l = multiplicative();
    while (true) {
      if (is(TokenKind::kPlus) || is(TokenKind::kMinus)) {
        const Token& op = take();
        l = binary(op.text, std::move(l), multiplicative(), op.pos);
      } else if (is(TokenKind::kNumber) && cur().signed_literal) {
        // "a -1": the sign glued to the literal is the binary operator.
        const Token& num = take();
        Expr r;
        r.kind = ExprKind::kNumber;
        r.number = num.number < 0 ? -num.number : num.number;
        r.pos = num.pos;
        std::string op = num.text[0] == '-' ? "-" : "+";
        // The literal may still bind tighter operators on its right.
        Expr rhs = continue_multiplicative(power_tail(std::move(r)));
        l = binary(op, std::move(l), std::move(rhs), num.pos);
      } else {
        return l;
      }
    }
  }

  Expr multiplicative() { return continue_multiplicative(unary()); }

  Expr continue_multiplicative(Expr l) {
    while (is(TokenKind::kStar) || is(TokenKind::kSlash)) {
      // In "coeff * $" the star belongs to the constraint.
      if (is(TokenKind::kStar) && next().kind == TokenKind::kDollar) return l;
      const Token& op = take();
      l = binary(op.text, std::move(l), unary(), op.pos);
    }
    return l;
  }

  Expr unary() {
    if (is(TokenKind::kMinus) || is(TokenKind::kPlus) || is(TokenKind::kTilde)) {
      const Token& op = take();
      Expr e;
      e.kind = ExprKind::kUnary;
      e.op = op.text;
      e.pos = op.pos;
      e.args.push_back(unary());
      return e;
    }
    return power_tail(postfix());
  }

  Expr power_tail(Expr base) {
    if (!is(TokenKind::kCaret)) return base;
    const Token& op = take();
    return binary("^", std::move(base), unary(), op.pos);
  }

  Expr postfix() {
    Expr p = primary();
    if (p.kind == ExprKind::kName && is(TokenKind::kLBracket)) {
      take();
      Expr e;
      e.kind = ExprKind::kIndex;
      e.name = p.name;
      e.pos = p.pos;
      e.args.push_back(expr());
      expect(TokenKind::kRBracket, "']'");
      return e;
    }
    return p;
  }

  Expr primary() {
    Expr e;
    e.pos = cur().pos;
    switch (cur().kind) {
      case TokenKind::kNumber:
        e.kind = ExprKind::kNumber;
        e.number = take().number;
        return e;
      case TokenKind::kName:
        e.kind = ExprKind::kName;
        e.name = take().text;
        return e;
      case TokenKind::kLParen: {
        take();
        Expr inner = expr();
        expect(TokenKind::kRParen, "')'");
        return inner;
      }
      case TokenKind::kLBrace:
        return list();
      case TokenKind::kKeyword: {
        const std::string w = cur().text;
        if (!is_function(w)) fail("'" + w + "' cannot appear in an expression");
        take();
        e.kind = ExprKind::kCall;
        e.op = w;
        expect(TokenKind::kLParen, "'(' after the function name");
        e.args.push_back(expr());
        while (is(TokenKind::kComma)) {
          take();
          e.args.push_back(expr());
        }
        expect(TokenKind::kRParen, "')'");
        if (e.args.size() != function_arity(w)) {
          throw Error(ErrorCode::kParseError,
                      w + " takes " + std::to_string(function_arity(w)) + " argument(s)", e.pos);
        }
        return e;
      }
      default:
        fail("expected an expression");
    }
  }

  Expr list() {
    Expr e;
    e.kind = ExprKind::kList;
    e.pos = cur().pos;
    expect(TokenKind::kLBrace, "'{'");
    if (is(TokenKind::kRBrace)) {
      take();
      return e;
    }
    while (true) {
      ListItem item;
      if (is(TokenKind::kName)) {
        item.name = take().text;
      } else {
        double sign = 1.0;
        if (is(TokenKind::kMinus) || is(TokenKind::kPlus)) sign = take().text == "-" ? -1.0 : 1.0;
        item.value = sign * expect(TokenKind::kNumber, "a number or an asset name").number;
        expect(TokenKind::kAt, "'@' after the value");
        item.name = expect(TokenKind::kName, "an asset name after '@'").text;
      }
      e.items.push_back(std::move(item));
      if (is(TokenKind::kComma)) {
        take();
        continue;
      }
      expect(TokenKind::kRBrace, "',' or '}' in the list");
      return e;
    }
  }

  const std::vector<Token>& t_;
  std::size_t i_ = 0;
};

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
  return a.kind == b.kind && a.op == b.op && a.name == b.name && a.number == b.number &&
         a.args == b.args && a.items == b.items;
}

bool operator==(const Statement& a, const Statement& b) {
  return a.kind == b.kind && a.name == b.name && a.domain == b.domain && a.value == b.value &&
         a.form == b.form && a.set == b.set && a.coeff == b.coeff && a.asset == b.asset &&
         a.relop == b.relop;
}

Program parse_tokens(const std::vector<Token>& tokens) { return Parser(tokens).program(); }

Program parse(std::string_view source) { return parse_tokens(tokenize(source)); }

}  // namespace cpoint::mdl
