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

#include <random>

#include <gtest/gtest.h>

#include "cpoint/mdl/syntax.hpp"
#include "oracles.hpp"

namespace cpoint::mdl {
namespace {

std::vector<TokenKind> kinds(const std::vector<Token>& toks) {
  std::vector<TokenKind> k;
  for (const auto& t : toks) k.push_back(t.kind);
  return k;
}

TEST(Lexer, UniverseStatement) {
  using K = TokenKind;
  const auto toks = tokenize("all={A,B};");
  EXPECT_EQ(kinds(toks), (std::vector<K>{K::kName, K::kAssign, K::kLBrace, K::kName, K::kComma, K::kName,
                                         K::kRBrace, K::kSemicolon, K::kEnd}));
  EXPECT_EQ(toks[0].text, "all");
  EXPECT_EQ(toks[3].text, "A");
}

TEST(Lexer, NumberForms) {
  const auto toks = tokenize("1E6 -1E-6 37.65");
  ASSERT_EQ(toks.size(), 4u);
  EXPECT_EQ(toks[0].number, 1e6);
  EXPECT_EQ(toks[1].number, -1e-6);
  EXPECT_TRUE(toks[1].signed_literal);
  EXPECT_EQ(toks[2].number, 37.65);
}

TEST(Lexer, RejectsMissingLeadingZero) {
  try {
    tokenize("x = .15;");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLexError);
    ASSERT_TRUE(e.where());
    EXPECT_EQ(e.where()->line, 1);
    EXPECT_EQ(e.where()->column, 5);
  }
  EXPECT_EQ(oracle::thrown_code([] { tokenize("x = 3.;"); }), ErrorCode::kLexError);
  EXPECT_EQ(oracle::thrown_code([] { tokenize("x = 3EE-2;"); }), ErrorCode::kLexError);
  EXPECT_EQ(oracle::thrown_code([] { tokenize("x = 2 ? 3;"); }), ErrorCode::kLexError);
}

TEST(Lexer, NamesAndComments) {
  const auto toks = tokenize("# heading\nabcdefghijklmno # fifteen\nsum max");
  ASSERT_EQ(toks.size(), 4u);
  EXPECT_EQ(toks[0].kind, TokenKind::kName);
  EXPECT_EQ(toks[0].pos.line, 2);
  EXPECT_EQ(toks[1].kind, TokenKind::kKeyword);
  EXPECT_EQ(toks[2].kind, TokenKind::kKeyword);
  EXPECT_EQ(oracle::thrown_code([] { tokenize("abcdefghijklmnop"); }), ErrorCode::kLexError);
  EXPECT_EQ(oracle::thrown_code([] { parse("sum = 3;"); }), ErrorCode::kLexError);
  EXPECT_EQ(oracle::thrown_code([] { parse("ln[all] = 3;"); }), ErrorCode::kLexError);
}

TEST(Parser, ModelFixtureShape) {
  const Program p = parse(oracle::read_fixture("MODEL.CP"));
  ASSERT_EQ(p.statements.size(), 13u);
  int sets = 0, vectors = 0, constraints = 0;
  for (const auto& s : p.statements) {
    if (s.kind == StmtKind::kConstraint) {
      ++constraints;
    } else if (s.domain) {
      ++vectors;
    } else if (s.name != "all") {
      ++sets;
    }
  }
  EXPECT_EQ(sets, 6);
  EXPECT_EQ(vectors, 1);
  EXPECT_EQ(constraints, 5);
  const Statement& priv = p.statements[5];
  EXPECT_EQ(priv.name, "private");
  EXPECT_EQ(priv.value.kind, ExprKind::kUnary);
  EXPECT_EQ(priv.value.op, "~");
  EXPECT_EQ(priv.value.args[0].name, "state");
  const Statement& liq = p.statements.back();
  EXPECT_EQ(liq.form, ConstraintForm::kForEach);
  EXPECT_EQ(liq.relop, "<=");
  const Statement& food = p.statements[10];
  EXPECT_EQ(food.name, "foodsbound");
  EXPECT_EQ(food.relop, ">=");
}

TEST(Parser, ErrorsCarryPositions) {
  try {
    parse("all = {A};\nx == 1;");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    ASSERT_TRUE(e.where());
    EXPECT_EQ(e.where()->line, 2);
  }
  EXPECT_EQ(oracle::thrown_code([] { parse("c: sum[all] $ < 1;"); }), ErrorCode::kParseError);
  EXPECT_EQ(oracle::thrown_code([] { parse("x = max(a);"); }), ErrorCode::kParseError);
  EXPECT_EQ(oracle::thrown_code([] { parse("x = {1@};"); }), ErrorCode::kParseError);
  EXPECT_EQ(oracle::thrown_code([] { parse("x = (a"); }), ErrorCode::kParseError);
}

TEST(Parser, PrecedenceFollowsArithmetic) {
  auto value = [](const char* src) { return render(parse(src).statements[0].value); };
  EXPECT_EQ(value("x = a | b & ~c;"), "(a | (b & (~(c))))");
  EXPECT_EQ(value("x = a \\ b | c;"), "((a \\ b) | c)");
  EXPECT_EQ(value("x = 1 + 2 * 3 ^ 2;"), "(1 + (2 * (3 ^ 2)))");
  EXPECT_EQ(value("x = er -0.01;"), "(er - 0.01)");
  EXPECT_EQ(value("x = -2 * a;"), "(-2 * a)");
  EXPECT_EQ(value("x = a > 0.5 | b < 0.2;"), "((a > 0.5) | (b < 0.2))");
  EXPECT_EQ(value("x = v[{A}] - 1;"), "(v[{A}] - 1)");
}

// Random syntax trees: rendering then parsing gives the same tree back.
class TreeGen {
 public:
  explicit TreeGen(std::uint64_t seed) : rng_(seed) {}

  Program program() {
    Program p;
    const int n = 1 + pick(6);
    for (int i = 0; i < n; ++i) p.statements.push_back(statement());
    return p;
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  std::string name() {
    static const char* names[] = {"all", "er", "std", "a1", "bank", "x.y", "Z_2", "liquindex"};
    return names[pick(8)];
  }

  double number() {
    static const double values[] = {0, 1, 2.5, 1e6, 1e-6, 37.65, 0.1, 123456789.125};
    const double v = values[pick(8)];
    return pick(4) == 0 ? -v : v;
  }

  Expr expr(int depth) {
    Expr e;
    const int k = depth <= 0 ? pick(3) : pick(7);
    switch (k) {
      case 0:
        e.kind = ExprKind::kNumber;
        e.number = number();
        break;
      case 1:
        e.kind = ExprKind::kName;
        e.name = name();
        break;
      case 2: {
        e.kind = ExprKind::kList;
        const int n = pick(4);
        for (int i = 0; i < n; ++i) {
          ListItem it{name(), std::nullopt};
          if (pick(2)) it.value = number();
          e.items.push_back(it);
        }
        break;
      }
      case 3: {
        static const char* ops[] = {"-", "+", "~"};
        e.kind = ExprKind::kUnary;
        e.op = ops[pick(3)];
        e.args.push_back(expr(depth - 1));
        break;
      }
      case 4: {
        static const char* ops[] = {"+", "-", "*", "/", "^", "&", "|", "\\", "==", "~=", "<", ">", "<=", ">="};
        e.kind = ExprKind::kBinary;
        e.op = ops[pick(14)];
        e.args.push_back(expr(depth - 1));
        e.args.push_back(expr(depth - 1));
        break;
      }
      case 5: {
        static const char* fns[] = {"abs", "exp", "ln", "sign", "maxe", "mine", "sum", "max", "min"};
        e.kind = ExprKind::kCall;
        e.op = fns[pick(9)];
        const int arity = (e.op == "max" || e.op == "min") ? 2 : 1;
        for (int i = 0; i < arity; ++i) e.args.push_back(expr(depth - 1));
        break;
      }
      default:
        e.kind = ExprKind::kIndex;
        e.name = name();
        e.args.push_back(expr(depth - 1));
        break;
    }
    return e;
  }

  Statement statement() {
    Statement s;
    s.name = name();
    switch (pick(4)) {
      case 0:
        s.kind = StmtKind::kPrint;
        break;
      case 1:
        s.kind = StmtKind::kAssign;
        if (pick(2)) s.domain = expr(2);
        s.value = expr(4);
        break;
      default: {
        static const char* rel[] = {"==", "<=", ">="};
        s.kind = StmtKind::kConstraint;
        s.relop = rel[pick(3)];
        s.value = expr(3);
        const int f = pick(3);
        if (f == 2) {
          s.form = ConstraintForm::kSingle;
          s.asset = name();
        } else {
          s.form = f == 0 ? ConstraintForm::kSum : ConstraintForm::kForEach;
          s.set = expr(2);
          if (pick(2)) s.coeff = expr(2);
        }
        break;
      }
    }
    return s;
  }

  std::mt19937_64 rng_;
};

TEST(Render, RoundTripsRandomTrees) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const Program p = TreeGen(seed).program();
    const std::string text = render(p);
    Program back;
    ASSERT_NO_THROW(back = parse(text)) << text;
    EXPECT_EQ(back, p) << text;
    EXPECT_EQ(render(back), text);
  }
}

TEST(Render, RoundTripsModelFixture) {
  const Program p = parse(oracle::read_fixture("MODEL.CP"));
  EXPECT_EQ(parse(render(p)), p);
}

TEST(Render, ShortestExactNumbers) {
  EXPECT_EQ(render_number(0.1), "0.1");
  EXPECT_EQ(render_number(1e6), "1e+06");
  EXPECT_EQ(render_number(-37.65), "-37.65");
  EXPECT_EQ(std::stod(render_number(0.1 + 0.2)), 0.1 + 0.2);
}

}  // namespace
}  // namespace cpoint::mdl
