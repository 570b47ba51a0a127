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

// Tokens and syntax tree of the modelling language.

#ifndef CPOINT_MDL_SYNTAX_HPP_
#define CPOINT_MDL_SYNTAX_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpoint/error.hpp"

namespace cpoint::mdl {

enum class TokenKind {
  kName,
  kKeyword,
  kNumber,
  kAssign,     // =
  kEq,         // ==
  kNe,         // ~=
  kLe,         // <=
  kGe,         // >=
  kLt,         // <
  kGt,         // >
  kTilde,      // ~
  kAmp,        // &
  kPipe,       // |
  kBackslash,  // backslash, set difference
  kPlus,
  kMinus,
  kStar,
  kSlash,
  kCaret,
  kLParen,
  kRParen,
  kLBrace,
  kRBrace,
  kLBracket,
  kRBracket,
  kComma,
  kSemicolon,
  kColon,
  kAt,
  kDollar,
  kEnd,
};

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string text;
  double number = 0.0;
  bool signed_literal = false;  // number written with a leading + or -
  SourcePos pos;
};

inline constexpr std::size_t kMaxNameLength = 15;

bool is_reserved(std::string_view word);

// Throws LexError.
std::vector<Token> tokenize(std::string_view source);

enum class ExprKind { kNumber, kName, kList, kUnary, kBinary, kCall, kIndex };

struct ListItem {
  std::string name;
  std::optional<double> value;
  bool operator==(const ListItem&) const = default;
};

struct Expr {
  ExprKind kind = ExprKind::kNumber;
  std::string op;    // operator or function name
  std::string name;  // kName, kIndex
  double number = 0.0;
  std::vector<Expr> args;
  std::vector<ListItem> items;
  SourcePos pos;
};

// Structural equality; source positions are ignored.
bool operator==(const Expr& a, const Expr& b);

enum class StmtKind { kAssign, kConstraint, kPrint };
enum class ConstraintForm { kSum, kForEach, kSingle };

struct Statement {
  StmtKind kind = StmtKind::kAssign;
  std::string name;
  std::optional<Expr> domain;  // name[domain] = value
  Expr value;                  // assignment value or constraint right side
  ConstraintForm form = ConstraintForm::kSum;
  std::optional<Expr> set;     // sum[set] / for[set]
  std::optional<Expr> coeff;   // coeff * $
  std::string asset;           // $[asset]
  std::string relop;           // ==, <=, >=
  SourcePos pos;
};

bool operator==(const Statement& a, const Statement& b);

struct Program {
  std::vector<Statement> statements;
  bool operator==(const Program&) const = default;
};

// Throws LexError, ParseError.
Program parse(std::string_view source);
Program parse_tokens(const std::vector<Token>& tokens);

// Canonical text that parses back to an equal program.
std::string render(const Program& program);
std::string render(const Expr& expr);
std::string render(const Statement& stmt);
std::string render_number(double v);

}  // namespace cpoint::mdl

#endif  // CPOINT_MDL_SYNTAX_HPP_
