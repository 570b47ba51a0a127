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

#include <array>
#include <cctype>
#include <cstdlib>
#include <string>

#include "cpoint/mdl/syntax.hpp"

namespace cpoint::mdl {

namespace {

constexpr std::array<std::string_view, 11> kReserved = {
    "abs", "exp", "for", "ln", "max", "min", "maxe", "mine", "print", "sign", "sum"};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_name_char(char c) { return is_alpha(c) || is_digit(c) || c == '_' || c == '.'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.pos = {line_, col_};
      if (at_end()) {
        t.kind = TokenKind::kEnd;
        out.push_back(t);
        return out;
      }
      const char c = peek();
      if (is_digit(c) || ((c == '+' || c == '-') && is_digit(peek(1)))) {
        out.push_back(number());
      } else if (is_alpha(c)) {
        out.push_back(name());
      } else if (c == '.' && is_digit(peek(1))) {
        fail("a number needs a digit before the decimal point");
      } else {
        out.push_back(punct());
      }
    }
  }

 private:
  bool at_end() const { return i_ >= src_.size(); }
  char peek(std::size_t k = 0) const { return i_ + k < src_.size() ? src_[i_ + k] : '\0'; }

  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::kLexError, msg, {line_, col_});
  }

  void skip_space() {
    while (!at_end()) {
      const char c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Token number() {
    Token t;
    t.kind = TokenKind::kNumber;
    t.pos = {line_, col_};
    const std::size_t start = i_;
    if (peek() == '+' || peek() == '-') {
      t.signed_literal = true;
      advance();
    }
    while (is_digit(peek())) advance();
    if (peek() == '.') {
      advance();
      if (!is_digit(peek())) fail("a number needs a digit after the decimal point");
      while (is_digit(peek())) advance();
    }
    if (peek() == 'e' || peek() == 'E') {
      advance();
      if (peek() == '+' || peek() == '-') advance();
      if (!is_digit(peek())) fail("malformed exponent");
      while (is_digit(peek())) advance();
    }
    if (is_alpha(peek()) || peek() == '_' || peek() == '.') fail("malformed number");
    t.text = std::string(src_.substr(start, i_ - start));
    t.number = std::strtod(t.text.c_str(), nullptr);
    return t;
  }

  Token name() {
    Token t;
    t.pos = {line_, col_};
    const std::size_t start = i_;
    while (is_name_char(peek())) advance();
    t.text = std::string(src_.substr(start, i_ - start));
    if (t.text.size() > kMaxNameLength) {
      throw Error(ErrorCode::kLexError,
                  "name '" + t.text + "' is longer than " + std::to_string(kMaxNameLength) + " characters",
                  t.pos);
    }
    t.kind = is_reserved(t.text) ? TokenKind::kKeyword : TokenKind::kName;
    return t;
  }

  Token punct() {
    Token t;
    t.pos = {line_, col_};
    const char c = peek();
    const char n = peek(1);
    auto two = [&](TokenKind k) {
      t.kind = k;
      t.text = std::string{c, n};
      advance();
      advance();
      return t;
    };
    auto one = [&](TokenKind k) {
      t.kind = k;
      t.text = std::string{c};
      advance();
      return t;
    };
    switch (c) {
      case '=': return n == '=' ? two(TokenKind::kEq) : one(TokenKind::kAssign);
      case '~': return n == '=' ? two(TokenKind::kNe) : one(TokenKind::kTilde);
      case '<': return n == '=' ? two(TokenKind::kLe) : one(TokenKind::kLt);
      case '>': return n == '=' ? two(TokenKind::kGe) : one(TokenKind::kGt);
      case '&': return one(TokenKind::kAmp);
      case '|': return one(TokenKind::kPipe);
      case '\\': return one(TokenKind::kBackslash);
      case '+': return one(TokenKind::kPlus);
      case '-': return one(TokenKind::kMinus);
      case '*': return one(TokenKind::kStar);
      case '/': return one(TokenKind::kSlash);
      case '^': return one(TokenKind::kCaret);
      case '(': return one(TokenKind::kLParen);
      case ')': return one(TokenKind::kRParen);
      case '{': return one(TokenKind::kLBrace);
      case '}': return one(TokenKind::kRBrace);
      case '[': return one(TokenKind::kLBracket);
      case ']': return one(TokenKind::kRBracket);
      case ',': return one(TokenKind::kComma);
      case ';': return one(TokenKind::kSemicolon);
      case ':': return one(TokenKind::kColon);
      case '@': return one(TokenKind::kAt);
      case '$': return one(TokenKind::kDollar);
      default: break;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

bool is_reserved(std::string_view word) {
  for (auto r : kReserved)
    if (r == word) return true;
  return false;
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace cpoint::mdl
