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

// Evaluation of modelling-language programs and compilation of a model into
// the matrices of the parametric problem.

#ifndef CPOINT_MDL_COMPILER_HPP_
#define CPOINT_MDL_COMPILER_HPP_

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cpoint/matrix.hpp"
#include "cpoint/mdl/syntax.hpp"
#include "cpoint/moment_set.hpp"
#include "cpoint/moments.hpp"
#include "cpoint/parametric_qp.hpp"

namespace cpoint::mdl {

// Scalars, associative vectors over the universe (default 0) and sets
// (vectors of 0/1).
struct Value {
  enum class Kind { kScalar, kVector, kSet };
  Kind kind = Kind::kScalar;
  double scalar = 0.0;
  Vector v;

  static Value of_scalar(double s) { return {Kind::kScalar, s, {}}; }
};

enum class RowKind { kEquality, kLessEq, kGreaterEq };

struct ConstraintRow {
  std::string name;
  RowKind kind = RowKind::kLessEq;
  Vector coeffs;  // over the universe
  double rhs = 0.0;
  SourcePos pos;
};

class Environment {
 public:
  // base_universe restricts the names that may appear in the program's
  // universe; empty means unrestricted.
  explicit Environment(std::vector<std::string> base_universe = {});

  const std::vector<std::string>& universe() const { return universe_; }
  bool has_universe() const { return has_universe_; }
  std::optional<std::size_t> asset_index(const std::string& name) const;
  const Value* lookup(const std::string& name) const;
  // Predefined names may be replaced once by a plain assignment.
  void bind(const std::string& name, Value v);
  const std::vector<ConstraintRow>& rows() const { return rows_; }
  const std::vector<std::string>& log() const { return log_; }
  const std::vector<std::string>& short_assets() const { return short_; }

  void run(const Program& program);
  void run(const Statement& stmt);
  Value eval(const Expr& e) const;

  // Called once the universe is known, to bind vectors that depend on it.
  std::function<void(Environment&)> on_universe;

 private:
  Value eval(const Expr& e, const std::vector<char>* domain) const;
  Value eval_list(const Expr& e) const;
  std::vector<char> mask_of(const Expr& e) const;
  bool in_base(const std::string& name) const;
  void define_universe(const Statement& s);
  void assign(const Statement& s);
  void constraint(const Statement& s);
  [[noreturn]] void fail(ErrorCode code, const std::string& msg, SourcePos pos) const;

  std::vector<std::string> base_;
  std::vector<std::string> universe_;
  std::map<std::string, std::size_t> index_;
  bool has_universe_ = false;
  std::map<std::string, Value> vars_;
  std::vector<ConstraintRow> rows_;
  std::vector<std::string> log_;
  std::vector<std::string> short_;
  std::set<std::string> predefined_;
  std::set<std::string> constraint_names_;
  bool first_ = true;
};

std::string format_value(const Value& v, const std::vector<std::string>& universe);

struct CompiledModel {
  QpModel model;
  std::vector<ConstraintRow> rows;  // as written, before sign normalization
  std::vector<std::string> log;
  std::vector<std::string> short_assets;
};

// Evaluates the model against the moments, applies the short-position sign
// flips and emits [Te; te] and [Tl; tl] with >= rows negated. Throws
// LexError, ParseError, UnknownName, DuplicateName, TypeError,
// UniverseViolation, DivisionByZero, MissingNormalConstraint,
// InvalidCorrelation, NotPositiveDefinite.
CompiledModel compile(std::string_view model_source, const MomentSet& moments);
CompiledModel compile(const Program& model, const MomentSet& moments);

// Reads er/std from a moments program and the correlation from its own
// file, reordered to the universe of the moments program.
MomentSet load_moments(std::string_view moments_source, std::string_view correl_source);

// Option declarations: put={OPT@ASSET,...}; call={...}; exdays, O (premium),
// S (spot) and K (strike) as vectors keyed by option name.
std::vector<OptionSpec> parse_deriv(std::string_view source);

}  // namespace cpoint::mdl

#endif  // CPOINT_MDL_COMPILER_HPP_
