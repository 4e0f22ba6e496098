// Copyright 2026 Coadapt Authors
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

#pragma once

/// \file
/// Typed STRIPS subset with negative preconditions, numeric fluents, action
/// costs and a minimize metric. Durative actions are accepted and normalized
/// to plain actions at parse time: "(at start P)" / "(over all P)" conditions
/// become preconditions, "(at start E)" / "(at end E)" effects become plain
/// effects, and the declared duration becomes a cost effect on the metric
/// fluent unless the action already carries one. Grammar: docs/pddl_subset.md.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace coadapt::pddl {

struct SourcePos {
  int line = 0;
  int col = 0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, SourcePos pos, const std::string& message);

  const std::string& file() const { return file_; }
  SourcePos pos() const { return pos_; }

 private:
  std::string file_;
  SourcePos pos_;
};

struct Diagnostic {
  std::string file;
  SourcePos pos;
  std::string severity;  // "error" | "warning"
  std::string message;

  std::string render() const;
};

struct TypedName {
  std::string name;
  std::string type;  // "object" when unstated
};

// Terms are either schema parameters (index into ActionSchema::parameters)
// or constant object names.
struct Term {
  int param = -1;
  std::string constant;

  bool is_param() const { return param >= 0; }
  static Term parameter(int index) { return Term{index, {}}; }
  static Term object(std::string name) { return Term{-1, std::move(name)}; }
  bool operator==(const Term&) const = default;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;
  bool operator==(const Atom&) const = default;
};

struct Literal {
  Atom atom;
  bool negated = false;
  bool operator==(const Literal&) const = default;
};

enum class ExprOp { Constant, Fluent, Add, Sub, Mul, Div };

struct NumericExpr {
  ExprOp op = ExprOp::Constant;
  double value = 0.0;                  // Constant
  std::string fluent;                  // Fluent
  std::vector<Term> fluent_args;       // Fluent
  std::shared_ptr<NumericExpr> lhs;    // Add..Div
  std::shared_ptr<NumericExpr> rhs;    // Add..Div
};

enum class CmpOp { Lt, Le, Gt, Ge, Eq };

std::string to_string(CmpOp op);

struct Comparison {
  CmpOp op = CmpOp::Ge;
  NumericExpr lhs;
  NumericExpr rhs;
};

enum class NumericEffectKind { Assign, Increase, Decrease };

struct NumericEffect {
  NumericEffectKind kind = NumericEffectKind::Assign;
  std::string fluent;
  std::vector<Term> fluent_args;
  NumericExpr expr;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedName> parameters;
  std::vector<Literal> preconditions;
  std::vector<Comparison> numeric_preconditions;
  std::vector<Literal> effects;  // add when !negated, delete when negated
  std::vector<NumericEffect> numeric_effects;
};

struct PredicateDef {
  std::string name;
  std::vector<TypedName> parameters;
};

struct Domain {
  std::string name;
  std::vector<std::string> requirements;
  std::map<std::string, std::string> types;  // type -> parent ("" for object)
  std::vector<PredicateDef> predicates;
  std::vector<PredicateDef> fluents;
  std::vector<ActionSchema> actions;

  bool is_subtype(const std::string& type, const std::string& ancestor) const;
  const PredicateDef* find_predicate(const std::string& name) const;
  const PredicateDef* find_fluent(const std::string& name) const;
  const ActionSchema* find_action(const std::string& name) const;
};

struct GroundAtom {
  std::string predicate;
  std::vector<std::string> args;

  std::string key() const;
  auto operator<=>(const GroundAtom&) const = default;
};

struct FluentInit {
  GroundAtom fluent;
  double value = 0.0;
};

struct Problem {
  std::string name;
  std::string domain_name;
  std::vector<TypedName> objects;
  std::vector<GroundAtom> init;
  std::vector<FluentInit> init_fluents;
  std::vector<Literal> goal;              // ground literals
  std::vector<Comparison> goal_numeric;   // ground comparisons
  std::string metric_fluent;              // empty when no metric section

  std::optional<std::string> object_type(const std::string& name) const;
};

Domain parse_domain(const std::string& text, const std::string& file = "<domain>");
Problem parse_problem(const std::string& text, const Domain& domain,
                      const std::string& file = "<problem>");

/// Canonical form: lowercase keywords, one clause per line, two-space indent.
/// parse(print(x)) is structurally equal to x.
std::string print_domain(const Domain& domain);
std::string print_problem(const Problem& problem);

/// Checks the availability-linking contract: every action schema must chain
/// an action-tag literal, an a_req_f link, an fd_solve_f link and an
/// fd_available check over its design parameters, and every tagged action
/// object in init must carry an a_req_f fact. Empty result means conformant.
std::vector<Diagnostic> require_linking_pattern(const Domain& domain, const Problem& problem);

/// Replaces all fd_available / fd_allowed_on facts in init: fd_available(d)
/// for each d in `available`, fd_allowed_on(d, c) for each contextual pair.
/// Every id must be a problem object. Idempotent for fixed inputs; no other
/// init fact is touched.
Problem update_problem(const Problem& problem, const std::set<std::string>& available,
                       const std::set<std::pair<std::string, std::string>>& contextual);

}  // namespace coadapt::pddl
