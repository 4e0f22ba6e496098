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
/// Instantiation of action schemas over problem objects. Static literals
/// (predicates no action ever adds or deletes) are checked once during
/// enumeration and dropped; candidates that fail them, and candidates that
/// stay inapplicable under delete-relaxation, are pruned. Pruning never
/// changes plan existence or optimal cost. The metric fluent lives outside
/// the state; its increase effects become the action cost.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coadapt/pddl.hpp"

namespace coadapt::ground {

class GroundError : public std::runtime_error {
 public:
  explicit GroundError(const std::string& message) : std::runtime_error(message) {}
};

/// Compiled numeric expression over fluent indices. Undefined fluents carry
/// NaN, which poisons every comparison into "false".
struct Expr {
  pddl::ExprOp op = pddl::ExprOp::Constant;
  double value = 0.0;
  int fluent = -1;
  std::vector<Expr> kids;

  double eval(const std::vector<double>& fluents) const;
  static Expr constant(double v) { return Expr{pddl::ExprOp::Constant, v, -1, {}}; }
};

struct GroundComparison {
  pddl::CmpOp op = pddl::CmpOp::Ge;
  Expr lhs;
  Expr rhs;

  bool holds(const std::vector<double>& fluents) const;
};

struct GroundNumericEffect {
  pddl::NumericEffectKind kind = pddl::NumericEffectKind::Assign;
  int fluent = -1;
  Expr expr;
};

struct State {
  std::vector<std::uint64_t> facts;
  std::vector<double> fluents;

  bool test(int atom) const {
    return (facts[static_cast<std::size_t>(atom) >> 6] >> (atom & 63)) & 1U;
  }
  void set(int atom, bool value) {
    auto& block = facts[static_cast<std::size_t>(atom) >> 6];
    const std::uint64_t bit = 1ULL << (atom & 63);
    block = value ? (block | bit) : (block & ~bit);
  }
  bool operator==(const State&) const = default;
};

struct GroundAction {
  std::string name;
  std::vector<std::string> args;
  std::vector<int> pre_pos;
  std::vector<int> pre_neg;
  std::vector<GroundComparison> comparisons;
  std::vector<int> add;
  std::vector<int> del;
  std::vector<GroundNumericEffect> numeric_effects;
  Expr cost;  // evaluated in the pre-state
  std::map<std::string, std::string> selected_designs;  // function -> design

  std::string signature() const;
};

struct GroundOptions {
  bool prune = true;
};

struct GroundTask {
  std::shared_ptr<const pddl::Domain> domain;
  std::shared_ptr<const pddl::Problem> problem;

  std::vector<pddl::GroundAtom> atoms;
  std::vector<pddl::GroundAtom> fluents;
  std::vector<GroundAction> actions;  // sorted by (name, args)
  State init_state;
  std::vector<int> goal_atoms;
  std::vector<int> goal_neg_atoms;
  std::vector<GroundComparison> goal_numeric;
  std::string metric_fluent;

  std::optional<int> atom_index(const pddl::GroundAtom& atom) const;
  bool goal_satisfied(const State& state) const;

  /// Name-resolved description, used by tests to compare tasks built from
  /// different but equivalent domain texts.
  std::string dump() const;

  // Internal index, filled by ground().
  std::map<std::string, int> atom_lookup_;
};

GroundTask ground(const pddl::Domain& domain, const pddl::Problem& problem,
                  const GroundOptions& options = {});

}  // namespace coadapt::ground
