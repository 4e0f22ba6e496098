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

// Deliberately separate from the search: this walks the domain/problem ASTs
// with its own name-keyed state so a defect in the grounder or the successor
// generator cannot hide from it.

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "coadapt/planner.hpp"

namespace coadapt::planner {

namespace {

using pddl::ActionSchema;
using pddl::Atom;
using pddl::CmpOp;
using pddl::Domain;
using pddl::ExprOp;
using pddl::NumericExpr;
using pddl::Problem;
using pddl::Term;

constexpr double kTolerance = 1e-9;

struct NamedState {
  std::set<std::string> facts;
  std::map<std::string, double> fluents;
};

std::string ground_key(const Atom& atom, const std::vector<std::string>& binding) {
  std::string key = atom.predicate;
  for (const auto& term : atom.args) {
    key.push_back(' ');
    key += term.is_param() ? binding[static_cast<std::size_t>(term.param)] : term.constant;
  }
  return key;
}

std::string fluent_key(const std::string& name, const std::vector<Term>& args,
                       const std::vector<std::string>& binding) {
  std::string key = name;
  for (const auto& term : args) {
    key.push_back(' ');
    key += term.is_param() ? binding[static_cast<std::size_t>(term.param)] : term.constant;
  }
  return key;
}

struct EvalResult {
  double value = 0.0;
  bool defined = true;
};

EvalResult eval_expr(const NumericExpr& expr, const std::vector<std::string>& binding,
                     const NamedState& state) {
  switch (expr.op) {
    case ExprOp::Constant:
      return {expr.value, true};
    case ExprOp::Fluent: {
      auto it = state.fluents.find(fluent_key(expr.fluent, expr.fluent_args, binding));
      if (it == state.fluents.end()) return {0.0, false};
      return {it->second, true};
    }
    default: {
      EvalResult lhs = eval_expr(*expr.lhs, binding, state);
      EvalResult rhs = eval_expr(*expr.rhs, binding, state);
      if (!lhs.defined || !rhs.defined) return {0.0, false};
      switch (expr.op) {
        case ExprOp::Add: return {lhs.value + rhs.value, true};
        case ExprOp::Sub: return {lhs.value - rhs.value, true};
        case ExprOp::Mul: return {lhs.value * rhs.value, true};
        default: return {lhs.value / rhs.value, true};
      }
    }
  }
}

bool compare(CmpOp op, double a, double b) {
  switch (op) {
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Ge: return a >= b;
    case CmpOp::Eq: return a == b;
  }
  return false;
}

ValidationResult invalid(int step, const std::string& reason) {
  return ValidationResult{false, reason, step};
}

}  // namespace

ValidationResult validate(const ground::GroundTask& task, const Plan& plan) {
  const Domain& domain = *task.domain;
  const Problem& problem = *task.problem;
  const std::string metric = task.metric_fluent;

  NamedState state;
  for (const auto& atom : problem.init) state.facts.insert(atom.key());
  for (const auto& init : problem.init_fluents) state.fluents[init.fluent.key()] = init.value;

  double accumulated_cost = 0.0;

  for (std::size_t index = 0; index < plan.steps.size(); ++index) {
    const PlanStep& step = plan.steps[index];
    const int at = static_cast<int>(index);
    const ActionSchema* schema = domain.find_action(step.action);
    if (schema == nullptr) return invalid(at, "unknown action \"" + step.action + "\"");
    if (schema->parameters.size() != step.args.size()) {
      return invalid(at, "argument count mismatch for \"" + step.action + "\"");
    }
    for (std::size_t i = 0; i < step.args.size(); ++i) {
      auto type = problem.object_type(step.args[i]);
      if (!type) return invalid(at, "unknown object \"" + step.args[i] + "\"");
      if (!domain.is_subtype(*type, schema->parameters[i].type)) {
        return invalid(at, "object \"" + step.args[i] + "\" is not a " +
                               schema->parameters[i].type);
      }
    }
    const std::vector<std::string>& binding = step.args;

    for (const auto& lit : schema->preconditions) {
      const bool present = state.facts.count(ground_key(lit.atom, binding)) > 0;
      if (present == lit.negated) {
        return invalid(at, "precondition " + std::string(lit.negated ? "(not " : "") +
                               ground_key(lit.atom, binding) + (lit.negated ? ")" : "") +
                               " does not hold");
      }
    }
    for (const auto& cmp : schema->numeric_preconditions) {
      EvalResult lhs = eval_expr(cmp.lhs, binding, state);
      EvalResult rhs = eval_expr(cmp.rhs, binding, state);
      if (!lhs.defined || !rhs.defined) return invalid(at, "comparison reads an undefined fluent");
      if (!compare(cmp.op, lhs.value, rhs.value)) {
        std::ostringstream reason;
        reason << "numeric precondition fails: " << lhs.value << " " << to_string(cmp.op) << " "
               << rhs.value;
        return invalid(at, reason.str());
      }
    }

    // The recorded selections must be exactly the fd_solve_f bindings, and
    // each selected design must be asserted available in the current state.
    std::map<std::string, std::string> bindings_designs;
    for (const auto& lit : schema->preconditions) {
      if (!lit.negated && lit.atom.predicate == "fd_solve_f" && lit.atom.args.size() == 2) {
        const std::string design =
            lit.atom.args[0].is_param() ? binding[static_cast<std::size_t>(lit.atom.args[0].param)]
                                        : lit.atom.args[0].constant;
        const std::string function =
            lit.atom.args[1].is_param() ? binding[static_cast<std::size_t>(lit.atom.args[1].param)]
                                        : lit.atom.args[1].constant;
        bindings_designs[function] = design;
      }
    }
    if (bindings_designs != step.selected_designs) {
      return invalid(at, "recorded design selections do not match the step's bindings");
    }
    for (const auto& [function, design] : step.selected_designs) {
      (void)function;
      if (!state.facts.count("fd_available " + design)) {
        return invalid(at, "design \"" + design + "\" was not available in this state");
      }
    }

    // Effects: expression values come from the pre-state snapshot.
    double step_cost = 0.0;
    std::vector<std::pair<const pddl::NumericEffect*, double>> numeric_updates;
    for (const auto& effect : schema->numeric_effects) {
      EvalResult value = eval_expr(effect.expr, binding, state);
      if (!value.defined) return invalid(at, "numeric effect reads an undefined fluent");
      if (effect.fluent == metric) {
        step_cost += value.value;
        continue;
      }
      numeric_updates.emplace_back(&effect, value.value);
    }
    if (std::fabs(step_cost - step.cost) > kTolerance) {
      std::ostringstream reason;
      reason << "step cost mismatch: recorded " << step.cost << ", recomputed " << step_cost;
      return invalid(at, reason.str());
    }
    accumulated_cost += step_cost;

    for (const auto& lit : schema->effects) {
      if (lit.negated) state.facts.erase(ground_key(lit.atom, binding));
    }
    for (const auto& lit : schema->effects) {
      if (!lit.negated) state.facts.insert(ground_key(lit.atom, binding));
    }
    for (const auto& [effect, value] : numeric_updates) {
      const std::string key = fluent_key(effect->fluent, effect->fluent_args, binding);
      auto it = state.fluents.find(key);
      if (effect->kind == pddl::NumericEffectKind::Assign) {
        state.fluents[key] = value;
      } else {
        if (it == state.fluents.end()) return invalid(at, "update of undefined fluent " + key);
        it->second += effect->kind == pddl::NumericEffectKind::Increase ? value : -value;
      }
    }
  }

  for (const auto& lit : problem.goal) {
    const bool present = state.facts.count(ground_key(lit.atom, {})) > 0;
    if (present == lit.negated) {
      return invalid(-1, "goal-unsatisfied: " + ground_key(lit.atom, {}));
    }
  }
  for (const auto& cmp : problem.goal_numeric) {
    EvalResult lhs = eval_expr(cmp.lhs, {}, state);
    EvalResult rhs = eval_expr(cmp.rhs, {}, state);
    if (!lhs.defined || !rhs.defined || !compare(cmp.op, lhs.value, rhs.value)) {
      return invalid(-1, "goal-unsatisfied: numeric goal condition");
    }
  }
  if (std::fabs(accumulated_cost - plan.total_cost) > kTolerance) {
    std::ostringstream reason;
    reason << "total cost mismatch: recorded " << plan.total_cost << ", recomputed "
           << accumulated_cost;
    return invalid(-1, reason.str());
  }
  return ValidationResult{};
}

}  // namespace coadapt::planner
