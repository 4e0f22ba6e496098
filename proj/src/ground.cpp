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

#include "coadapt/ground.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace coadapt::ground {

namespace {

using pddl::ActionSchema;
using pddl::Atom;
using pddl::CmpOp;
using pddl::Domain;
using pddl::ExprOp;
using pddl::GroundAtom;
using pddl::Literal;
using pddl::NumericEffectKind;
using pddl::NumericExpr;
using pddl::Problem;
using pddl::Term;

struct Candidate {
  const ActionSchema* schema = nullptr;
  std::vector<std::string> binding;  // object name per parameter
  std::vector<GroundAtom> pre_pos;   // dynamic positive preconditions
  std::vector<GroundAtom> pre_neg;
  std::vector<GroundAtom> add;
  std::vector<GroundAtom> del;
  std::map<std::string, std::string> selected_designs;
};

GroundAtom bind_atom(const Atom& atom, const std::vector<std::string>& binding) {
  GroundAtom ground{atom.predicate, {}};
  ground.args.reserve(atom.args.size());
  for (const auto& term : atom.args) {
    ground.args.push_back(term.is_param() ? binding[static_cast<std::size_t>(term.param)]
                                          : term.constant);
  }
  return ground;
}

class Grounder {
 public:
  Grounder(const Domain& domain, const Problem& problem, const GroundOptions& options)
      : domain_(domain), problem_(problem), options_(options) {}

  GroundTask run() {
    collect_static_predicates();
    index_objects();
    for (const auto& atom : problem_.init) init_keys_.insert(atom.key());

    for (const auto& schema : domain_.actions) enumerate(schema);
    if (options_.prune) relax_filter();
    return build_task();
  }

 private:
  void collect_static_predicates() {
    std::set<std::string> touched;
    for (const auto& schema : domain_.actions) {
      for (const auto& lit : schema.effects) touched.insert(lit.atom.predicate);
    }
    for (const auto& def : domain_.predicates) {
      if (!touched.count(def.name)) static_predicates_.insert(def.name);
    }
  }

  void index_objects() {
    for (const auto& object : problem_.objects) {
      for (const auto& [type, parent] : domain_.types) {
        (void)parent;
        if (domain_.is_subtype(object.type, type)) by_type_[type].push_back(object.name);
      }
    }
  }

  bool is_static(const std::string& predicate) const { return static_predicates_.count(predicate) > 0; }

  // Depth-first over parameters; fully bound static literals are checked as
  // soon as they close, which keeps the corridor-style relations cheap.
  void enumerate(const ActionSchema& schema) {
    std::vector<std::string> binding(schema.parameters.size());
    std::vector<bool> bound(schema.parameters.size(), false);
    descend(schema, 0, binding, bound);
  }

  bool static_literal_ok(const Literal& lit, const std::vector<std::string>& binding) const {
    const GroundAtom atom = bind_atom(lit.atom, binding);
    const bool present = init_keys_.count(atom.key()) > 0;
    return lit.negated ? !present : present;
  }

  bool literal_closed(const Literal& lit, const std::vector<bool>& bound) const {
    for (const auto& term : lit.atom.args) {
      if (term.is_param() && !bound[static_cast<std::size_t>(term.param)]) return false;
    }
    return true;
  }

  void descend(const ActionSchema& schema, std::size_t param, std::vector<std::string>& binding,
               std::vector<bool>& bound) {
    if (param == schema.parameters.size()) {
      finish_candidate(schema, binding);
      return;
    }
    auto it = by_type_.find(schema.parameters[param].type);
    if (it == by_type_.end()) return;  // no objects of this type: no instances
    bound[param] = true;
    for (const auto& object : it->second) {
      binding[param] = object;
      if (options_.prune) {
        bool feasible = true;
        for (const auto& lit : schema.preconditions) {
          if (!is_static(lit.atom.predicate)) continue;
          bool closes_now = false;
          for (const auto& term : lit.atom.args) {
            if (term.is_param() && static_cast<std::size_t>(term.param) == param) closes_now = true;
          }
          if (closes_now && literal_closed(lit, bound) && !static_literal_ok(lit, binding)) {
            feasible = false;
            break;
          }
        }
        if (!feasible) continue;
      }
      descend(schema, param + 1, binding, bound);
    }
    bound[param] = false;
  }

  void finish_candidate(const ActionSchema& schema, const std::vector<std::string>& binding) {
    Candidate candidate;
    candidate.schema = &schema;
    candidate.binding = binding;
    for (const auto& lit : schema.preconditions) {
      if (options_.prune && is_static(lit.atom.predicate)) {
        if (!static_literal_ok(lit, binding)) return;
        if (lit.atom.predicate == "fd_solve_f" && lit.atom.args.size() == 2 && !lit.negated) {
          const GroundAtom atom = bind_atom(lit.atom, binding);
          candidate.selected_designs[atom.args[1]] = atom.args[0];
        }
        continue;
      }
      const GroundAtom atom = bind_atom(lit.atom, binding);
      if (lit.atom.predicate == "fd_solve_f" && lit.atom.args.size() == 2 && !lit.negated) {
        candidate.selected_designs[atom.args[1]] = atom.args[0];
      }
      (lit.negated ? candidate.pre_neg : candidate.pre_pos).push_back(atom);
    }
    for (const auto& lit : schema.effects) {
      (lit.negated ? candidate.del : candidate.add).push_back(bind_atom(lit.atom, binding));
    }
    candidates_.push_back(std::move(candidate));
  }

  // Delete-relaxed applicability fixpoint from init; candidates that never
  // become applicable cannot appear in any plan and are dropped.
  void relax_filter() {
    std::set<std::string> reached = init_keys_;
    std::vector<bool> applied(candidates_.size(), false);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < candidates_.size(); ++i) {
        if (applied[i]) continue;
        const auto& candidate = candidates_[i];
        bool ok = true;
        for (const auto& atom : candidate.pre_pos) {
          if (!reached.count(atom.key())) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        applied[i] = true;
        changed = true;
        for (const auto& atom : candidate.add) {
          if (reached.insert(atom.key()).second) changed = true;
        }
      }
    }
    std::vector<Candidate> kept;
    kept.reserve(candidates_.size());
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
      if (applied[i]) kept.push_back(std::move(candidates_[i]));
    }
    candidates_ = std::move(kept);
  }

  // --- task assembly ---

  int atom_id(GroundTask& task, const GroundAtom& atom) {
    auto [it, inserted] = task.atom_lookup_.emplace(atom.key(), static_cast<int>(task.atoms.size()));
    if (inserted) task.atoms.push_back(atom);
    return it->second;
  }

  int fluent_id(const GroundAtom& fluent) {
    const std::string key = fluent.key();
    auto it = fluent_lookup_.find(key);
    if (it != fluent_lookup_.end()) return it->second;
    const int id = static_cast<int>(fluent_table_.size());
    fluent_lookup_.emplace(key, id);
    fluent_table_.push_back(fluent);
    return id;
  }

  Expr compile_expr(const NumericExpr& expr, const std::vector<std::string>& binding,
                    const std::string& metric) {
    Expr out;
    switch (expr.op) {
      case ExprOp::Constant:
        out.op = ExprOp::Constant;
        out.value = expr.value;
        break;
      case ExprOp::Fluent: {
        GroundAtom fluent{expr.fluent, {}};
        for (const auto& term : expr.fluent_args) {
          fluent.args.push_back(term.is_param() ? binding[static_cast<std::size_t>(term.param)]
                                                : term.constant);
        }
        if (fluent.predicate == metric) {
          throw GroundError("the metric fluent \"" + metric + "\" may not be read by actions");
        }
        out.op = ExprOp::Fluent;
        out.fluent = fluent_id(fluent);
        break;
      }
      default:
        out.op = expr.op;
        out.kids.push_back(compile_expr(*expr.lhs, binding, metric));
        out.kids.push_back(compile_expr(*expr.rhs, binding, metric));
        break;
    }
    return out;
  }

  GroundTask build_task() {
    GroundTask task;
    task.domain = std::make_shared<Domain>(domain_);
    task.problem = std::make_shared<Problem>(problem_);
    task.metric_fluent = problem_.metric_fluent.empty() ? "total-cost" : problem_.metric_fluent;

    // Atom table: initial facts first, then effect/precondition atoms, then
    // goals; everything deterministic because candidates are in schema order
    // and bindings in object-declaration order.
    for (const auto& atom : problem_.init) {
      if (!options_.prune || !is_static(atom.predicate)) atom_id(task, atom);
    }

    for (const auto& candidate : candidates_) {
      GroundAction action;
      action.name = candidate.schema->name;
      action.args = candidate.binding;
      action.selected_designs = candidate.selected_designs;
      for (const auto& atom : candidate.pre_pos) action.pre_pos.push_back(atom_id(task, atom));
      for (const auto& atom : candidate.pre_neg) action.pre_neg.push_back(atom_id(task, atom));
      for (const auto& atom : candidate.add) action.add.push_back(atom_id(task, atom));
      for (const auto& atom : candidate.del) action.del.push_back(atom_id(task, atom));
      for (const auto& cmp : candidate.schema->numeric_preconditions) {
        GroundComparison ground_cmp;
        ground_cmp.op = cmp.op;
        ground_cmp.lhs = compile_expr(cmp.lhs, candidate.binding, task.metric_fluent);
        ground_cmp.rhs = compile_expr(cmp.rhs, candidate.binding, task.metric_fluent);
        action.comparisons.push_back(std::move(ground_cmp));
      }
      std::vector<Expr> cost_terms;
      for (const auto& effect : candidate.schema->numeric_effects) {
        GroundAtom target{effect.fluent, {}};
        for (const auto& term : effect.fluent_args) {
          target.args.push_back(term.is_param()
                                    ? candidate.binding[static_cast<std::size_t>(term.param)]
                                    : term.constant);
        }
        if (target.predicate == task.metric_fluent) {
          if (effect.kind != NumericEffectKind::Increase) {
            throw GroundError("only increase effects may touch the metric fluent \"" +
                              task.metric_fluent + "\"");
          }
          cost_terms.push_back(compile_expr(effect.expr, candidate.binding, task.metric_fluent));
          continue;
        }
        GroundNumericEffect ground_effect;
        ground_effect.kind = effect.kind;
        ground_effect.fluent = fluent_id(target);
        ground_effect.expr = compile_expr(effect.expr, candidate.binding, task.metric_fluent);
        action.numeric_effects.push_back(std::move(ground_effect));
      }
      if (cost_terms.empty()) {
        action.cost = Expr::constant(0.0);
      } else {
        action.cost = cost_terms[0];
        for (std::size_t i = 1; i < cost_terms.size(); ++i) {
          Expr sum;
          sum.op = ExprOp::Add;
          sum.kids.push_back(std::move(action.cost));
          sum.kids.push_back(std::move(cost_terms[i]));
          action.cost = std::move(sum);
        }
      }
      task.actions.push_back(std::move(action));
    }

    for (const auto& lit : problem_.goal) {
      GroundAtom atom{lit.atom.predicate, {}};
      for (const auto& term : lit.atom.args) atom.args.push_back(term.constant);
      const int id = atom_id(task, atom);
      (lit.negated ? task.goal_neg_atoms : task.goal_atoms).push_back(id);
    }
    for (const auto& cmp : problem_.goal_numeric) {
      GroundComparison ground_cmp;
      ground_cmp.op = cmp.op;
      ground_cmp.lhs = compile_expr(cmp.lhs, {}, task.metric_fluent);
      ground_cmp.rhs = compile_expr(cmp.rhs, {}, task.metric_fluent);
      task.goal_numeric.push_back(std::move(ground_cmp));
    }

    task.fluents = fluent_table_;

    // Deterministic tie-breaking for the planner: lexicographic (name, args).
    std::sort(task.actions.begin(), task.actions.end(),
              [](const GroundAction& a, const GroundAction& b) {
                if (a.name != b.name) return a.name < b.name;
                return a.args < b.args;
              });

    task.init_state.facts.assign((task.atoms.size() + 63) / 64, 0);
    for (const auto& atom : problem_.init) {
      if (auto id = task.atom_index(atom)) task.init_state.set(*id, true);
    }
    task.init_state.fluents.assign(task.fluents.size(),
                                   std::numeric_limits<double>::quiet_NaN());
    for (const auto& init : problem_.init_fluents) {
      auto it = fluent_lookup_.find(init.fluent.key());
      if (it != fluent_lookup_.end()) task.init_state.fluents[it->second] = init.value;
    }
    return task;
  }

  const Domain& domain_;
  const Problem& problem_;
  GroundOptions options_;
  std::set<std::string> static_predicates_;
  std::map<std::string, std::vector<std::string>> by_type_;
  std::set<std::string> init_keys_;
  std::vector<Candidate> candidates_;
  std::map<std::string, int> fluent_lookup_;
  std::vector<GroundAtom> fluent_table_;
};

}  // namespace

double Expr::eval(const std::vector<double>& fluents) const {
  switch (op) {
    case pddl::ExprOp::Constant: return value;
    case pddl::ExprOp::Fluent: return fluents[static_cast<std::size_t>(fluent)];
    case pddl::ExprOp::Add: return kids[0].eval(fluents) + kids[1].eval(fluents);
    case pddl::ExprOp::Sub: return kids[0].eval(fluents) - kids[1].eval(fluents);
    case pddl::ExprOp::Mul: return kids[0].eval(fluents) * kids[1].eval(fluents);
    case pddl::ExprOp::Div: return kids[0].eval(fluents) / kids[1].eval(fluents);
  }
  return 0.0;
}

bool GroundComparison::holds(const std::vector<double>& fluents) const {
  const double a = lhs.eval(fluents);
  const double b = rhs.eval(fluents);
  if (std::isnan(a) || std::isnan(b)) return false;
  switch (op) {
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Ge: return a >= b;
    case CmpOp::Eq: return a == b;
  }
  return false;
}

std::string GroundAction::signature() const {
  std::string out = name;
  out.push_back('(');
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i > 0) out += ", ";
    out += args[i];
  }
  out.push_back(')');
  return out;
}

std::optional<int> GroundTask::atom_index(const pddl::GroundAtom& atom) const {
  auto it = atom_lookup_.find(atom.key());
  if (it == atom_lookup_.end()) return std::nullopt;
  return it->second;
}

bool GroundTask::goal_satisfied(const State& state) const {
  for (int atom : goal_atoms) {
    if (!state.test(atom)) return false;
  }
  for (int atom : goal_neg_atoms) {
    if (state.test(atom)) return false;
  }
  for (const auto& cmp : goal_numeric) {
    if (!cmp.holds(state.fluents)) return false;
  }
  return true;
}

std::string GroundTask::dump() const {
  std::ostringstream out;
  auto atom_name = [&](int id) { return atoms[static_cast<std::size_t>(id)].key(); };
  auto expr_text = [&](const Expr& expr, const auto& self) -> std::string {
    switch (expr.op) {
      case pddl::ExprOp::Constant: {
        std::ostringstream number;
        number << expr.value;
        return number.str();
      }
      case pddl::ExprOp::Fluent:
        return "[" + fluents[static_cast<std::size_t>(expr.fluent)].key() + "]";
      default: {
        const char* op = expr.op == pddl::ExprOp::Add   ? "+"
                         : expr.op == pddl::ExprOp::Sub ? "-"
                         : expr.op == pddl::ExprOp::Mul ? "*"
                                                        : "/";
        return std::string("(") + op + " " + self(expr.kids[0], self) + " " +
               self(expr.kids[1], self) + ")";
      }
    }
  };
  for (const auto& action : actions) {
    out << action.signature() << "\n";
    std::vector<std::string> parts;
    for (int id : action.pre_pos) parts.push_back(atom_name(id));
    std::sort(parts.begin(), parts.end());
    for (const auto& part : parts) out << "  pre+ " << part << "\n";
    parts.clear();
    for (int id : action.pre_neg) parts.push_back(atom_name(id));
    std::sort(parts.begin(), parts.end());
    for (const auto& part : parts) out << "  pre- " << part << "\n";
    parts.clear();
    for (const auto& cmp : action.comparisons) {
      parts.push_back("  cmp " + expr_text(cmp.lhs, expr_text) + " " + to_string(cmp.op) + " " +
                      expr_text(cmp.rhs, expr_text));
    }
    std::sort(parts.begin(), parts.end());
    for (const auto& part : parts) out << part << "\n";
    parts.clear();
    for (int id : action.add) parts.push_back(atom_name(id));
    std::sort(parts.begin(), parts.end());
    for (const auto& part : parts) out << "  add " << part << "\n";
    parts.clear();
    for (int id : action.del) parts.push_back(atom_name(id));
    std::sort(parts.begin(), parts.end());
    for (const auto& part : parts) out << "  del " << part << "\n";
    parts.clear();
    for (const auto& effect : action.numeric_effects) {
      const char* kind = effect.kind == pddl::NumericEffectKind::Assign     ? "assign"
                         : effect.kind == pddl::NumericEffectKind::Increase ? "increase"
                                                                            : "decrease";
      parts.push_back(std::string("  ") + kind + " [" +
                      fluents[static_cast<std::size_t>(effect.fluent)].key() + "] " +
                      expr_text(effect.expr, expr_text));
    }
    std::sort(parts.begin(), parts.end());
    for (const auto& part : parts) out << part << "\n";
    out << "  cost " << expr_text(action.cost, expr_text) << "\n";
    for (const auto& [function, design] : action.selected_designs) {
      out << "  design " << function << "=" << design << "\n";
    }
  }
  return out.str();
}

GroundTask ground(const pddl::Domain& domain, const pddl::Problem& problem,
                  const GroundOptions& options) {
  return Grounder(domain, problem, options).run();
}

}  // namespace coadapt::ground
