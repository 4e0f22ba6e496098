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

#include <charconv>
#include <map>
#include <sstream>
#include <vector>

#include "coadapt/pddl.hpp"

namespace coadapt::pddl {

namespace {

// Shortest representation that parses back to the same double.
std::string format_number(double value) {
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  (void)ec;
  return std::string(buffer, ptr);
}

std::string term_text(const Term& term, const std::vector<TypedName>& params) {
  return term.is_param() ? params[static_cast<std::size_t>(term.param)].name : term.constant;
}

std::string atom_text(const Atom& atom, const std::vector<TypedName>& params) {
  std::string out = "(" + atom.predicate;
  for (const auto& arg : atom.args) out += " " + term_text(arg, params);
  return out + ")";
}

std::string expr_text(const NumericExpr& expr, const std::vector<TypedName>& params) {
  switch (expr.op) {
    case ExprOp::Constant:
      return format_number(expr.value);
    case ExprOp::Fluent: {
      std::string out = "(" + expr.fluent;
      for (const auto& arg : expr.fluent_args) out += " " + term_text(arg, params);
      return out + ")";
    }
    default: {
      const char* op = expr.op == ExprOp::Add   ? "+"
                       : expr.op == ExprOp::Sub ? "-"
                       : expr.op == ExprOp::Mul ? "*"
                                                : "/";
      return std::string("(") + op + " " + expr_text(*expr.lhs, params) + " " +
             expr_text(*expr.rhs, params) + ")";
    }
  }
}

std::string typed_vars_text(const std::vector<TypedName>& params) {
  std::string out;
  for (const auto& param : params) {
    if (!out.empty()) out += " ";
    out += param.name + " - " + param.type;
  }
  return out;
}

// Consecutive names sharing a type collapse into one "a b - t" group.
void print_typed_names(std::ostringstream& out, const std::vector<TypedName>& names,
                       const std::string& indent) {
  std::size_t i = 0;
  while (i < names.size()) {
    std::size_t j = i;
    while (j + 1 < names.size() && names[j + 1].type == names[i].type) ++j;
    out << indent;
    for (std::size_t k = i; k <= j; ++k) out << names[k].name << " ";
    out << "- " << names[i].type << "\n";
    i = j + 1;
  }
}

}  // namespace

std::string print_domain(const Domain& domain) {
  std::ostringstream out;
  out << "(define (domain " << domain.name << ")\n";
  if (!domain.requirements.empty()) {
    out << "  (:requirements";
    for (const auto& req : domain.requirements) out << " " << req;
    out << ")\n";
  }

  // Group types by parent, alphabetically, root "object" implied.
  std::map<std::string, std::vector<std::string>> by_parent;
  for (const auto& [type, parent] : domain.types) {
    if (type == "object") continue;
    by_parent[parent.empty() ? "object" : parent].push_back(type);
  }
  if (!by_parent.empty()) {
    out << "  (:types\n";
    for (const auto& [parent, children] : by_parent) {
      out << "    ";
      for (const auto& child : children) out << child << " ";
      out << "- " << parent << "\n";
    }
    out << "  )\n";
  }

  if (!domain.predicates.empty()) {
    out << "  (:predicates\n";
    for (const auto& def : domain.predicates) {
      out << "    (" << def.name;
      if (!def.parameters.empty()) out << " " << typed_vars_text(def.parameters);
      out << ")\n";
    }
    out << "  )\n";
  }

  if (!domain.fluents.empty()) {
    out << "  (:functions\n";
    for (const auto& def : domain.fluents) {
      out << "    (" << def.name;
      if (!def.parameters.empty()) out << " " << typed_vars_text(def.parameters);
      out << ")\n";
    }
    out << "  )\n";
  }

  for (const auto& action : domain.actions) {
    out << "  (:action " << action.name << "\n";
    out << "    :parameters (" << typed_vars_text(action.parameters) << ")\n";
    out << "    :precondition (and\n";
    for (const auto& lit : action.preconditions) {
      out << "      " << (lit.negated ? "(not " : "") << atom_text(lit.atom, action.parameters)
          << (lit.negated ? ")" : "") << "\n";
    }
    for (const auto& cmp : action.numeric_preconditions) {
      out << "      (" << to_string(cmp.op) << " " << expr_text(cmp.lhs, action.parameters) << " "
          << expr_text(cmp.rhs, action.parameters) << ")\n";
    }
    out << "    )\n";
    out << "    :effect (and\n";
    for (const auto& lit : action.effects) {
      out << "      " << (lit.negated ? "(not " : "") << atom_text(lit.atom, action.parameters)
          << (lit.negated ? ")" : "") << "\n";
    }
    for (const auto& eff : action.numeric_effects) {
      const char* kind = eff.kind == NumericEffectKind::Assign     ? "assign"
                         : eff.kind == NumericEffectKind::Increase ? "increase"
                                                                   : "decrease";
      out << "      (" << kind << " (" << eff.fluent;
      for (const auto& arg : eff.fluent_args) out << " " << term_text(arg, action.parameters);
      out << ") " << expr_text(eff.expr, action.parameters) << ")\n";
    }
    out << "    )\n";
    out << "  )\n";
  }
  out << ")\n";
  return out.str();
}

std::string print_problem(const Problem& problem) {
  static const std::vector<TypedName> kNoParams;
  std::ostringstream out;
  out << "(define (problem " << problem.name << ")\n";
  out << "  (:domain " << problem.domain_name << ")\n";
  out << "  (:objects\n";
  print_typed_names(out, problem.objects, "    ");
  out << "  )\n";
  out << "  (:init\n";
  for (const auto& atom : problem.init) {
    out << "    (" << atom.predicate;
    for (const auto& arg : atom.args) out << " " << arg;
    out << ")\n";
  }
  for (const auto& init : problem.init_fluents) {
    out << "    (= (" << init.fluent.predicate;
    for (const auto& arg : init.fluent.args) out << " " << arg;
    out << ") " << format_number(init.value) << ")\n";
  }
  out << "  )\n";
  out << "  (:goal (and\n";
  for (const auto& lit : problem.goal) {
    out << "    " << (lit.negated ? "(not " : "") << atom_text(lit.atom, kNoParams)
        << (lit.negated ? ")" : "") << "\n";
  }
  for (const auto& cmp : problem.goal_numeric) {
    out << "    (" << to_string(cmp.op) << " " << expr_text(cmp.lhs, kNoParams) << " "
        << expr_text(cmp.rhs, kNoParams) << ")\n";
  }
  out << "  ))\n";
  if (!problem.metric_fluent.empty()) {
    out << "  (:metric minimize (" << problem.metric_fluent << "))\n";
  }
  out << ")\n";
  return out.str();
}

}  // namespace coadapt::pddl
