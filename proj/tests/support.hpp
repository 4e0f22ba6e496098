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

// Test-only machinery: deterministic randomness, a random navigation-task
// generator, an exhaustive-search planning oracle and trace property checks.
// The oracle deliberately re-implements applicability/apply/eval instead of
// calling the planner's versions.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coadapt/ground.hpp"
#include "coadapt/planner.hpp"
#include "coadapt/trace.hpp"

namespace testsupport {

struct Rng {
  std::mt19937 gen;

  explicit Rng(std::uint32_t seed) : gen(seed) {}

  // Hand-rolled draws: the distributions in <random> are not portable.
  int uniform(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(gen() % static_cast<std::uint32_t>(hi - lo + 1));
  }
  double real(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(gen() >> 5) / 134217728.0);
  }
  bool chance(double p) { return real(0.0, 1.0) < p; }
};

// ---------------------------------------------------------------------------
// Random navigation instances (linking-pattern conformant)
// ---------------------------------------------------------------------------

struct RandomInstance {
  std::string domain_text;
  std::string problem_text;
  coadapt::pddl::Domain domain;
  coadapt::pddl::Problem problem;
  std::vector<std::string> designs;
};

inline RandomInstance random_instance(Rng& rng) {
  const int node_count = rng.uniform(2, 6);
  const int design_count = rng.uniform(1, 3);
  const bool with_battery = rng.chance(0.5);

  std::ostringstream domain;
  domain << "(define (domain rnd_nav)\n"
         << "  (:requirements :strips :typing :negative-preconditions :numeric-fluents"
            " :action-costs)\n"
         << "  (:types node action_obj function function_design - object)\n"
         << "  (:predicates\n"
         << "    (robot_at ?n - node)\n"
         << "    (edge ?a - node ?b - node)\n"
         << "    (move_action ?x - action_obj)\n"
         << "    (a_req_f ?x - action_obj ?f - function)\n"
         << "    (fd_solve_f ?fd - function_design ?f - function)\n"
         << "    (fd_available ?fd - function_design))\n"
         << "  (:functions (total-cost) (move_cost ?fd - function_design)";
  if (with_battery) domain << " (battery_level) (move_usage ?fd - function_design)";
  domain << ")\n"
         << "  (:action move\n"
         << "    :parameters (?x - action_obj ?f - function ?fd - function_design"
            " ?from - node ?to - node)\n"
         << "    :precondition (and (move_action ?x) (a_req_f ?x ?f) (fd_solve_f ?fd ?f)"
            " (fd_available ?fd) (edge ?from ?to) (robot_at ?from)";
  if (with_battery) domain << " (>= (battery_level) (move_usage ?fd))";
  domain << ")\n"
         << "    :effect (and (not (robot_at ?from)) (robot_at ?to)"
            " (increase (total-cost) (move_cost ?fd))";
  if (with_battery) domain << " (decrease (battery_level) (move_usage ?fd))";
  domain << ")))\n";

  std::set<std::pair<int, int>> edges;
  for (int i = 1; i < node_count; ++i) {
    const int j = rng.uniform(0, i - 1);
    edges.insert({j, i});
  }
  const int extra = rng.uniform(0, node_count);
  for (int k = 0; k < extra; ++k) {
    const int a = rng.uniform(0, node_count - 1);
    const int b = rng.uniform(0, node_count - 1);
    if (a != b) edges.insert({std::min(a, b), std::max(a, b)});
  }
  // Occasionally drop an edge so unsolvable instances appear too.
  if (edges.size() > 1 && rng.chance(0.15)) edges.erase(edges.begin());

  std::vector<int> costs(static_cast<std::size_t>(design_count));
  for (auto& cost : costs) cost = rng.uniform(1, 9);
  std::sort(costs.begin(), costs.end());
  costs.erase(std::unique(costs.begin(), costs.end()), costs.end());
  while (static_cast<int>(costs.size()) < design_count) {
    costs.push_back(costs.back() + rng.uniform(1, 3));
  }

  const int start = rng.uniform(0, node_count - 1);
  int goal = rng.uniform(0, node_count - 1);
  if (goal == start) goal = (goal + 1) % node_count;

  std::ostringstream problem;
  problem << "(define (problem rnd_mission)\n  (:domain rnd_nav)\n  (:objects\n    ";
  for (int i = 0; i < node_count; ++i) problem << "n" << i << " ";
  problem << "- node\n    a_move - action_obj\n    f_move - function\n    ";
  std::vector<std::string> designs;
  for (int d = 0; d < design_count; ++d) {
    designs.push_back("d" + std::to_string(d));
    problem << designs.back() << " ";
  }
  problem << "- function_design\n  )\n  (:init\n"
          << "    (robot_at n" << start << ")\n"
          << "    (move_action a_move)\n"
          << "    (a_req_f a_move f_move)\n";
  for (const auto& design : designs) {
    problem << "    (fd_solve_f " << design << " f_move)\n";
  }
  bool any_available = false;
  for (const auto& design : designs) {
    if (rng.chance(0.85)) {
      problem << "    (fd_available " << design << ")\n";
      any_available = true;
    }
  }
  if (!any_available && rng.chance(0.5)) {
    problem << "    (fd_available " << designs[0] << ")\n";
  }
  for (const auto& [a, b] : edges) {
    problem << "    (edge n" << a << " n" << b << ")\n";
    problem << "    (edge n" << b << " n" << a << ")\n";
  }
  problem << "    (= (total-cost) 0)\n";
  for (int d = 0; d < design_count; ++d) {
    problem << "    (= (move_cost d" << d << ") " << costs[static_cast<std::size_t>(d)] << ")\n";
  }
  if (with_battery) {
    problem << "    (= (battery_level) " << rng.uniform(10, 100) << ")\n";
    for (int d = 0; d < design_count; ++d) {
      problem << "    (= (move_usage d" << d << ") " << rng.uniform(1, 30) << ")\n";
    }
  }
  problem << "  )\n  (:goal (and (robot_at n" << goal << ")))\n"
          << "  (:metric minimize (total-cost))\n)\n";

  RandomInstance instance;
  instance.domain_text = domain.str();
  instance.problem_text = problem.str();
  instance.domain = coadapt::pddl::parse_domain(instance.domain_text, "rnd_domain");
  instance.problem =
      coadapt::pddl::parse_problem(instance.problem_text, instance.domain, "rnd_problem");
  instance.designs = designs;
  return instance;
}

// ---------------------------------------------------------------------------
// Exhaustive-search oracle
// ---------------------------------------------------------------------------

inline double oracle_eval(const coadapt::ground::Expr& expr, const std::vector<double>& fluents) {
  using coadapt::pddl::ExprOp;
  switch (expr.op) {
    case ExprOp::Constant: return expr.value;
    case ExprOp::Fluent: return fluents[static_cast<std::size_t>(expr.fluent)];
    case ExprOp::Add: return oracle_eval(expr.kids[0], fluents) + oracle_eval(expr.kids[1], fluents);
    case ExprOp::Sub: return oracle_eval(expr.kids[0], fluents) - oracle_eval(expr.kids[1], fluents);
    case ExprOp::Mul: return oracle_eval(expr.kids[0], fluents) * oracle_eval(expr.kids[1], fluents);
    case ExprOp::Div: return oracle_eval(expr.kids[0], fluents) / oracle_eval(expr.kids[1], fluents);
  }
  return 0.0;
}

inline bool oracle_applicable(const coadapt::ground::GroundAction& action,
                              const coadapt::ground::State& state) {
  using coadapt::pddl::CmpOp;
  for (int atom : action.pre_pos) {
    if (!state.test(atom)) return false;
  }
  for (int atom : action.pre_neg) {
    if (state.test(atom)) return false;
  }
  for (const auto& cmp : action.comparisons) {
    const double a = oracle_eval(cmp.lhs, state.fluents);
    const double b = oracle_eval(cmp.rhs, state.fluents);
    if (std::isnan(a) || std::isnan(b)) return false;
    bool ok = false;
    switch (cmp.op) {
      case CmpOp::Lt: ok = a < b; break;
      case CmpOp::Le: ok = a <= b; break;
      case CmpOp::Gt: ok = a > b; break;
      case CmpOp::Ge: ok = a >= b; break;
      case CmpOp::Eq: ok = a == b; break;
    }
    if (!ok) return false;
  }
  return true;
}

inline coadapt::ground::State oracle_apply(const coadapt::ground::GroundAction& action,
                                           const coadapt::ground::State& state) {
  using coadapt::pddl::NumericEffectKind;
  coadapt::ground::State next = state;
  std::vector<double> values;
  values.reserve(action.numeric_effects.size());
  for (const auto& effect : action.numeric_effects) {
    values.push_back(oracle_eval(effect.expr, state.fluents));
  }
  for (int atom : action.del) next.set(atom, false);
  for (int atom : action.add) next.set(atom, true);
  for (std::size_t i = 0; i < action.numeric_effects.size(); ++i) {
    const auto& effect = action.numeric_effects[i];
    double& slot = next.fluents[static_cast<std::size_t>(effect.fluent)];
    if (effect.kind == NumericEffectKind::Assign) {
      slot = values[i];
    } else if (effect.kind == NumericEffectKind::Increase) {
      slot += values[i];
    } else {
      slot -= values[i];
    }
  }
  return next;
}

inline std::string oracle_key(const coadapt::ground::State& state) {
  std::ostringstream out;
  for (auto block : state.facts) out << block << ",";
  out << "|";
  for (double value : state.fluents) {
    if (std::isnan(value)) {
      out << "nan;";
    } else {
      out << std::llround(value * 1e9) << ";";
    }
  }
  return out.str();
}

/// Minimum goal-reaching cost within max_depth steps, or nullopt.
inline std::optional<double> oracle_min_cost(const coadapt::ground::GroundTask& task,
                                             int max_depth) {
  std::map<std::pair<std::string, int>, std::optional<double>> memo;
  auto search = [&](const coadapt::ground::State& state, int depth,
                    const auto& self) -> std::optional<double> {
    if (task.goal_satisfied(state)) return 0.0;
    if (depth == 0) return std::nullopt;
    const auto key = std::make_pair(oracle_key(state), depth);
    auto hit = memo.find(key);
    if (hit != memo.end()) return hit->second;
    std::optional<double> best;
    for (const auto& action : task.actions) {
      if (!oracle_applicable(action, state)) continue;
      const double cost = oracle_eval(action.cost, state.fluents);
      if (std::isnan(cost)) continue;
      const auto rest = self(oracle_apply(action, state), depth - 1, self);
      if (rest.has_value() && (!best.has_value() || cost + *rest < *best)) {
        best = cost + *rest;
      }
    }
    memo[key] = best;
    return best;
  };
  return search(task.init_state, max_depth, search);
}

// ---------------------------------------------------------------------------
// Plan mutations
// ---------------------------------------------------------------------------

struct Mutation {
  std::string kind;
  coadapt::planner::Plan plan;
};

inline std::vector<Mutation> mutate_plan(const coadapt::planner::Plan& plan,
                                         const std::vector<std::string>& designs, Rng& rng) {
  std::vector<Mutation> result;
  if (plan.steps.size() >= 2) {
    const std::size_t i = static_cast<std::size_t>(rng.uniform(0, static_cast<int>(plan.steps.size()) - 2));
    coadapt::planner::Plan swapped = plan;
    std::swap(swapped.steps[i], swapped.steps[i + 1]);
    result.push_back(Mutation{"swap", std::move(swapped)});
  }
  if (!plan.steps.empty()) {
    const std::size_t i = static_cast<std::size_t>(rng.uniform(0, static_cast<int>(plan.steps.size()) - 1));
    coadapt::planner::Plan dropped = plan;
    dropped.steps.erase(dropped.steps.begin() + static_cast<std::ptrdiff_t>(i));
    result.push_back(Mutation{"drop", std::move(dropped)});
  }
  if (!plan.steps.empty() && designs.size() >= 2) {
    const std::size_t i = static_cast<std::size_t>(rng.uniform(0, static_cast<int>(plan.steps.size()) - 1));
    coadapt::planner::Plan substituted = plan;
    auto& step = substituted.steps[i];
    if (!step.selected_designs.empty()) {
      const std::string old_design = step.selected_designs.begin()->second;
      std::string new_design = old_design;
      for (const auto& candidate : designs) {
        if (candidate != old_design) {
          new_design = candidate;
          break;
        }
      }
      if (new_design != old_design) {
        step.selected_designs.begin()->second = new_design;
        for (auto& arg : step.args) {
          if (arg == old_design) arg = new_design;
        }
        result.push_back(Mutation{"design-substitution", std::move(substituted)});
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Trace property checks
// ---------------------------------------------------------------------------

struct CheckResult {
  bool ok = true;
  std::string message;
};

inline CheckResult check_sequential(const coadapt::trace::Trace& trace) {
  int depth = 0;
  for (const auto& event : trace.events()) {
    if (event.kind == "action_start") {
      if (depth != 0) return {false, "overlapping action_start at seq " + std::to_string(event.seq)};
      depth = 1;
    } else if (event.kind == "action_end") {
      if (depth != 1) return {false, "action_end without start at seq " + std::to_string(event.seq)};
      depth = 0;
    }
  }
  return {};
}

inline CheckResult check_grounding_before_execution(const coadapt::trace::Trace& trace) {
  std::set<std::pair<std::string, std::string>> pending;
  for (const auto& event : trace.events()) {
    if (event.kind == "grounding") {
      pending.insert({event.payload.at("function").get<std::string>(),
                      event.payload.at("design").get<std::string>()});
    } else if (event.kind == "action_start") {
      for (const auto& item : event.payload.at("designs").items()) {
        if (!pending.count({item.key(), item.value().get<std::string>()})) {
          return {false, "action_start at seq " + std::to_string(event.seq) +
                             " without grounding for " + item.key()};
        }
      }
      pending.clear();
    }
  }
  return {};
}

inline CheckResult check_replan_iff(const coadapt::trace::Trace& trace) {
  bool pending_trigger = false;
  for (const auto& event : trace.events()) {
    if (event.kind == "analysis") {
      if (pending_trigger) {
        return {false, "triggering analysis without plan_request before seq " +
                           std::to_string(event.seq)};
      }
      const bool changed = event.payload.at("changed").get<bool>();
      const bool errors = !event.payload.at("objectives_in_error").empty();
      if (changed || errors) pending_trigger = true;
    } else if (event.kind == "event" &&
               event.payload.at("source").get<std::string>() == "executor") {
      pending_trigger = true;
    } else if (event.kind == "plan_request") {
      if (!pending_trigger) {
        return {false, "plan_request without trigger at seq " + std::to_string(event.seq)};
      }
      pending_trigger = false;
    }
  }
  return {};
}

inline CheckResult check_design_legality(const coadapt::trace::Trace& trace) {
  std::set<std::string> available;
  bool seen_analysis = false;
  for (const auto& event : trace.events()) {
    if (event.kind == "analysis") {
      available.clear();
      for (const auto& id : event.payload.at("available")) {
        available.insert(id.get<std::string>());
      }
      seen_analysis = true;
    } else if (event.kind == "action_start" && seen_analysis) {
      for (const auto& item : event.payload.at("designs").items()) {
        if (!available.count(item.value().get<std::string>())) {
          return {false, "step uses design outside the analyzed set at seq " +
                             std::to_string(event.seq)};
        }
      }
    }
  }
  return {};
}

}  // namespace testsupport
