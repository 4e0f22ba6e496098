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
/// Cost-minimal planning over a GroundTask. The default mode is uniform-cost
/// search with a closed set keyed by (facts, fluents discretized at 1e-9);
/// equal-cost frontier nodes expand in lexicographic order of (action name,
/// bound objects), which makes plans deterministic for equal tasks. The
/// greedy mode orders the frontier by unsatisfied-goal count instead and
/// drops the optimality guarantee.

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "coadapt/ground.hpp"

namespace coadapt::planner {

struct PlanStep {
  std::string action;
  std::vector<std::string> args;
  std::map<std::string, std::string> selected_designs;  // function -> design
  double cost = 0.0;
};

struct Plan {
  std::vector<PlanStep> steps;
  double total_cost = 0.0;
};

struct Unsolvable {
  // Goal atoms that stay unreachable even under delete-relaxation.
  std::vector<std::string> unreachable_goal_atoms;
};

struct ResourceCapExceeded {
  std::uint64_t nodes_expanded = 0;
  bool time_limit_hit = false;
};

using PlanOutcome = std::variant<Plan, Unsolvable, ResourceCapExceeded>;

enum class PlannerMode { Optimal, Greedy };

struct PlannerConfig {
  PlannerMode mode = PlannerMode::Optimal;
  std::uint64_t node_limit = 1'000'000;
  double time_limit_seconds = 10.0;
};

class PlannerError : public std::runtime_error {
 public:
  explicit PlannerError(const std::string& message) : std::runtime_error(message) {}
};

PlanOutcome plan(const ground::GroundTask& task, const PlannerConfig& config = {});

struct Reconfiguration {
  int step_index = 0;
  std::string function;
  std::string design;
};

/// One entry per step/function pair whose selection differs from the previous
/// step's selection for the same function; the first step always emits.
std::vector<Reconfiguration> extract_reconfigurations(const Plan& plan);

nlohmann::ordered_json plan_to_json(const Plan& plan);
Plan plan_from_json(const nlohmann::json& doc);

/// "i: action(args) [function=design, ...] cost=c", one step per line.
std::string render_plan(const Plan& plan);

struct ValidationResult {
  bool valid = true;
  std::string reason;
  int step = -1;  // -1 when the failure is not tied to a single step
};

/// Independent plan checker. Walks the domain/problem ASTs directly (shares
/// no code with the search's successor generator): binds each step's schema,
/// re-evaluates preconditions, effects and costs, cross-checks the recorded
/// design selections against the fd_solve_f bindings and fd_available facts,
/// and verifies the goal plus the total cost within 1e-9.
ValidationResult validate(const ground::GroundTask& task, const Plan& plan);

}  // namespace coadapt::planner
