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

#include "coadapt/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>

namespace coadapt::planner {

namespace {

using ground::GroundAction;
using ground::GroundTask;
using ground::State;

// Fluents enter the closed-set key rounded to 1e-9 so float noise cannot
// blow the state space up; NaN (undefined) gets its own marker.
std::string state_key(const State& state) {
  std::string key;
  key.reserve(state.facts.size() * 8 + state.fluents.size() * 8);
  for (std::uint64_t block : state.facts) {
    for (int i = 0; i < 8; ++i) key.push_back(static_cast<char>((block >> (8 * i)) & 0xFF));
  }
  for (double value : state.fluents) {
    if (std::isnan(value)) {
      key.push_back('\x7F');
      continue;
    }
    const auto scaled = static_cast<std::int64_t>(std::llround(value * 1e9));
    for (int i = 0; i < 8; ++i) key.push_back(static_cast<char>((scaled >> (8 * i)) & 0xFF));
  }
  return key;
}

bool applicable(const GroundAction& action, const State& state) {
  for (int atom : action.pre_pos) {
    if (!state.test(atom)) return false;
  }
  for (int atom : action.pre_neg) {
    if (state.test(atom)) return false;
  }
  for (const auto& cmp : action.comparisons) {
    if (!cmp.holds(state.fluents)) return false;
  }
  return true;
}

// Effect expressions read the pre-state snapshot; updates land in order.
State apply(const GroundAction& action, const State& state) {
  State next = state;
  std::vector<double> rhs(action.numeric_effects.size());
  for (std::size_t i = 0; i < action.numeric_effects.size(); ++i) {
    rhs[i] = action.numeric_effects[i].expr.eval(state.fluents);
  }
  for (int atom : action.del) next.set(atom, false);
  for (int atom : action.add) next.set(atom, true);
  for (std::size_t i = 0; i < action.numeric_effects.size(); ++i) {
    const auto& effect = action.numeric_effects[i];
    double& slot = next.fluents[static_cast<std::size_t>(effect.fluent)];
    switch (effect.kind) {
      case pddl::NumericEffectKind::Assign: slot = rhs[i]; break;
      case pddl::NumericEffectKind::Increase: slot += rhs[i]; break;
      case pddl::NumericEffectKind::Decrease: slot -= rhs[i]; break;
    }
  }
  return next;
}

std::vector<std::string> relaxed_unreachable_goals(const GroundTask& task) {
  std::vector<bool> reached(task.atoms.size(), false);
  for (std::size_t i = 0; i < task.atoms.size(); ++i) {
    if (task.init_state.test(static_cast<int>(i))) reached[i] = true;
  }
  bool changed = true;
  std::vector<bool> applied(task.actions.size(), false);
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < task.actions.size(); ++i) {
      if (applied[i]) continue;
      const auto& action = task.actions[i];
      bool ok = true;
      for (int atom : action.pre_pos) {
        if (!reached[static_cast<std::size_t>(atom)]) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      applied[i] = true;
      changed = true;
      for (int atom : action.add) {
        if (!reached[static_cast<std::size_t>(atom)]) {
          reached[static_cast<std::size_t>(atom)] = true;
        }
      }
    }
  }
  std::vector<std::string> unreachable;
  for (int atom : task.goal_atoms) {
    if (!reached[static_cast<std::size_t>(atom)]) {
      unreachable.push_back(task.atoms[static_cast<std::size_t>(atom)].key());
    }
  }
  return unreachable;
}

struct Node {
  int state_id = -1;
  int parent = -1;
  int action = -1;
  double g = 0.0;
};

struct QueueEntry {
  double priority = 0.0;  // g for optimal, unsatisfied-goal count for greedy
  double secondary = 0.0;
  int action = -1;  // incoming ground-action index: lexicographic tie-break
  std::uint64_t seq = 0;
  int node = -1;

  bool operator>(const QueueEntry& other) const {
    if (priority != other.priority) return priority > other.priority;
    if (secondary != other.secondary) return secondary > other.secondary;
    if (action != other.action) return action > other.action;
    return seq > other.seq;
  }
};

int unsatisfied_goals(const GroundTask& task, const State& state) {
  int count = 0;
  for (int atom : task.goal_atoms) count += state.test(atom) ? 0 : 1;
  for (int atom : task.goal_neg_atoms) count += state.test(atom) ? 1 : 0;
  for (const auto& cmp : task.goal_numeric) count += cmp.holds(state.fluents) ? 0 : 1;
  return count;
}

Plan extract_plan(const GroundTask& task, const std::vector<Node>& nodes, int goal_node) {
  std::vector<int> chain;
  for (int node = goal_node; nodes[static_cast<std::size_t>(node)].parent >= 0;
       node = nodes[static_cast<std::size_t>(node)].parent) {
    chain.push_back(node);
  }
  std::reverse(chain.begin(), chain.end());
  Plan plan;
  for (int node_id : chain) {
    const Node& node = nodes[static_cast<std::size_t>(node_id)];
    const GroundAction& action = task.actions[static_cast<std::size_t>(node.action)];
    PlanStep step;
    step.action = action.name;
    step.args = action.args;
    step.selected_designs = action.selected_designs;
    step.cost = node.g - nodes[static_cast<std::size_t>(node.parent)].g;
    plan.steps.push_back(std::move(step));
  }
  plan.total_cost = nodes[static_cast<std::size_t>(goal_node)].g;
  return plan;
}

}  // namespace

PlanOutcome plan(const GroundTask& task, const PlannerConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const bool greedy = config.mode == PlannerMode::Greedy;

  std::vector<State> states;
  std::vector<Node> nodes;
  std::unordered_map<std::string, int> interned;
  std::unordered_map<int, double> best_g;

  auto intern = [&](const State& state) {
    const std::string key = state_key(state);
    auto it = interned.find(key);
    if (it != interned.end()) return std::pair<int, bool>{it->second, false};
    const int id = static_cast<int>(states.size());
    states.push_back(state);
    interned.emplace(key, id);
    return std::pair<int, bool>{id, true};
  };

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<QueueEntry>> open;
  std::uint64_t seq = 0;
  std::uint64_t expanded = 0;

  const auto [root_state, root_new] = intern(task.init_state);
  (void)root_new;
  nodes.push_back(Node{root_state, -1, -1, 0.0});
  best_g[root_state] = 0.0;
  open.push(QueueEntry{greedy ? static_cast<double>(unsatisfied_goals(task, task.init_state)) : 0.0,
                       0.0, -1, seq++, 0});

  std::set<int> closed;

  while (!open.empty()) {
    const QueueEntry entry = open.top();
    open.pop();
    const Node node = nodes[static_cast<std::size_t>(entry.node)];
    if (closed.count(node.state_id)) continue;
    auto best = best_g.find(node.state_id);
    if (best != best_g.end() && node.g > best->second + 1e-12) continue;
    closed.insert(node.state_id);

    // Copy: interning successors below can grow (and reallocate) `states`.
    const State state = states[static_cast<std::size_t>(node.state_id)];
    if (task.goal_satisfied(state)) {
      return extract_plan(task, nodes, entry.node);
    }

    if (++expanded > config.node_limit) {
      return ResourceCapExceeded{expanded, false};
    }
    if ((expanded & 511) == 0) {
      const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);
      if (elapsed.count() > config.time_limit_seconds) {
        return ResourceCapExceeded{expanded, true};
      }
    }

    for (std::size_t action_index = 0; action_index < task.actions.size(); ++action_index) {
      const GroundAction& action = task.actions[action_index];
      if (!applicable(action, state)) continue;
      const double step_cost = action.cost.eval(state.fluents);
      if (std::isnan(step_cost)) continue;  // undefined cost: inapplicable
      if (step_cost < 0) {
        throw PlannerError("action " + action.signature() + " has negative cost " +
                           std::to_string(step_cost));
      }
      State successor = apply(action, state);
      const double g = node.g + step_cost;
      const auto [state_id, fresh] = intern(successor);
      if (closed.count(state_id)) continue;
      auto known = best_g.find(state_id);
      // Strictly worse paths are dropped; equal-cost paths are queued too so
      // the pop order (not insertion order) resolves the parent.
      if (!greedy && !fresh && known != best_g.end() && g > known->second + 1e-12) continue;
      best_g[state_id] = fresh || known == best_g.end() ? g : std::min(known->second, g);
      const int node_id = static_cast<int>(nodes.size());
      nodes.push_back(Node{state_id, entry.node, static_cast<int>(action_index), g});
      const double priority =
          greedy ? static_cast<double>(unsatisfied_goals(task, successor)) : g;
      open.push(QueueEntry{priority, greedy ? g : 0.0, static_cast<int>(action_index), seq++,
                           node_id});
    }
  }

  return Unsolvable{relaxed_unreachable_goals(task)};
}

std::vector<Reconfiguration> extract_reconfigurations(const Plan& plan) {
  std::vector<Reconfiguration> result;
  std::map<std::string, std::string> current;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    for (const auto& [function, design] : plan.steps[i].selected_designs) {
      auto it = current.find(function);
      if (it == current.end() || it->second != design) {
        result.push_back(Reconfiguration{static_cast<int>(i), function, design});
        current[function] = design;
      }
    }
  }
  return result;
}

nlohmann::ordered_json plan_to_json(const Plan& plan) {
  nlohmann::ordered_json doc;
  doc["steps"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const PlanStep& step = plan.steps[i];
    nlohmann::ordered_json entry;
    entry["index"] = i;
    entry["action"] = step.action;
    entry["args"] = step.args;
    entry["designs"] = nlohmann::ordered_json::object();
    for (const auto& [function, design] : step.selected_designs) {
      entry["designs"][function] = design;
    }
    entry["cost"] = step.cost;
    doc["steps"].push_back(std::move(entry));
  }
  doc["total_cost"] = plan.total_cost;
  return doc;
}

Plan plan_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("steps") || !doc.contains("total_cost")) {
    throw PlannerError("plan document must carry \"steps\" and \"total_cost\"");
  }
  Plan plan;
  for (const auto& entry : doc["steps"]) {
    PlanStep step;
    step.action = entry.at("action").get<std::string>();
    for (const auto& arg : entry.at("args")) step.args.push_back(arg.get<std::string>());
    for (const auto& item : entry.at("designs").items()) {
      step.selected_designs[item.key()] = item.value().get<std::string>();
    }
    step.cost = entry.at("cost").get<double>();
    plan.steps.push_back(std::move(step));
  }
  plan.total_cost = doc["total_cost"].get<double>();
  return plan;
}

std::string render_plan(const Plan& plan) {
  std::ostringstream out;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const PlanStep& step = plan.steps[i];
    out << i << ": " << step.action << "(";
    for (std::size_t j = 0; j < step.args.size(); ++j) {
      if (j > 0) out << ", ";
      out << step.args[j];
    }
    out << ") [";
    bool first = true;
    for (const auto& [function, design] : step.selected_designs) {
      if (!first) out << ", ";
      out << function << "=" << design;
      first = false;
    }
    out << "] cost=" << step.cost << "\n";
  }
  out << "total_cost=" << plan.total_cost << "\n";
  return out.str();
}

}  // namespace coadapt::planner
