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

#include <algorithm>
#include <set>

#include "coadapt/sim.hpp"

namespace coadapt::sim {

std::vector<FaultSpec> faults_from_json(const nlohmann::json& doc) {
  std::vector<FaultSpec> faults;
  for (const auto& entry : doc) {
    FaultSpec fault;
    const auto& trigger = entry.at("trigger");
    if (trigger.contains("at_node")) {
      fault.trigger.kind = FaultTrigger::Kind::AtNode;
      fault.trigger.node = trigger.at("at_node").get<std::string>();
    } else if (trigger.contains("at_sim_time")) {
      fault.trigger.kind = FaultTrigger::Kind::AtSimTime;
      fault.trigger.value = trigger.at("at_sim_time").get<double>();
    } else if (trigger.contains("battery_below")) {
      fault.trigger.kind = FaultTrigger::Kind::BatteryBelow;
      fault.trigger.value = trigger.at("battery_below").get<double>();
    } else {
      throw std::invalid_argument("fault trigger must be at_node, at_sim_time or battery_below");
    }
    const auto& effect = entry.at("effect");
    if (effect.contains("fail_component")) {
      fault.effect.kind = FaultEffect::Kind::FailComponent;
      fault.effect.id = effect.at("fail_component").get<std::string>();
    } else if (effect.contains("set_qa")) {
      fault.effect.kind = FaultEffect::Kind::SetQa;
      fault.effect.id = effect.at("set_qa").at("id").get<std::string>();
      fault.effect.value = effect.at("set_qa").at("value").get<double>();
    } else if (effect.contains("set_ea")) {
      fault.effect.kind = FaultEffect::Kind::SetEa;
      fault.effect.id = effect.at("set_ea").at("id").get<std::string>();
      fault.effect.value = effect.at("set_ea").at("value").get<double>();
    } else {
      throw std::invalid_argument("fault effect must be fail_component, set_qa or set_ea");
    }
    faults.push_back(std::move(fault));
  }
  return faults;
}

const UgvEdge* UgvWorld::find_edge(const std::string& corridor, const std::string& from,
                                   const std::string& to) const {
  for (const auto& edge : edges) {
    if (edge.corridor == corridor && edge.from == from && edge.to == to) return &edge;
  }
  return nullptr;
}

UgvWorld build_ugv_world(const pddl::Problem& problem, const kb::KnowledgeBase& knowledge,
                         std::vector<FaultSpec> faults) {
  UgvWorld world;
  world.fault_schedule = std::move(faults);

  for (const auto& object : problem.objects) {
    if (object.type == "waypoint") world.nodes.push_back(object.name);
  }

  std::set<std::string> obstacle_corridors;
  std::set<std::string> dark_corridors;
  std::map<std::string, double> lengths;
  for (const auto& atom : problem.init) {
    if (atom.predicate == "corridor_obstacle") obstacle_corridors.insert(atom.args[0]);
    if (atom.predicate == "corridor_dark") dark_corridors.insert(atom.args[0]);
    if (atom.predicate == "robot_at") world.robot_at = atom.args[0];
  }
  for (const auto& init : problem.init_fluents) {
    if (init.fluent.predicate == "corridor_length") lengths[init.fluent.args[0]] = init.value;
    if (init.fluent.predicate == "battery_level") world.battery = init.value;
  }
  for (const auto& atom : problem.init) {
    if (atom.predicate != "corridor_connects") continue;
    UgvEdge edge;
    edge.corridor = atom.args[0];
    edge.from = atom.args[1];
    edge.to = atom.args[2];
    edge.obstacle = obstacle_corridors.count(edge.corridor) > 0;
    edge.dark = dark_corridors.count(edge.corridor) > 0;
    auto length = lengths.find(edge.corridor);
    edge.length = length == lengths.end() ? 1.0 : length->second;
    world.edges.push_back(std::move(edge));
  }

  for (const auto& [id, component] : knowledge.components) {
    world.component_health[id] = component.status;
  }
  for (const auto& [id, design] : knowledge.designs) {
    auto usage = design.qa_expected.find("battery_usage");
    if (usage != design.qa_expected.end()) world.design_usage[id] = usage->second;
  }
  return world;
}

UgvExecutor::UgvExecutor(UgvWorld world, double observer_interval)
    : world_(std::move(world)), observer_interval_(observer_interval) {}

void UgvExecutor::apply_effect(const FaultEffect& effect) {
  switch (effect.kind) {
    case FaultEffect::Kind::FailComponent:
      world_.component_health[effect.id] = kb::ComponentStatus::Failed;
      break;
    case FaultEffect::Kind::SetQa:
      if (effect.id == "battery_level") {
        world_.battery = effect.value;
      } else {
        extra_qa_[effect.id] = effect.value;
      }
      break;
    case FaultEffect::Kind::SetEa:
      if (effect.id == "safety") {
        world_.obstacle_safety_level = effect.value;
      } else if (effect.id == "darkness") {
        world_.dark_darkness_level = effect.value;
      } else {
        extra_ea_[effect.id] = effect.value;
      }
      break;
  }
}

void UgvExecutor::observe() {
  engine::MeasurementBatch batch;
  batch.source = "ugv_observer";
  batch.sequence = ++observer_seq_;
  batch.qa["battery_level"] = world_.battery;
  for (const auto& [id, value] : extra_qa_) batch.qa[id] = value;
  for (const auto& [id, value] : extra_ea_) batch.ea[id] = value;
  std::set<std::string> seen;
  for (const auto& edge : world_.edges) {
    if (!seen.insert(edge.corridor).second) continue;
    batch.context_ea[edge.corridor]["darkness"] = edge.dark ? world_.dark_darkness_level : 0.0;
    batch.context_ea[edge.corridor]["safety"] = edge.obstacle ? world_.obstacle_safety_level : 0.0;
  }
  for (const auto& [id, status] : world_.component_health) {
    batch.component_status[id] = status;
  }
  pending_.push_back(std::move(batch));
}

void UgvExecutor::start() {
  next_emit_ = observer_interval_;
  observe();
}

void UgvExecutor::request_action(const planner::PlanStep& step) {
  if (active_.has_value()) {
    dispatch_failure_ = "an action is already outstanding";
    return;
  }
  if (step.args.size() != 6) {
    dispatch_failure_ = "malformed move step";
    return;
  }
  const std::string& corridor = step.args[3];
  const std::string& from = step.args[4];
  const std::string& to = step.args[5];
  const UgvEdge* edge = world_.find_edge(corridor, from, to);
  if (edge == nullptr) {
    dispatch_failure_ = "no corridor " + corridor + " from " + from + " to " + to;
    return;
  }
  if (world_.robot_at != from) {
    dispatch_failure_ = "robot is at " + world_.robot_at + ", not " + from;
    return;
  }
  const bool type_ok = (step.action == "move" && !edge->obstacle && !edge->dark) ||
                       (step.action == "move_with_obstacle" && edge->obstacle) ||
                       (step.action == "move_dark" && edge->dark);
  if (!type_ok) {
    dispatch_failure_ = step.action + " does not match corridor " + corridor;
    return;
  }
  auto design = step.selected_designs.begin();
  if (design == step.selected_designs.end() || !world_.design_usage.count(design->second)) {
    dispatch_failure_ = "step carries no known design selection";
    return;
  }
  if (world_.battery < world_.design_usage.at(design->second) * edge->length) {
    dispatch_failure_ = "battery too low for " + step.action + " over " + corridor;
    return;
  }
  active_ = Active{step, edge, now_ + edge->length};
}

void UgvExecutor::fire_time_faults() {
  for (auto& fault : world_.fault_schedule) {
    if (fault.fired || fault.trigger.kind != FaultTrigger::Kind::AtSimTime) continue;
    if (fault.trigger.value <= now_) {
      fault.fired = true;
      apply_effect(fault.effect);
    }
  }
}

void UgvExecutor::fire_arrival_faults() {
  for (auto& fault : world_.fault_schedule) {
    if (fault.fired) continue;
    if (fault.trigger.kind == FaultTrigger::Kind::AtNode && fault.trigger.node == world_.robot_at) {
      fault.fired = true;
      apply_effect(fault.effect);
    } else if (fault.trigger.kind == FaultTrigger::Kind::BatteryBelow &&
               world_.battery < fault.trigger.value) {
      fault.fired = true;
      apply_effect(fault.effect);
    }
  }
}

engine::Feedback UgvExecutor::poll() {
  if (dispatch_failure_.has_value()) {
    engine::Feedback feedback{engine::FeedbackStatus::Failed, *dispatch_failure_};
    dispatch_failure_.reset();
    active_.reset();
    return feedback;
  }
  if (preempt_requested_) {
    preempt_requested_ = false;
    active_.reset();
    return engine::Feedback{engine::FeedbackStatus::Preempted, "preempted before " +
                                                                   world_.robot_at + " was left"};
  }
  if (!active_.has_value()) {
    return engine::Feedback{engine::FeedbackStatus::Idle, ""};
  }

  const double boundary = std::min(next_emit_, active_->end_time);
  now_ = boundary;
  fire_time_faults();

  if (boundary >= active_->end_time) {
    const UgvEdge* edge = active_->edge;
    const std::string design = active_->step.selected_designs.begin()->second;
    world_.battery -= world_.design_usage.at(design) * edge->length;
    world_.robot_at = edge->to;
    fire_arrival_faults();
    active_.reset();
    observe();
    if (next_emit_ <= now_) next_emit_ = now_ + observer_interval_;
    return engine::Feedback{engine::FeedbackStatus::Succeeded, ""};
  }
  observe();
  next_emit_ += observer_interval_;
  return engine::Feedback{engine::FeedbackStatus::Running, ""};
}

void UgvExecutor::preempt() {
  if (active_.has_value()) preempt_requested_ = true;
}

std::vector<engine::MeasurementBatch> UgvExecutor::drain_measurements() {
  std::vector<engine::MeasurementBatch> out(pending_.begin(), pending_.end());
  pending_.clear();
  return out;
}

engine::WorldSnapshot UgvExecutor::snapshot() const {
  engine::WorldSnapshot snap;
  snap.atoms.push_back(pddl::GroundAtom{"robot_at", {world_.robot_at}});
  snap.fluents.push_back(pddl::FluentInit{pddl::GroundAtom{"battery_level", {}}, world_.battery});
  snap.dynamic_predicates = {"robot_at"};
  snap.dynamic_fluents = {"battery_level"};
  return snap;
}

}  // namespace coadapt::sim
