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

#include "coadapt/sim.hpp"

namespace coadapt::sim {

UuvWorld build_uuv_world(const pddl::Problem& problem, const kb::KnowledgeBase& knowledge,
                         std::vector<FaultSpec> faults, const nlohmann::json& parameters) {
  UuvWorld world;
  world.fault_schedule = std::move(faults);
  for (const auto& atom : problem.init) {
    if (atom.predicate == "pipeline_found") world.phase = UuvPhase::Found;
    if (atom.predicate == "pipeline_inspected") world.phase = UuvPhase::Inspected;
    if (atom.predicate == "at_station") world.at_charging_station = true;
  }
  for (const auto& init : problem.init_fluents) {
    if (init.fluent.predicate == "battery_level") world.battery = init.value;
  }
  for (const auto& [id, component] : knowledge.components) {
    world.component_health[id] = component.status;
  }
  for (const auto& [id, design] : knowledge.designs) {
    auto usage = design.qa_expected.find("battery_usage");
    if (usage != design.qa_expected.end()) world.design_usage[id] = usage->second;
  }
  if (parameters.contains("water_visibility")) {
    world.water_visibility = parameters.at("water_visibility").get<double>();
  }
  if (parameters.contains("search_battery_floor")) {
    world.search_battery_floor = parameters.at("search_battery_floor").get<double>();
  }
  if (parameters.contains("follow_battery_floor")) {
    world.follow_battery_floor = parameters.at("follow_battery_floor").get<double>();
  }
  if (parameters.contains("action_durations")) {
    for (const auto& item : parameters.at("action_durations").items()) {
      world.action_durations[item.key()] = item.value().get<double>();
    }
  }
  return world;
}

UuvExecutor::UuvExecutor(UuvWorld world, double observer_interval)
    : world_(std::move(world)), observer_interval_(observer_interval) {}

void UuvExecutor::observe() {
  engine::MeasurementBatch batch;
  batch.source = "uuv_observer";
  batch.sequence = ++observer_seq_;
  batch.qa["battery_level"] = world_.battery;
  batch.ea["water_visibility"] = world_.water_visibility;
  for (const auto& [id, status] : world_.component_health) {
    batch.component_status[id] = status;
  }
  pending_.push_back(std::move(batch));
}

void UuvExecutor::start() {
  next_emit_ = observer_interval_;
  observe();
}

void UuvExecutor::request_action(const planner::PlanStep& step) {
  if (active_.has_value()) {
    dispatch_failure_ = "an action is already outstanding";
    return;
  }
  auto duration = world_.action_durations.find(step.action);
  if (duration == world_.action_durations.end()) {
    dispatch_failure_ = "unknown action " + step.action;
    return;
  }
  double floor = 0.0;
  if (step.action == "search_pipeline") {
    if (world_.phase != UuvPhase::NotFound) {
      dispatch_failure_ = "pipeline already found";
      return;
    }
    if (world_.battery < world_.search_battery_floor) {
      dispatch_failure_ = "battery below search floor";
      return;
    }
    floor = world_.search_battery_floor;
  } else if (step.action == "follow_pipeline") {
    if (world_.phase != UuvPhase::Found) {
      dispatch_failure_ = "pipeline not in a followable state";
      return;
    }
    if (world_.battery < world_.follow_battery_floor) {
      dispatch_failure_ = "battery below follow floor";
      return;
    }
    floor = world_.follow_battery_floor;
  } else if (step.action == "move_to_station") {
    if (world_.at_charging_station) {
      dispatch_failure_ = "already at the charging station";
      return;
    }
  } else if (step.action == "recharge") {
    if (!world_.at_charging_station) {
      dispatch_failure_ = "recharge requires the charging station";
      return;
    }
  }
  for (const auto& [function, design] : step.selected_designs) {
    (void)function;
    if (!world_.design_usage.count(design) && step.action != "recharge") {
      dispatch_failure_ = "unknown design " + design;
      return;
    }
  }
  active_ = Active{step, now_ + duration->second, floor};
}

void UuvExecutor::apply_effect(const FaultEffect& effect) {
  switch (effect.kind) {
    case FaultEffect::Kind::FailComponent:
      world_.component_health[effect.id] = kb::ComponentStatus::Failed;
      break;
    case FaultEffect::Kind::SetQa:
      if (effect.id == "battery_level") world_.battery = effect.value;
      break;
    case FaultEffect::Kind::SetEa:
      if (effect.id == "water_visibility") world_.water_visibility = effect.value;
      break;
  }
}

void UuvExecutor::fire_time_faults() {
  for (auto& fault : world_.fault_schedule) {
    if (fault.fired || fault.trigger.kind != FaultTrigger::Kind::AtSimTime) continue;
    if (fault.trigger.value <= now_) {
      fault.fired = true;
      apply_effect(fault.effect);
    }
  }
}

void UuvExecutor::fire_battery_faults() {
  for (auto& fault : world_.fault_schedule) {
    if (fault.fired || fault.trigger.kind != FaultTrigger::Kind::BatteryBelow) continue;
    if (world_.battery < fault.trigger.value) {
      fault.fired = true;
      apply_effect(fault.effect);
    }
  }
}

engine::Feedback UuvExecutor::poll() {
  if (dispatch_failure_.has_value()) {
    engine::Feedback feedback{engine::FeedbackStatus::Failed, *dispatch_failure_};
    dispatch_failure_.reset();
    active_.reset();
    return feedback;
  }
  if (preempt_requested_) {
    preempt_requested_ = false;
    active_.reset();
    return engine::Feedback{engine::FeedbackStatus::Preempted, "action preempted"};
  }
  if (!active_.has_value()) {
    return engine::Feedback{engine::FeedbackStatus::Idle, ""};
  }

  const double boundary = std::min(next_emit_, active_->end_time);
  now_ = boundary;
  fire_time_faults();

  if (active_->battery_floor > 0.0 && world_.battery < active_->battery_floor) {
    const std::string reason = active_->step.action + " aborted: battery " +
                               std::to_string(world_.battery) + " below floor";
    active_.reset();
    observe();
    if (next_emit_ <= now_) next_emit_ = now_ + observer_interval_;
    return engine::Feedback{engine::FeedbackStatus::Failed, reason};
  }

  if (boundary >= active_->end_time) {
    const planner::PlanStep& step = active_->step;
    double usage = 0.0;
    for (const auto& [function, design] : step.selected_designs) {
      (void)function;
      auto it = world_.design_usage.find(design);
      if (it != world_.design_usage.end()) usage += it->second;
    }
    if (step.action == "search_pipeline") {
      world_.phase = UuvPhase::Found;
      world_.battery -= usage;
    } else if (step.action == "follow_pipeline") {
      world_.phase = UuvPhase::Inspected;
      world_.battery -= usage;
    } else if (step.action == "move_to_station") {
      world_.at_charging_station = true;
      world_.battery -= usage;
    } else if (step.action == "recharge") {
      world_.battery = 100.0;
    }
    fire_battery_faults();
    active_.reset();
    observe();
    if (next_emit_ <= now_) next_emit_ = now_ + observer_interval_;
    return engine::Feedback{engine::FeedbackStatus::Succeeded, ""};
  }
  observe();
  next_emit_ += observer_interval_;
  return engine::Feedback{engine::FeedbackStatus::Running, ""};
}

void UuvExecutor::preempt() {
  if (active_.has_value()) preempt_requested_ = true;
}

std::vector<engine::MeasurementBatch> UuvExecutor::drain_measurements() {
  std::vector<engine::MeasurementBatch> out(pending_.begin(), pending_.end());
  pending_.clear();
  return out;
}

engine::WorldSnapshot UuvExecutor::snapshot() const {
  engine::WorldSnapshot snap;
  if (world_.at_charging_station) snap.atoms.push_back(pddl::GroundAtom{"at_station", {}});
  if (world_.phase == UuvPhase::Found || world_.phase == UuvPhase::Inspected) {
    snap.atoms.push_back(pddl::GroundAtom{"pipeline_found", {}});
  }
  if (world_.phase == UuvPhase::Inspected) {
    snap.atoms.push_back(pddl::GroundAtom{"pipeline_inspected", {}});
  }
  snap.fluents.push_back(pddl::FluentInit{pddl::GroundAtom{"battery_level", {}}, world_.battery});
  snap.dynamic_predicates = {"at_station", "pipeline_found", "pipeline_inspected"};
  snap.dynamic_fluents = {"battery_level"};
  return snap;
}

}  // namespace coadapt::sim
