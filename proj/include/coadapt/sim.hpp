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
/// Simulated managed subsystems: a ground vehicle navigating a corridor
/// graph and an underwater vehicle inspecting a pipeline, both with fault
/// injection. The worlds advance only inside the executor adapters, emit
/// observations at fixed simulated intervals and at action boundaries, and
/// implement the engine's sequential executor contract.

#include <deque>
#include <filesystem>
#include <memory>
#include <optional>

#include <nlohmann/json.hpp>

#include "coadapt/engine.hpp"
#include "coadapt/kb.hpp"
#include "coadapt/pddl.hpp"

namespace coadapt::sim {

struct FaultTrigger {
  enum class Kind { AtNode, AtSimTime, BatteryBelow };
  Kind kind = Kind::AtSimTime;
  std::string node;
  double value = 0.0;
};

struct FaultEffect {
  enum class Kind { FailComponent, SetQa, SetEa };
  Kind kind = Kind::FailComponent;
  std::string id;
  double value = 0.0;
};

// Each fault fires at most once.
struct FaultSpec {
  FaultTrigger trigger;
  FaultEffect effect;
  bool fired = false;
};

std::vector<FaultSpec> faults_from_json(const nlohmann::json& doc);

// ---------------------------------------------------------------------------
// UGV: graph navigation
// ---------------------------------------------------------------------------

struct UgvEdge {
  std::string corridor;
  std::string from;
  std::string to;
  bool obstacle = false;
  bool dark = false;
  double length = 1.0;
};

struct UgvWorld {
  std::vector<std::string> nodes;
  std::vector<UgvEdge> edges;  // one entry per direction
  std::string robot_at;
  double battery = 100.0;
  std::map<std::string, kb::ComponentStatus> component_health;
  std::map<std::string, double> design_usage;  // battery per unit length
  std::vector<FaultSpec> fault_schedule;
  // Levels the observers report for the special corridor types.
  double obstacle_safety_level = 0.8;
  double dark_darkness_level = 1.0;

  const UgvEdge* find_edge(const std::string& corridor, const std::string& from,
                           const std::string& to) const;
};

/// Reads the corridor graph, robot position and battery out of the problem
/// file and the design data out of the KB, so a problem-file edit is the only
/// thing needed to change the map or mission.
UgvWorld build_ugv_world(const pddl::Problem& problem, const kb::KnowledgeBase& knowledge,
                         std::vector<FaultSpec> faults);

class UgvExecutor : public engine::Executor {
 public:
  UgvExecutor(UgvWorld world, double observer_interval = 1.0);

  void start() override;
  void request_action(const planner::PlanStep& step) override;
  engine::Feedback poll() override;
  void preempt() override;
  std::vector<engine::MeasurementBatch> drain_measurements() override;
  engine::WorldSnapshot snapshot() const override;
  double now() const override { return now_; }

  const UgvWorld& world() const { return world_; }

 private:
  struct Active {
    planner::PlanStep step;
    const UgvEdge* edge = nullptr;
    double end_time = 0.0;
  };

  void observe();
  void apply_effect(const FaultEffect& effect);
  void fire_time_faults();
  void fire_arrival_faults();

  UgvWorld world_;
  double observer_interval_;
  double now_ = 0.0;
  double next_emit_ = 0.0;
  std::uint64_t observer_seq_ = 0;
  std::deque<engine::MeasurementBatch> pending_;
  std::optional<Active> active_;
  std::optional<std::string> dispatch_failure_;
  bool preempt_requested_ = false;
  std::map<std::string, double> extra_qa_;
  std::map<std::string, double> extra_ea_;
};

// ---------------------------------------------------------------------------
// UUV: pipeline inspection
// ---------------------------------------------------------------------------

enum class UuvPhase { NotFound, Found, Inspected };

struct UuvWorld {
  UuvPhase phase = UuvPhase::NotFound;
  double battery = 100.0;
  double water_visibility = 2.5;
  bool at_charging_station = false;
  std::map<std::string, kb::ComponentStatus> component_health;
  std::map<std::string, double> design_usage;  // battery per action execution
  std::vector<FaultSpec> fault_schedule;
  double search_battery_floor = 25.0;
  double follow_battery_floor = 25.0;
  std::map<std::string, double> action_durations = {
      {"search_pipeline", 4.0}, {"follow_pipeline", 3.0}, {"move_to_station", 2.0}, {"recharge", 1.0}};
};

UuvWorld build_uuv_world(const pddl::Problem& problem, const kb::KnowledgeBase& knowledge,
                         std::vector<FaultSpec> faults, const nlohmann::json& parameters);

class UuvExecutor : public engine::Executor {
 public:
  UuvExecutor(UuvWorld world, double observer_interval = 1.0);

  void start() override;
  void request_action(const planner::PlanStep& step) override;
  engine::Feedback poll() override;
  void preempt() override;
  std::vector<engine::MeasurementBatch> drain_measurements() override;
  engine::WorldSnapshot snapshot() const override;
  double now() const override { return now_; }

  const UuvWorld& world() const { return world_; }

 private:
  struct Active {
    planner::PlanStep step;
    double end_time = 0.0;
    double battery_floor = 0.0;
  };

  void observe();
  void apply_effect(const FaultEffect& effect);
  void fire_time_faults();
  void fire_battery_faults();

  UuvWorld world_;
  double observer_interval_;
  double now_ = 0.0;
  double next_emit_ = 0.0;
  std::uint64_t observer_seq_ = 0;
  std::deque<engine::MeasurementBatch> pending_;
  std::optional<Active> active_;
  std::optional<std::string> dispatch_failure_;
  bool preempt_requested_ = false;
};

// ---------------------------------------------------------------------------
// Fixtures and scenario files
// ---------------------------------------------------------------------------

struct Fixture {
  pddl::Domain domain;
  pddl::Problem problem;
  kb::KnowledgeBase knowledge;
};

struct UgvProblemParams {
  std::string start = "wp1";
  std::string goal = "wp9";
};

struct UgvKbParams {
  double mrpt_lidar_safety = 0.3;
  double mrpt_kinect_safety = 0.9;
};

std::string ugv_kb_text(const UgvKbParams& params = {});
std::string ugv_domain_text(double obstacle_battery_extra = 0.0);
std::string ugv_problem_text(const UgvProblemParams& params = {},
                             const UgvKbParams& kb_params = {});
std::string uuv_kb_text();
std::string uuv_domain_text();
std::string uuv_problem_text();

Fixture build_ugv_fixture();
Fixture build_uuv_fixture();

/// The UGV fixture's fault: c_kinect fails when the robot reaches wp2.
std::vector<FaultSpec> ugv_fixture_faults();
/// The UUV fixture's fault: battery drops to 20 at t = 2 during the search.
std::vector<FaultSpec> uuv_fixture_faults();

struct Scenario {
  pddl::Domain domain;
  pddl::Problem problem;
  kb::KnowledgeBase knowledge;
  std::string world_type;  // "ugv" | "uuv"
  nlohmann::json parameters;
  std::vector<FaultSpec> faults;
  std::uint64_t seed = 0;
};

Scenario load_scenario(const std::filesystem::path& path);
std::unique_ptr<engine::Executor> make_executor(const Scenario& scenario);

}  // namespace coadapt::sim
