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
/// The co-adaptation loop. One reasoner step per drained measurement burst:
/// update the KB, analyze, and emit events when the available-design set
/// changed or an objective is in error. Any event preempts the outstanding
/// action, refreshes the problem from the world and the latest context,
/// replans, and restarts execution. Actions run strictly one at a time;
/// groundings are written before each dispatch and retired at action end.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "coadapt/kb.hpp"
#include "coadapt/pddl.hpp"
#include "coadapt/planner.hpp"
#include "coadapt/trace.hpp"

namespace coadapt::engine {

struct MeasurementBatch {
  std::map<std::string, double> qa;
  std::map<std::string, double> ea;
  std::map<std::string, kb::ComponentStatus> component_status;
  // Per context object (e.g. a corridor): EA levels a design must reach.
  std::map<std::string, std::map<std::string, double>> context_ea;
  std::string source;
  std::uint64_t sequence = 0;
};

enum class FeedbackStatus { Idle, Running, Succeeded, Failed, Preempted };

struct Feedback {
  FeedbackStatus status = FeedbackStatus::Idle;
  std::string reason;
};

std::string to_string(FeedbackStatus status);

/// What the managed subsystem currently looks like, expressed in problem
/// vocabulary. sync_problem_with_world replaces exactly the listed dynamic
/// predicates and fluents and leaves every other init fact alone.
struct WorldSnapshot {
  std::vector<pddl::GroundAtom> atoms;
  std::vector<pddl::FluentInit> fluents;
  std::set<std::string> dynamic_predicates;
  std::set<std::string> dynamic_fluents;
};

/// Sequential executor over the managed subsystem: one action outstanding at
/// a time, measurements flow back through drain_measurements().
class Executor {
 public:
  virtual ~Executor() = default;

  virtual void start() = 0;
  virtual void request_action(const planner::PlanStep& step) = 0;
  /// Advances to the next simulated boundary while an action is outstanding.
  virtual Feedback poll() = 0;
  virtual void preempt() = 0;
  virtual std::vector<MeasurementBatch> drain_measurements() = 0;
  virtual WorldSnapshot snapshot() const = 0;
  virtual double now() const = 0;
};

enum class EventKind { FdSetChanged, ObjectiveError };

struct AdaptationEvent {
  EventKind kind = EventKind::FdSetChanged;
  std::vector<std::string> details;  // changed design ids / erroring objectives
  std::uint64_t kb_generation = 0;
  std::string source = "analysis";  // "analysis" | "executor"
};

struct ReasonerOutcome {
  std::set<std::string> fd_new;
  std::vector<AdaptationEvent> events;
  kb::AnalysisResult analysis;
};

/// One monitor/analyze pass: update the KB from the batch, analyze, compare
/// against fd_old (an unset fd_old always counts as changed). The caller
/// stores fd_new as the next fd_old.
ReasonerOutcome reasoner_step(kb::KnowledgeBase& kb, const MeasurementBatch& batch,
                              const std::optional<std::set<std::string>>& fd_old);

/// Replaces init's dynamic facts (per the snapshot's dynamic sets) with the
/// snapshot values, preserving positions where possible; static facts are
/// untouched. Unknown objects are rejected.
pddl::Problem sync_problem_with_world(const pddl::Problem& problem, const WorldSnapshot& snapshot);

enum class MissionOutcome { Succeeded, Failed };

enum class MissionPhase { Idle, Planning, Executing, Succeeded, Failed };

std::string to_string(MissionPhase phase);

// current_step is set iff phase == Executing.
struct MissionStatus {
  MissionPhase phase = MissionPhase::Idle;
  std::optional<planner::Plan> current_plan;
  std::optional<std::size_t> current_step;
  int replan_count = 0;
};

struct EngineConfig {
  planner::PlannerConfig planner;
};

struct MissionResult {
  MissionOutcome outcome = MissionOutcome::Failed;
  std::string failure_reason;
  int plan_count = 0;
  int replan_count = 0;
  MissionStatus final_status;
  trace::Trace trace;
};

MissionResult run_mission(const pddl::Domain& domain, const pddl::Problem& problem,
                          kb::KnowledgeBase knowledge, Executor& executor,
                          const EngineConfig& config = {});

// Trace payload helpers shared by the engine and the replay executor.
nlohmann::ordered_json batch_to_json(const MeasurementBatch& batch);
MeasurementBatch batch_from_json(const nlohmann::json& doc);
nlohmann::ordered_json snapshot_to_json(const WorldSnapshot& snapshot);
WorldSnapshot snapshot_from_json(const nlohmann::json& doc);

/// Replays a recorded mission: serves the recorded measurements, action
/// outcomes and snapshots back to the engine, which must then reproduce the
/// identical trace.
class ReplayExecutor : public Executor {
 public:
  explicit ReplayExecutor(const trace::Trace& recorded);

  void start() override;
  void request_action(const planner::PlanStep& step) override;
  Feedback poll() override;
  void preempt() override;
  std::vector<MeasurementBatch> drain_measurements() override;
  WorldSnapshot snapshot() const override;
  double now() const override { return now_; }

 private:
  struct Item {
    enum class Kind { Measurement, ActionStart, ActionEnd, Snapshot } kind;
    double sim_time = 0.0;
    nlohmann::ordered_json payload;
  };

  std::vector<Item> script_;
  mutable std::size_t cursor_ = 0;
  mutable double now_ = 0.0;
};

}  // namespace coadapt::engine
