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

#include "coadapt/engine.hpp"

#include <algorithm>

#include "coadapt/ground.hpp"

namespace coadapt::engine {

namespace {

using nlohmann::ordered_json;

MeasurementBatch merge_batches(const std::vector<MeasurementBatch>& batches) {
  MeasurementBatch merged;
  merged.source = "merged";
  for (const auto& batch : batches) {
    for (const auto& [k, v] : batch.qa) merged.qa[k] = v;
    for (const auto& [k, v] : batch.ea) merged.ea[k] = v;
    for (const auto& [k, v] : batch.component_status) merged.component_status[k] = v;
    for (const auto& [ctx, reqs] : batch.context_ea) merged.context_ea[ctx] = reqs;
    merged.sequence = std::max(merged.sequence, batch.sequence);
  }
  return merged;
}

ordered_json set_to_json(const std::set<std::string>& values) {
  ordered_json out = ordered_json::array();
  for (const auto& value : values) out.push_back(value);
  return out;
}

ordered_json event_to_json(const AdaptationEvent& event) {
  ordered_json out;
  out["kind"] = event.kind == EventKind::FdSetChanged ? "FdSetChanged" : "ObjectiveError";
  out["details"] = event.details;
  out["kb_generation"] = event.kb_generation;
  out["source"] = event.source;
  return out;
}

bool goal_holds(const pddl::Problem& problem) {
  std::set<std::string> facts;
  for (const auto& atom : problem.init) facts.insert(atom.key());
  std::map<std::string, double> fluents;
  for (const auto& init : problem.init_fluents) fluents[init.fluent.key()] = init.value;

  auto eval = [&](const pddl::NumericExpr& expr, const auto& self) -> std::optional<double> {
    switch (expr.op) {
      case pddl::ExprOp::Constant: return expr.value;
      case pddl::ExprOp::Fluent: {
        std::string key = expr.fluent;
        for (const auto& term : expr.fluent_args) key += " " + term.constant;
        auto it = fluents.find(key);
        if (it == fluents.end()) return std::nullopt;
        return it->second;
      }
      default: {
        auto lhs = self(*expr.lhs, self);
        auto rhs = self(*expr.rhs, self);
        if (!lhs || !rhs) return std::nullopt;
        switch (expr.op) {
          case pddl::ExprOp::Add: return *lhs + *rhs;
          case pddl::ExprOp::Sub: return *lhs - *rhs;
          case pddl::ExprOp::Mul: return *lhs * *rhs;
          default: return *lhs / *rhs;
        }
      }
    }
  };

  for (const auto& lit : problem.goal) {
    std::string key = lit.atom.predicate;
    for (const auto& term : lit.atom.args) key += " " + term.constant;
    if ((facts.count(key) > 0) == lit.negated) return false;
  }
  for (const auto& cmp : problem.goal_numeric) {
    auto lhs = eval(cmp.lhs, eval);
    auto rhs = eval(cmp.rhs, eval);
    if (!lhs || !rhs) return false;
    switch (cmp.op) {
      case pddl::CmpOp::Lt: if (!(*lhs < *rhs)) return false; break;
      case pddl::CmpOp::Le: if (!(*lhs <= *rhs)) return false; break;
      case pddl::CmpOp::Gt: if (!(*lhs > *rhs)) return false; break;
      case pddl::CmpOp::Ge: if (!(*lhs >= *rhs)) return false; break;
      case pddl::CmpOp::Eq: if (!(*lhs == *rhs)) return false; break;
    }
  }
  return true;
}

}  // namespace

std::string to_string(MissionPhase phase) {
  switch (phase) {
    case MissionPhase::Idle: return "Idle";
    case MissionPhase::Planning: return "Planning";
    case MissionPhase::Executing: return "Executing";
    case MissionPhase::Succeeded: return "Succeeded";
    case MissionPhase::Failed: return "Failed";
  }
  return "?";
}

std::string to_string(FeedbackStatus status) {
  switch (status) {
    case FeedbackStatus::Idle: return "Idle";
    case FeedbackStatus::Running: return "Running";
    case FeedbackStatus::Succeeded: return "Succeeded";
    case FeedbackStatus::Failed: return "Failed";
    case FeedbackStatus::Preempted: return "Preempted";
  }
  return "?";
}

ReasonerOutcome reasoner_step(kb::KnowledgeBase& knowledge, const MeasurementBatch& batch,
                              const std::optional<std::set<std::string>>& fd_old) {
  kb::update_measurements(knowledge, batch.qa, batch.ea, batch.component_status);
  ReasonerOutcome outcome;
  outcome.analysis = kb::analyze(knowledge);
  outcome.fd_new = outcome.analysis.available_designs;

  bool status_changed = false;
  for (auto& [id, objective] : knowledge.objectives) {
    const kb::ObjectiveStatus next = outcome.analysis.objectives_in_error.count(id)
                                         ? kb::ObjectiveStatus::InError
                                         : (kb::active_grounding(knowledge, id)
                                                ? kb::ObjectiveStatus::Ok
                                                : kb::ObjectiveStatus::Unknown);
    if (objective.status != next) {
      objective.status = next;
      status_changed = true;
    }
  }
  if (status_changed) ++knowledge.generation;

  if (!fd_old.has_value() || *fd_old != outcome.fd_new) {
    AdaptationEvent event;
    event.kind = EventKind::FdSetChanged;
    if (fd_old.has_value()) {
      std::set_symmetric_difference(fd_old->begin(), fd_old->end(), outcome.fd_new.begin(),
                                    outcome.fd_new.end(), std::back_inserter(event.details));
    } else {
      event.details.assign(outcome.fd_new.begin(), outcome.fd_new.end());
    }
    event.kb_generation = outcome.analysis.generation;
    outcome.events.push_back(std::move(event));
  }
  if (!outcome.analysis.objectives_in_error.empty()) {
    AdaptationEvent event;
    event.kind = EventKind::ObjectiveError;
    event.details.assign(outcome.analysis.objectives_in_error.begin(),
                         outcome.analysis.objectives_in_error.end());
    event.kb_generation = outcome.analysis.generation;
    outcome.events.push_back(std::move(event));
  }
  return outcome;
}

pddl::Problem sync_problem_with_world(const pddl::Problem& problem, const WorldSnapshot& snapshot) {
  for (const auto& atom : snapshot.atoms) {
    for (const auto& arg : atom.args) {
      if (!problem.object_type(arg)) {
        throw std::invalid_argument("sync: snapshot references unknown object \"" + arg + "\"");
      }
    }
  }

  pddl::Problem next = problem;
  next.init.clear();
  bool spliced = snapshot.atoms.empty();
  for (const auto& atom : problem.init) {
    if (snapshot.dynamic_predicates.count(atom.predicate)) {
      if (!spliced) {
        for (const auto& replacement : snapshot.atoms) next.init.push_back(replacement);
        spliced = true;
      }
      continue;
    }
    next.init.push_back(atom);
  }
  if (!spliced) {
    for (const auto& replacement : snapshot.atoms) next.init.push_back(replacement);
  }

  next.init_fluents.clear();
  std::set<std::string> replaced;
  for (const auto& init : problem.init_fluents) {
    if (snapshot.dynamic_fluents.count(init.fluent.predicate)) {
      bool emitted = false;
      for (const auto& replacement : snapshot.fluents) {
        if (replacement.fluent.key() == init.fluent.key()) {
          next.init_fluents.push_back(replacement);
          replaced.insert(replacement.fluent.key());
          emitted = true;
          break;
        }
      }
      (void)emitted;  // a dynamic fluent absent from the snapshot drops out
      continue;
    }
    next.init_fluents.push_back(init);
  }
  for (const auto& replacement : snapshot.fluents) {
    if (!replaced.count(replacement.fluent.key())) next.init_fluents.push_back(replacement);
  }
  return next;
}

nlohmann::ordered_json batch_to_json(const MeasurementBatch& batch) {
  ordered_json out;
  out["source"] = batch.source;
  out["sequence"] = batch.sequence;
  out["qa"] = ordered_json::object();
  for (const auto& [k, v] : batch.qa) out["qa"][k] = v;
  out["ea"] = ordered_json::object();
  for (const auto& [k, v] : batch.ea) out["ea"][k] = v;
  out["components"] = ordered_json::object();
  for (const auto& [k, v] : batch.component_status) out["components"][k] = kb::to_string(v);
  out["context_ea"] = ordered_json::object();
  for (const auto& [ctx, reqs] : batch.context_ea) {
    out["context_ea"][ctx] = ordered_json::object();
    for (const auto& [k, v] : reqs) out["context_ea"][ctx][k] = v;
  }
  return out;
}

MeasurementBatch batch_from_json(const nlohmann::json& doc) {
  MeasurementBatch batch;
  batch.source = doc.at("source").get<std::string>();
  batch.sequence = doc.at("sequence").get<std::uint64_t>();
  for (const auto& item : doc.at("qa").items()) batch.qa[item.key()] = item.value().get<double>();
  for (const auto& item : doc.at("ea").items()) batch.ea[item.key()] = item.value().get<double>();
  for (const auto& item : doc.at("components").items()) {
    batch.component_status[item.key()] = item.value().get<std::string>() == "Available"
                                             ? kb::ComponentStatus::Available
                                             : kb::ComponentStatus::Failed;
  }
  for (const auto& ctx : doc.at("context_ea").items()) {
    for (const auto& item : ctx.value().items()) {
      batch.context_ea[ctx.key()][item.key()] = item.value().get<double>();
    }
  }
  return batch;
}

nlohmann::ordered_json snapshot_to_json(const WorldSnapshot& snapshot) {
  ordered_json out;
  out["atoms"] = ordered_json::array();
  for (const auto& atom : snapshot.atoms) {
    ordered_json entry = ordered_json::array();
    entry.push_back(atom.predicate);
    for (const auto& arg : atom.args) entry.push_back(arg);
    out["atoms"].push_back(std::move(entry));
  }
  out["fluents"] = ordered_json::array();
  for (const auto& init : snapshot.fluents) {
    ordered_json entry;
    ordered_json fluent = ordered_json::array();
    fluent.push_back(init.fluent.predicate);
    for (const auto& arg : init.fluent.args) fluent.push_back(arg);
    entry["fluent"] = std::move(fluent);
    entry["value"] = init.value;
    out["fluents"].push_back(std::move(entry));
  }
  out["dynamic_predicates"] = set_to_json(snapshot.dynamic_predicates);
  out["dynamic_fluents"] = set_to_json(snapshot.dynamic_fluents);
  return out;
}

WorldSnapshot snapshot_from_json(const nlohmann::json& doc) {
  WorldSnapshot snapshot;
  for (const auto& entry : doc.at("atoms")) {
    pddl::GroundAtom atom;
    atom.predicate = entry.at(0).get<std::string>();
    for (std::size_t i = 1; i < entry.size(); ++i) atom.args.push_back(entry.at(i).get<std::string>());
    snapshot.atoms.push_back(std::move(atom));
  }
  for (const auto& entry : doc.at("fluents")) {
    pddl::FluentInit init;
    const auto& fluent = entry.at("fluent");
    init.fluent.predicate = fluent.at(0).get<std::string>();
    for (std::size_t i = 1; i < fluent.size(); ++i) {
      init.fluent.args.push_back(fluent.at(i).get<std::string>());
    }
    init.value = entry.at("value").get<double>();
    snapshot.fluents.push_back(std::move(init));
  }
  for (const auto& name : doc.at("dynamic_predicates")) {
    snapshot.dynamic_predicates.insert(name.get<std::string>());
  }
  for (const auto& name : doc.at("dynamic_fluents")) {
    snapshot.dynamic_fluents.insert(name.get<std::string>());
  }
  return snapshot;
}

MissionResult run_mission(const pddl::Domain& domain, const pddl::Problem& initial_problem,
                          kb::KnowledgeBase knowledge, Executor& executor,
                          const EngineConfig& config) {
  {
    auto diagnostics = pddl::require_linking_pattern(domain, initial_problem);
    if (!diagnostics.empty()) {
      throw std::invalid_argument("run_mission: linking diagnostics not empty: " +
                                  diagnostics.front().render());
    }
  }

  MissionResult result;
  MissionStatus& status = result.final_status;
  pddl::Problem problem = initial_problem;
  std::optional<std::set<std::string>> fd_old;
  std::optional<planner::Plan> current_plan;
  std::size_t step_index = 0;
  std::map<std::string, std::map<std::string, double>> latest_context;
  bool outstanding = false;
  bool first_iteration = true;
  std::vector<std::string> outstanding_objectives;
  std::optional<std::vector<std::string>> executor_failure;

  auto log = [&](const std::string& kind, ordered_json payload) {
    result.trace.append(executor.now(), kind, std::move(payload));
  };

  auto retire_outstanding = [&]() {
    for (const auto& objective : outstanding_objectives) {
      kb::retire_objective(knowledge, objective);
    }
    outstanding_objectives.clear();
  };

  auto finish = [&](MissionOutcome outcome, const std::string& reason,
                    const WorldSnapshot* snapshot) {
    result.outcome = outcome;
    result.failure_reason = reason;
    result.replan_count = std::max(0, result.plan_count - 1);
    status.phase =
        outcome == MissionOutcome::Succeeded ? MissionPhase::Succeeded : MissionPhase::Failed;
    status.current_step.reset();
    status.replan_count = result.replan_count;
    ordered_json payload;
    payload["outcome"] = outcome == MissionOutcome::Succeeded ? "Succeeded" : "Failed";
    payload["reason"] = reason;
    payload["replan_count"] = result.replan_count;
    payload["plans"] = result.plan_count;
    if (snapshot != nullptr) payload["snapshot"] = snapshot_to_json(*snapshot);
    log("mission_end", std::move(payload));
    return result;
  };

  executor.start();

  while (true) {
    // Poll the outstanding action first so completion measurements are
    // already queued when this iteration's reasoner step runs.
    if (outstanding) {
      const Feedback feedback = executor.poll();
      if (feedback.status == FeedbackStatus::Succeeded ||
          feedback.status == FeedbackStatus::Failed ||
          feedback.status == FeedbackStatus::Preempted) {
        ordered_json payload;
        payload["step"] = step_index;
        payload["outcome"] = to_string(feedback.status);
        payload["reason"] = feedback.reason;
        log("action_end", std::move(payload));
        if (feedback.status == FeedbackStatus::Failed) {
          executor_failure = outstanding_objectives;
        }
        retire_outstanding();
        outstanding = false;
        status.phase = MissionPhase::Idle;
        status.current_step.reset();
        if (feedback.status == FeedbackStatus::Succeeded) ++step_index;
      }
    }

    // Drain all pending measurements into one reasoner step.
    const std::vector<MeasurementBatch> batches = executor.drain_measurements();
    std::vector<AdaptationEvent> events;
    if (!batches.empty() || first_iteration) {
      for (const auto& batch : batches) log("measurement", batch_to_json(batch));
      for (const auto& batch : batches) {
        for (const auto& [ctx, reqs] : batch.context_ea) latest_context[ctx] = reqs;
      }
      const bool changed_baseline = fd_old.has_value();
      ReasonerOutcome outcome = reasoner_step(knowledge, merge_batches(batches), fd_old);
      ordered_json analysis;
      analysis["generation"] = outcome.analysis.generation;
      analysis["available"] = set_to_json(outcome.analysis.available_designs);
      analysis["objectives_in_error"] = set_to_json(outcome.analysis.objectives_in_error);
      analysis["changed"] =
          !changed_baseline || std::any_of(outcome.events.begin(), outcome.events.end(),
                                           [](const AdaptationEvent& e) {
                                             return e.kind == EventKind::FdSetChanged;
                                           });
      log("analysis", std::move(analysis));
      events = std::move(outcome.events);
      fd_old = std::move(outcome.fd_new);
      first_iteration = false;
    }
    if (executor_failure.has_value()) {
      AdaptationEvent event;
      event.kind = EventKind::ObjectiveError;
      event.details = *executor_failure;
      event.kb_generation = knowledge.generation;
      event.source = "executor";
      events.push_back(std::move(event));
      executor_failure.reset();
    }
    for (const auto& event : events) log("event", event_to_json(event));

    if (!events.empty()) {
      if (outstanding) {
        executor.preempt();
        const Feedback feedback = executor.poll();
        ordered_json payload;
        payload["step"] = step_index;
        payload["outcome"] = to_string(feedback.status);
        payload["reason"] = feedback.reason;
        log("action_end", std::move(payload));
        retire_outstanding();
        outstanding = false;
      }

      status.phase = MissionPhase::Planning;
      status.current_step.reset();
      const WorldSnapshot world = executor.snapshot();
      problem = sync_problem_with_world(problem, world);
      std::set<std::pair<std::string, std::string>> contextual;
      ordered_json contextual_json = ordered_json::object();
      for (const auto& [ctx, reqs] : latest_context) {
        const std::set<std::string> allowed = kb::contextual_availability(knowledge, reqs);
        contextual_json[ctx] = set_to_json(allowed);
        for (const auto& design : allowed) contextual.insert({design, ctx});
      }
      problem = pddl::update_problem(problem, *fd_old, contextual);

      ordered_json request;
      request["fd_available"] = set_to_json(*fd_old);
      request["contextual"] = std::move(contextual_json);
      request["snapshot"] = snapshot_to_json(world);
      log("plan_request", std::move(request));

      const ground::GroundTask task = ground::ground(domain, problem);
      planner::PlanOutcome outcome = planner::plan(task, config.planner);
      if (std::holds_alternative<planner::Unsolvable>(outcome)) {
        const auto& unsolvable = std::get<planner::Unsolvable>(outcome);
        ordered_json payload;
        payload["unreachable_goal_atoms"] = unsolvable.unreachable_goal_atoms;
        log("event", ordered_json{{"kind", "Unsolvable"},
                                  {"details", unsolvable.unreachable_goal_atoms},
                                  {"kb_generation", knowledge.generation},
                                  {"source", "planner"}});
        return finish(MissionOutcome::Failed, "no-plan", &world);
      }
      if (std::holds_alternative<planner::ResourceCapExceeded>(outcome)) {
        return finish(MissionOutcome::Failed, "resource-cap", &world);
      }
      current_plan = std::get<planner::Plan>(std::move(outcome));
      ++result.plan_count;
      step_index = 0;
      status.current_plan = *current_plan;
      status.replan_count = std::max(0, result.plan_count - 1);
      status.phase = MissionPhase::Idle;
      log("plan", planner::plan_to_json(*current_plan));
      continue;
    }

    if (!outstanding) {
      if (!current_plan.has_value()) {
        return finish(MissionOutcome::Failed, "no-plan-requested", nullptr);
      }
      if (step_index >= current_plan->steps.size()) {
        const WorldSnapshot world = executor.snapshot();
        const pddl::Problem final_state = sync_problem_with_world(problem, world);
        const bool ok = goal_holds(final_state);
        return finish(ok ? MissionOutcome::Succeeded : MissionOutcome::Failed,
                      ok ? "" : "goal-unsatisfied", &world);
      }
      const planner::PlanStep& step = current_plan->steps[step_index];
      for (const auto& [function, design] : step.selected_designs) {
        const std::string objective = kb::ensure_objective(knowledge, function);
        kb::set_grounding(knowledge, objective, design);
        outstanding_objectives.push_back(objective);
        ordered_json payload;
        payload["objective"] = objective;
        payload["function"] = function;
        payload["design"] = design;
        log("grounding", std::move(payload));
      }
      executor.request_action(step);
      status.phase = MissionPhase::Executing;
      status.current_step = step_index;
      ordered_json payload;
      payload["step"] = step_index;
      payload["action"] = step.action;
      payload["args"] = step.args;
      payload["designs"] = ordered_json::object();
      for (const auto& [function, design] : step.selected_designs) {
        payload["designs"][function] = design;
      }
      log("action_start", std::move(payload));
      outstanding = true;
    }
  }
}

}  // namespace coadapt::engine
