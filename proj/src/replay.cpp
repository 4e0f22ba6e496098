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

#include <optional>
#include <stdexcept>

#include "coadapt/engine.hpp"

namespace coadapt::engine {

ReplayExecutor::ReplayExecutor(const trace::Trace& recorded) {
  for (const auto& event : recorded.events()) {
    if (event.kind == "measurement") {
      script_.push_back(Item{Item::Kind::Measurement, event.sim_time, event.payload});
    } else if (event.kind == "action_start") {
      script_.push_back(Item{Item::Kind::ActionStart, event.sim_time, event.payload});
    } else if (event.kind == "action_end") {
      script_.push_back(Item{Item::Kind::ActionEnd, event.sim_time, event.payload});
    } else if (event.kind == "plan_request" || event.kind == "mission_end") {
      if (event.payload.contains("snapshot")) {
        script_.push_back(Item{Item::Kind::Snapshot, event.sim_time, event.payload["snapshot"]});
      }
    }
  }
}

void ReplayExecutor::start() {}

void ReplayExecutor::request_action(const planner::PlanStep& step) {
  if (cursor_ >= script_.size() || script_[cursor_].kind != Item::Kind::ActionStart) {
    throw std::runtime_error("replay diverged: unexpected action request " + step.action);
  }
  const auto& payload = script_[cursor_].payload;
  if (payload.at("action").get<std::string>() != step.action) {
    throw std::runtime_error("replay diverged: requested " + step.action + ", recorded " +
                             payload.at("action").get<std::string>());
  }
  now_ = script_[cursor_].sim_time;
  ++cursor_;
}

Feedback ReplayExecutor::poll() {
  if (cursor_ >= script_.size()) {
    throw std::runtime_error("replay diverged: poll past end of recording");
  }
  const Item& item = script_[cursor_];
  if (item.kind == Item::Kind::Measurement) {
    return Feedback{FeedbackStatus::Running, ""};
  }
  if (item.kind == Item::Kind::ActionEnd) {
    now_ = item.sim_time;
    ++cursor_;
    const std::string outcome = item.payload.at("outcome").get<std::string>();
    Feedback feedback;
    feedback.status = outcome == "Succeeded"   ? FeedbackStatus::Succeeded
                      : outcome == "Preempted" ? FeedbackStatus::Preempted
                                               : FeedbackStatus::Failed;
    feedback.reason = item.payload.at("reason").get<std::string>();
    return feedback;
  }
  throw std::runtime_error("replay diverged: poll hit a non-action item");
}

void ReplayExecutor::preempt() {
  // The recorded Preempted action_end is served by the next poll().
}

std::vector<MeasurementBatch> ReplayExecutor::drain_measurements() {
  // One recorded drain group is one burst of measurements sharing a boundary
  // timestamp; later groups belong to later polls.
  std::vector<MeasurementBatch> batches;
  std::optional<double> group_time;
  while (cursor_ < script_.size() && script_[cursor_].kind == Item::Kind::Measurement) {
    if (group_time.has_value() && script_[cursor_].sim_time != *group_time) break;
    group_time = script_[cursor_].sim_time;
    now_ = script_[cursor_].sim_time;
    batches.push_back(batch_from_json(script_[cursor_].payload));
    ++cursor_;
  }
  return batches;
}

WorldSnapshot ReplayExecutor::snapshot() const {
  if (cursor_ >= script_.size() || script_[cursor_].kind != Item::Kind::Snapshot) {
    throw std::runtime_error("replay diverged: snapshot requested out of turn");
  }
  now_ = script_[cursor_].sim_time;
  return snapshot_from_json(script_[cursor_++].payload);
}

}  // namespace coadapt::engine
