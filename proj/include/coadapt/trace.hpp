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
/// Append-only mission event log. One JSON object per line with the envelope
/// {seq, sim_time, kind, payload}; kinds: measurement, analysis, event,
/// plan_request, plan, grounding, action_start, action_end, mission_end.
/// Field names are stable (docs/trace_format.md) and golden-file tested.
/// Traces carry simulated time only, so equal runs serialize byte-equal.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace coadapt::trace {

struct TraceEvent {
  std::uint64_t seq = 0;
  double sim_time = 0.0;
  std::string kind;
  nlohmann::ordered_json payload;
};

class Trace {
 public:
  void append(double sim_time, const std::string& kind, nlohmann::ordered_json payload);

  const std::vector<TraceEvent>& events() const { return events_; }

  std::vector<const TraceEvent*> of_kind(const std::string& kind) const;
  std::size_t count(const std::string& kind) const;

  std::string to_ndjson() const;
  static Trace from_ndjson(const std::string& text);

 private:
  std::vector<TraceEvent> events_;
};

}  // namespace coadapt::trace
