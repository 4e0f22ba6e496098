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

#include "coadapt/trace.hpp"

#include <sstream>
#include <stdexcept>

namespace coadapt::trace {

void Trace::append(double sim_time, const std::string& kind, nlohmann::ordered_json payload) {
  TraceEvent event;
  event.seq = events_.size();
  event.sim_time = sim_time;
  event.kind = kind;
  event.payload = std::move(payload);
  events_.push_back(std::move(event));
}

std::vector<const TraceEvent*> Trace::of_kind(const std::string& kind) const {
  std::vector<const TraceEvent*> result;
  for (const auto& event : events_) {
    if (event.kind == kind) result.push_back(&event);
  }
  return result;
}

std::size_t Trace::count(const std::string& kind) const { return of_kind(kind).size(); }

std::string Trace::to_ndjson() const {
  std::ostringstream out;
  for (const auto& event : events_) {
    nlohmann::ordered_json line;
    line["seq"] = event.seq;
    line["sim_time"] = event.sim_time;
    line["kind"] = event.kind;
    line["payload"] = event.payload;
    out << line.dump() << "\n";
  }
  return out.str();
}

Trace Trace::from_ndjson(const std::string& text) {
  Trace trace;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::ordered_json doc = nlohmann::ordered_json::parse(line);
    TraceEvent event;
    event.seq = doc.at("seq").get<std::uint64_t>();
    event.sim_time = doc.at("sim_time").get<double>();
    event.kind = doc.at("kind").get<std::string>();
    event.payload = doc.at("payload");
    trace.events_.push_back(std::move(event));
  }
  return trace;
}

}  // namespace coadapt::trace
