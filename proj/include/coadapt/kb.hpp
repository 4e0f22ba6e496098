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
/// Architectural knowledge base: design-time model of functions, function
/// designs, components and attributes, plus the runtime objectives and
/// groundings, and the rule evaluation that decides which designs are
/// currently available and which objectives are in error.
///
/// Single-writer: all mutations go through one owner (the engine loop).
/// analyze and contextual_availability are pure and safe to call from
/// anywhere as long as nobody mutates concurrently; nothing here locks.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace coadapt::kb {

enum class AttrKind { Quality, Environment };
enum class ComponentStatus { Available, Failed };
enum class ObjectiveStatus { Ok, InError, Unknown };
enum class Comparator { Ge, Gt, Le, Lt };

std::string to_string(AttrKind kind);
std::string to_string(ComponentStatus status);
std::string to_string(ObjectiveStatus status);
std::string to_string(Comparator cmp);
Comparator comparator_from_string(const std::string& text);

struct FunctionSpec {
  std::string id;
};

struct ComponentSpec {
  std::string id;
  ComponentStatus status = ComponentStatus::Available;
};

struct AttributeType {
  std::string id;
  AttrKind kind = AttrKind::Quality;
  std::string unit;
};

struct QaRequirement {
  std::string attribute;
  Comparator comparator = Comparator::Ge;
  double threshold = 0.0;
};

/// One configuration alternative for a function: which components it needs,
/// what it is expected to cost, what it requires from measurements, and what
/// environment levels it can handle.
struct FunctionDesign {
  std::string id;
  std::string solves;
  std::set<std::string> required_components;
  std::map<std::string, double> qa_expected;
  std::vector<QaRequirement> qa_requirements;
  std::map<std::string, double> ea_capabilities;
};

struct Objective {
  std::string id;
  std::string function;
  ObjectiveStatus status = ObjectiveStatus::Unknown;
};

struct FunctionGrounding {
  std::string objective;
  std::string design;
  bool active = false;
};

struct AnalysisResult {
  std::set<std::string> available_designs;
  std::set<std::string> objectives_in_error;
  std::uint64_t generation = 0;
};

class KbError : public std::runtime_error {
 public:
  KbError(std::string kind, std::string id, std::string message);

  const std::string& kind() const { return kind_; }
  const std::string& offending_id() const { return id_; }

 private:
  std::string kind_;
  std::string id_;
};

struct KnowledgeBase {
  std::map<std::string, FunctionSpec> functions;
  std::map<std::string, ComponentSpec> components;
  std::map<std::string, AttributeType> attribute_types;
  std::map<std::string, FunctionDesign> designs;

  // Runtime elements. At most one active grounding per objective.
  std::map<std::string, Objective> objectives;
  std::vector<FunctionGrounding> groundings;
  std::map<std::string, double> measurements;

  // Bumped exactly once per mutating call; analyze() is pure, so equal
  // generations imply equal results.
  std::uint64_t generation = 0;
};

/// Parses and fully links a KB file (UTF-8 JSON, documented in
/// docs/kb_format.md). Unknown keys, duplicate ids and dangling references
/// are rejected with the offending id and location.
KnowledgeBase load_kb(const std::string& text, const std::string& source_name = "<kb>");

/// Writes the supplied measurement values and component statuses. Every key
/// must be declared; an unknown key rejects the whole call without applying
/// anything. Bumps the generation once, also for empty payloads.
void update_measurements(KnowledgeBase& kb,
                         const std::map<std::string, double>& qa,
                         const std::map<std::string, double>& ea,
                         const std::map<std::string, ComponentStatus>& component_status);

/// Rule evaluation over the current state. A design is available iff all of
/// its required components are Available and all of its qa_requirements hold
/// against the latest measurements (an attribute with no measurement yet
/// counts as satisfied). An objective is in error iff its active grounding's
/// design fails one of those checks. Pure.
AnalysisResult analyze(const KnowledgeBase& kb);

/// Filters analyze(kb).available_designs against per-context environment
/// requirements: a design passes iff ea_capabilities[k] >= requirement for
/// every requested key k (missing capability counts as 0). Keys must be
/// declared Environment attributes.
std::set<std::string> contextual_availability(
    const KnowledgeBase& kb, const std::map<std::string, double>& context_requirements);

/// Creates the objective if it does not exist yet and returns its id
/// ("o_" + function id).
std::string ensure_objective(KnowledgeBase& kb, const std::string& function_id);

/// Deactivates any previous grounding for the objective, activates the new
/// one and resets the objective status to Unknown. The design must solve the
/// objective's function.
void set_grounding(KnowledgeBase& kb, const std::string& objective_id,
                   const std::string& design_id);

/// Removes the objective and its groundings.
void retire_objective(KnowledgeBase& kb, const std::string& objective_id);

/// Active grounding for an objective, if any.
std::optional<FunctionGrounding> active_grounding(const KnowledgeBase& kb,
                                                  const std::string& objective_id);

}  // namespace coadapt::kb
