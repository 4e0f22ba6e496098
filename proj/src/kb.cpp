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

#include "coadapt/kb.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <sstream>

namespace coadapt::kb {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& kind, const std::string& id,
                       const std::string& where, const std::string& what) {
  throw KbError(kind, id, where + ": " + what);
}

void check_keys(const json& obj, const std::string& where,
                const std::vector<std::string>& allowed,
                const std::vector<std::string>& required) {
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      fail("schema", item.key(), where, "unknown key \"" + item.key() + "\"");
    }
  }
  for (const auto& key : required) {
    if (!obj.contains(key)) {
      fail("schema", key, where, "missing required key \"" + key + "\"");
    }
  }
}

double as_number(const json& value, const std::string& where) {
  if (!value.is_number()) fail("schema", where, where, "expected a number");
  return value.get<double>();
}

std::string as_string(const json& value, const std::string& where) {
  if (!value.is_string()) fail("schema", where, where, "expected a string");
  return value.get<std::string>();
}

bool holds(Comparator cmp, double measured, double threshold) {
  switch (cmp) {
    case Comparator::Ge: return measured >= threshold;
    case Comparator::Gt: return measured > threshold;
    case Comparator::Le: return measured <= threshold;
    case Comparator::Lt: return measured < threshold;
  }
  return false;
}

bool design_ok(const KnowledgeBase& kb, const FunctionDesign& design) {
  for (const auto& component_id : design.required_components) {
    if (kb.components.at(component_id).status != ComponentStatus::Available) return false;
  }
  for (const auto& req : design.qa_requirements) {
    auto it = kb.measurements.find(req.attribute);
    if (it == kb.measurements.end()) continue;  // not measured yet: satisfied
    if (!holds(req.comparator, it->second, req.threshold)) return false;
  }
  return true;
}

}  // namespace

KbError::KbError(std::string kind, std::string id, std::string message)
    : std::runtime_error(std::move(message)), kind_(std::move(kind)), id_(std::move(id)) {}

std::string to_string(AttrKind kind) {
  return kind == AttrKind::Quality ? "quality" : "environment";
}

std::string to_string(ComponentStatus status) {
  return status == ComponentStatus::Available ? "Available" : "Failed";
}

std::string to_string(ObjectiveStatus status) {
  switch (status) {
    case ObjectiveStatus::Ok: return "Ok";
    case ObjectiveStatus::InError: return "InError";
    default: return "Unknown";
  }
}

std::string to_string(Comparator cmp) {
  switch (cmp) {
    case Comparator::Ge: return ">=";
    case Comparator::Gt: return ">";
    case Comparator::Le: return "<=";
    case Comparator::Lt: return "<";
  }
  return "?";
}

Comparator comparator_from_string(const std::string& text) {
  if (text == ">=") return Comparator::Ge;
  if (text == ">") return Comparator::Gt;
  if (text == "<=") return Comparator::Le;
  if (text == "<") return Comparator::Lt;
  throw KbError("schema", text, "comparator: expected one of >=, >, <=, < but got \"" + text + "\"");
}

KnowledgeBase load_kb(const std::string& text, const std::string& source_name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("schema", source_name, source_name, e.what());
  }
  if (!doc.is_object()) fail("schema", source_name, source_name, "top level must be an object");
  check_keys(doc, source_name,
             {"functions", "components", "attribute_types", "function_designs"},
             {"functions", "components", "attribute_types", "function_designs"});

  KnowledgeBase kb;

  for (const auto& entry : doc["functions"]) {
    const std::string where = source_name + ":functions";
    check_keys(entry, where, {"id"}, {"id"});
    FunctionSpec fn{as_string(entry["id"], where)};
    if (!kb.functions.emplace(fn.id, fn).second) {
      fail("duplicate", fn.id, where, "duplicate function id \"" + fn.id + "\"");
    }
  }

  for (const auto& entry : doc["components"]) {
    const std::string where = source_name + ":components";
    check_keys(entry, where, {"id", "status"}, {"id"});
    ComponentSpec comp;
    comp.id = as_string(entry["id"], where);
    if (entry.contains("status")) {
      const std::string status = as_string(entry["status"], where);
      if (status == "available")
        comp.status = ComponentStatus::Available;
      else if (status == "failed")
        comp.status = ComponentStatus::Failed;
      else
        fail("schema", comp.id, where, "status must be \"available\" or \"failed\"");
    }
    if (!kb.components.emplace(comp.id, comp).second) {
      fail("duplicate", comp.id, where, "duplicate component id \"" + comp.id + "\"");
    }
  }

  for (const auto& entry : doc["attribute_types"]) {
    const std::string where = source_name + ":attribute_types";
    check_keys(entry, where, {"id", "kind", "unit"}, {"id", "kind"});
    AttributeType attr;
    attr.id = as_string(entry["id"], where);
    const std::string kind = as_string(entry["kind"], where);
    if (kind == "quality")
      attr.kind = AttrKind::Quality;
    else if (kind == "environment")
      attr.kind = AttrKind::Environment;
    else
      fail("schema", attr.id, where, "kind must be \"quality\" or \"environment\"");
    if (entry.contains("unit")) attr.unit = as_string(entry["unit"], where);
    if (!kb.attribute_types.emplace(attr.id, attr).second) {
      fail("duplicate", attr.id, where, "duplicate attribute id \"" + attr.id + "\"");
    }
  }

  for (const auto& entry : doc["function_designs"]) {
    const std::string where = source_name + ":function_designs";
    check_keys(entry, where,
               {"id", "solves", "required_components", "qa_expected", "qa_requirements",
                "ea_capabilities"},
               {"id", "solves", "required_components", "qa_expected", "qa_requirements",
                "ea_capabilities"});
    FunctionDesign design;
    design.id = as_string(entry["id"], where);
    const std::string at = where + ":" + design.id;
    design.solves = as_string(entry["solves"], at);
    if (!kb.functions.count(design.solves)) {
      fail("dangling", design.solves, at, "design solves undeclared function \"" + design.solves + "\"");
    }
    for (const auto& comp : entry["required_components"]) {
      const std::string component_id = as_string(comp, at);
      if (!kb.components.count(component_id)) {
        fail("dangling", component_id, at,
             "design requires undeclared component \"" + component_id + "\"");
      }
      design.required_components.insert(component_id);
    }
    for (const auto& item : entry["qa_expected"].items()) {
      if (!kb.attribute_types.count(item.key())) {
        fail("dangling", item.key(), at, "qa_expected names undeclared attribute \"" + item.key() + "\"");
      }
      design.qa_expected[item.key()] = as_number(item.value(), at);
    }
    for (const auto& req_json : entry["qa_requirements"]) {
      check_keys(req_json, at, {"attribute", "comparator", "threshold"},
                 {"attribute", "comparator", "threshold"});
      QaRequirement req;
      req.attribute = as_string(req_json["attribute"], at);
      if (!kb.attribute_types.count(req.attribute)) {
        fail("dangling", req.attribute, at,
             "qa_requirement names undeclared attribute \"" + req.attribute + "\"");
      }
      req.comparator = comparator_from_string(as_string(req_json["comparator"], at));
      req.threshold = as_number(req_json["threshold"], at);
      design.qa_requirements.push_back(req);
    }
    for (const auto& item : entry["ea_capabilities"].items()) {
      auto attr = kb.attribute_types.find(item.key());
      if (attr == kb.attribute_types.end()) {
        fail("dangling", item.key(), at,
             "ea_capabilities names undeclared attribute \"" + item.key() + "\"");
      }
      if (attr->second.kind != AttrKind::Environment) {
        fail("schema", item.key(), at,
             "ea_capabilities key \"" + item.key() + "\" is not an environment attribute");
      }
      design.ea_capabilities[item.key()] = as_number(item.value(), at);
    }
    if (!kb.designs.emplace(design.id, design).second) {
      fail("duplicate", design.id, where, "duplicate design id \"" + design.id + "\"");
    }
  }

  kb.generation = 0;
  return kb;
}

void update_measurements(KnowledgeBase& kb,
                         const std::map<std::string, double>& qa,
                         const std::map<std::string, double>& ea,
                         const std::map<std::string, ComponentStatus>& component_status) {
  // Validate everything first so a bad key leaves the KB untouched.
  for (const auto& [id, value] : qa) {
    (void)value;
    auto it = kb.attribute_types.find(id);
    if (it == kb.attribute_types.end() || it->second.kind != AttrKind::Quality) {
      throw KbError("unknown-id", id, "update: \"" + id + "\" is not a declared quality attribute");
    }
  }
  for (const auto& [id, value] : ea) {
    (void)value;
    auto it = kb.attribute_types.find(id);
    if (it == kb.attribute_types.end() || it->second.kind != AttrKind::Environment) {
      throw KbError("unknown-id", id, "update: \"" + id + "\" is not a declared environment attribute");
    }
  }
  for (const auto& [id, status] : component_status) {
    (void)status;
    if (!kb.components.count(id)) {
      throw KbError("unknown-id", id, "update: \"" + id + "\" is not a declared component");
    }
  }

  for (const auto& [id, value] : qa) kb.measurements[id] = value;
  for (const auto& [id, value] : ea) kb.measurements[id] = value;
  for (const auto& [id, status] : component_status) kb.components[id].status = status;
  ++kb.generation;
}

AnalysisResult analyze(const KnowledgeBase& kb) {
  AnalysisResult result;
  result.generation = kb.generation;
  for (const auto& [id, design] : kb.designs) {
    if (design_ok(kb, design)) result.available_designs.insert(id);
  }
  for (const auto& grounding : kb.groundings) {
    if (!grounding.active) continue;
    if (!result.available_designs.count(grounding.design)) {
      result.objectives_in_error.insert(grounding.objective);
    }
  }
  return result;
}

std::set<std::string> contextual_availability(
    const KnowledgeBase& kb, const std::map<std::string, double>& context_requirements) {
  for (const auto& [id, value] : context_requirements) {
    (void)value;
    auto it = kb.attribute_types.find(id);
    if (it == kb.attribute_types.end() || it->second.kind != AttrKind::Environment) {
      throw KbError("unknown-id", id, "context: \"" + id + "\" is not a declared environment attribute");
    }
  }
  std::set<std::string> result;
  for (const auto& id : analyze(kb).available_designs) {
    const FunctionDesign& design = kb.designs.at(id);
    bool ok = true;
    for (const auto& [attr, required] : context_requirements) {
      auto cap = design.ea_capabilities.find(attr);
      const double capability = cap == design.ea_capabilities.end() ? 0.0 : cap->second;
      if (capability < required) {
        ok = false;
        break;
      }
    }
    if (ok) result.insert(id);
  }
  return result;
}

std::string ensure_objective(KnowledgeBase& kb, const std::string& function_id) {
  if (!kb.functions.count(function_id)) {
    throw KbError("unknown-id", function_id, "objective: unknown function \"" + function_id + "\"");
  }
  const std::string objective_id = "o_" + function_id;
  if (!kb.objectives.count(objective_id)) {
    kb.objectives[objective_id] = Objective{objective_id, function_id, ObjectiveStatus::Unknown};
    ++kb.generation;
  }
  return objective_id;
}

void set_grounding(KnowledgeBase& kb, const std::string& objective_id,
                   const std::string& design_id) {
  auto objective = kb.objectives.find(objective_id);
  if (objective == kb.objectives.end()) {
    throw KbError("unknown-id", objective_id, "grounding: unknown objective \"" + objective_id + "\"");
  }
  auto design = kb.designs.find(design_id);
  if (design == kb.designs.end()) {
    throw KbError("unknown-id", design_id, "grounding: unknown design \"" + design_id + "\"");
  }
  if (design->second.solves != objective->second.function) {
    throw KbError("function-mismatch", design_id,
                  "grounding: design \"" + design_id + "\" solves \"" + design->second.solves +
                      "\", objective \"" + objective_id + "\" requires \"" +
                      objective->second.function + "\"");
  }
  for (auto& grounding : kb.groundings) {
    if (grounding.objective == objective_id) grounding.active = false;
  }
  kb.groundings.push_back(FunctionGrounding{objective_id, design_id, true});
  objective->second.status = ObjectiveStatus::Unknown;
  ++kb.generation;
}

void retire_objective(KnowledgeBase& kb, const std::string& objective_id) {
  if (!kb.objectives.erase(objective_id)) {
    throw KbError("unknown-id", objective_id, "retire: unknown objective \"" + objective_id + "\"");
  }
  kb.groundings.erase(
      std::remove_if(kb.groundings.begin(), kb.groundings.end(),
                     [&](const FunctionGrounding& g) { return g.objective == objective_id; }),
      kb.groundings.end());
  ++kb.generation;
}

std::optional<FunctionGrounding> active_grounding(const KnowledgeBase& kb,
                                                  const std::string& objective_id) {
  for (const auto& grounding : kb.groundings) {
    if (grounding.active && grounding.objective == objective_id) return grounding;
  }
  return std::nullopt;
}

}  // namespace coadapt::kb
