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

#include <vector>

#include "coadapt/kb.hpp"
#include "coadapt/sim.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace coadapt;

namespace {

// Literal encoding of the six-design localization table: one function, four
// components, one quality attribute and two environment attributes.
const char* kTableKb = R"({
  "functions": [{"id": "f_localization"}],
  "components": [
    {"id": "c_lidar"}, {"id": "c_kinect"}, {"id": "c_camera"}, {"id": "c_flashlight"}
  ],
  "attribute_types": [
    {"id": "battery_usage", "kind": "quality", "unit": "percent"},
    {"id": "safety", "kind": "environment", "unit": "level"},
    {"id": "darkness", "kind": "environment", "unit": "level"}
  ],
  "function_designs": [
    {"id": "fd_AMCL_lidar", "solves": "f_localization", "required_components": ["c_lidar"],
     "qa_expected": {"battery_usage": 4}, "qa_requirements": [],
     "ea_capabilities": {"safety": 0.4, "darkness": 0}},
    {"id": "fd_AMCL_kinect", "solves": "f_localization", "required_components": ["c_kinect"],
     "qa_expected": {"battery_usage": 2}, "qa_requirements": [],
     "ea_capabilities": {"safety": 1.0, "darkness": 0}},
    {"id": "fd_MRPT_lidar", "solves": "f_localization", "required_components": ["c_lidar"],
     "qa_expected": {"battery_usage": 6}, "qa_requirements": [],
     "ea_capabilities": {"safety": 0.3, "darkness": 0}},
    {"id": "fd_MRPT_kinect", "solves": "f_localization", "required_components": ["c_kinect"],
     "qa_expected": {"battery_usage": 4}, "qa_requirements": [],
     "ea_capabilities": {"safety": 0.9, "darkness": 0}},
    {"id": "fd_aruco", "solves": "f_localization", "required_components": ["c_camera"],
     "qa_expected": {"battery_usage": 7}, "qa_requirements": [],
     "ea_capabilities": {"safety": 0.7, "darkness": -1}},
    {"id": "fd_aruco_with_light", "solves": "f_localization",
     "required_components": ["c_camera", "c_flashlight"],
     "qa_expected": {"battery_usage": 10}, "qa_requirements": [],
     "ea_capabilities": {"safety": 0.7, "darkness": 1}}
  ]
})";

kb::KnowledgeBase table_kb() { return kb::load_kb(kTableKb, "table.json"); }

// KB with a battery requirement, for the objective-error rule.
const char* kBatteryKb = R"({
  "functions": [{"id": "f_nav"}],
  "components": [{"id": "c_gps"}],
  "attribute_types": [
    {"id": "battery_level", "kind": "quality", "unit": "percent"}
  ],
  "function_designs": [
    {"id": "fd_fast", "solves": "f_nav", "required_components": ["c_gps"],
     "qa_expected": {}, "qa_requirements": [
       {"attribute": "battery_level", "comparator": ">=", "threshold": 50}
     ],
     "ea_capabilities": {}},
    {"id": "fd_slow", "solves": "f_nav", "required_components": ["c_gps"],
     "qa_expected": {}, "qa_requirements": [], "ea_capabilities": {}}
  ]
})";

}  // namespace

TEST_CASE("load_kb links the six-design table") {
  const auto knowledge = table_kb();
  CHECK(knowledge.designs.size() == 6);
  CHECK(knowledge.components.size() == 4);
  CHECK(knowledge.functions.size() == 1);
  CHECK(knowledge.attribute_types.size() == 3);
  CHECK(knowledge.designs.at("fd_AMCL_kinect").qa_expected.at("battery_usage") == 2);
  CHECK(knowledge.designs.at("fd_aruco").ea_capabilities.at("darkness") == -1);
  CHECK(knowledge.generation == 0);
}

TEST_CASE("load_kb accepts an empty designs section") {
  const auto knowledge = kb::load_kb(
      R"({"functions": [], "components": [], "attribute_types": [], "function_designs": []})");
  CHECK(knowledge.designs.empty());
}

TEST_CASE("load_kb rejects dangling references naming the id") {
  const char* text = R"({
    "functions": [{"id": "f"}],
    "components": [],
    "attribute_types": [],
    "function_designs": [
      {"id": "fd", "solves": "f", "required_components": ["c_ghost"],
       "qa_expected": {}, "qa_requirements": [], "ea_capabilities": {}}
    ]
  })";
  try {
    kb::load_kb(text);
    FAIL("expected a dangling-reference error");
  } catch (const kb::KbError& e) {
    CHECK(e.kind() == "dangling");
    CHECK(e.offending_id() == "c_ghost");
  }
}

TEST_CASE("load_kb rejects duplicates and unknown keys") {
  CHECK_THROWS_AS(kb::load_kb(R"({
    "functions": [{"id": "f"}, {"id": "f"}],
    "components": [], "attribute_types": [], "function_designs": []
  })"),
                  kb::KbError);
  CHECK_THROWS_AS(kb::load_kb(R"({
    "functions": [], "components": [], "attribute_types": [],
    "function_designs": [], "extras": []
  })"),
                  kb::KbError);
  CHECK_THROWS_AS(kb::load_kb(R"({
    "functions": [{"id": "f", "color": "red"}],
    "components": [], "attribute_types": [], "function_designs": []
  })"),
                  kb::KbError);
}

TEST_CASE("update_measurements writes values and bumps the generation once") {
  auto knowledge = kb::load_kb(kBatteryKb);
  kb::update_measurements(knowledge, {{"battery_level", 100}}, {}, {});
  CHECK(knowledge.measurements.at("battery_level") == 100);
  CHECK(knowledge.generation == 1);

  SUBCASE("empty payload still bumps the generation") {
    kb::update_measurements(knowledge, {}, {}, {});
    CHECK(knowledge.generation == 2);
    CHECK(knowledge.measurements.size() == 1);
  }

  SUBCASE("unknown ids are rejected atomically") {
    CHECK_THROWS_AS(
        kb::update_measurements(knowledge, {{"battery_level", 10}, {"bogus", 1}}, {}, {}),
        kb::KbError);
    CHECK(knowledge.measurements.at("battery_level") == 100);
    CHECK(knowledge.generation == 1);
  }

  SUBCASE("component failures arrive through the same call") {
    kb::update_measurements(knowledge, {}, {}, {{"c_gps", kb::ComponentStatus::Failed}});
    CHECK(knowledge.components.at("c_gps").status == kb::ComponentStatus::Failed);
  }
}

TEST_CASE("analyze applies the component rule") {
  auto knowledge = table_kb();
  CHECK(kb::analyze(knowledge).available_designs.size() == 6);

  kb::update_measurements(knowledge, {}, {}, {{"c_kinect", kb::ComponentStatus::Failed}});
  const auto result = kb::analyze(knowledge);
  CHECK(result.available_designs ==
        std::set<std::string>{"fd_AMCL_lidar", "fd_MRPT_lidar", "fd_aruco", "fd_aruco_with_light"});
  CHECK(result.objectives_in_error.empty());
}

TEST_CASE("analyze applies the measurement rule and flags grounded objectives") {
  auto knowledge = kb::load_kb(kBatteryKb);

  SUBCASE("unmeasured requirements count as satisfied") {
    CHECK(kb::analyze(knowledge).available_designs.count("fd_fast") == 1);
  }

  kb::update_measurements(knowledge, {{"battery_level", 40}}, {}, {});
  const std::string objective = kb::ensure_objective(knowledge, "f_nav");
  kb::set_grounding(knowledge, objective, "fd_fast");

  const auto result = kb::analyze(knowledge);
  CHECK(result.available_designs == std::set<std::string>{"fd_slow"});
  CHECK(result.objectives_in_error == std::set<std::string>{objective});

  SUBCASE("recovered measurement clears the error") {
    kb::update_measurements(knowledge, {{"battery_level", 80}}, {}, {});
    const auto recovered = kb::analyze(knowledge);
    CHECK(recovered.available_designs.size() == 2);
    CHECK(recovered.objectives_in_error.empty());
  }
}

TEST_CASE("set_grounding keeps exactly one active grounding per objective") {
  auto knowledge = table_kb();
  knowledge.objectives["o_localize"] = kb::Objective{"o_localize", "f_localization"};

  kb::set_grounding(knowledge, "o_localize", "fd_AMCL_kinect");
  auto active = kb::active_grounding(knowledge, "o_localize");
  REQUIRE(active.has_value());
  CHECK(active->design == "fd_AMCL_kinect");

  kb::set_grounding(knowledge, "o_localize", "fd_AMCL_lidar");
  active = kb::active_grounding(knowledge, "o_localize");
  REQUIRE(active.has_value());
  CHECK(active->design == "fd_AMCL_lidar");
  int active_count = 0;
  for (const auto& grounding : knowledge.groundings) {
    if (grounding.active) ++active_count;
  }
  CHECK(active_count == 1);
}

TEST_CASE("set_grounding rejects designs that solve another function") {
  auto knowledge = sim::build_uuv_fixture().knowledge;
  const std::string objective = kb::ensure_objective(knowledge, "f_search");
  CHECK_THROWS_AS(kb::set_grounding(knowledge, objective, "fd_speed_low"), kb::KbError);
  CHECK_THROWS_AS(kb::set_grounding(knowledge, "o_missing", "fd_speed_low"), kb::KbError);
  CHECK_THROWS_AS(kb::set_grounding(knowledge, objective, "fd_missing"), kb::KbError);
}

TEST_CASE("contextual_availability filters by capability") {
  auto knowledge = table_kb();

  CHECK(kb::contextual_availability(knowledge, {{"safety", 0.8}}) ==
        std::set<std::string>{"fd_AMCL_kinect", "fd_MRPT_kinect"});
  CHECK(kb::contextual_availability(knowledge, {}) == kb::analyze(knowledge).available_designs);

  SUBCASE("after the kinect failure nothing passes the safety bar") {
    kb::update_measurements(knowledge, {}, {}, {{"c_kinect", kb::ComponentStatus::Failed}});
    CHECK(kb::contextual_availability(knowledge, {{"safety", 0.8}}).empty());
  }

  SUBCASE("a missing capability counts as zero and the aruco override as negative") {
    const auto lit = kb::contextual_availability(knowledge, {{"darkness", 0.0}});
    CHECK(lit.count("fd_aruco") == 0);
    CHECK(lit.size() == 5);
    const auto dark = kb::contextual_availability(knowledge, {{"darkness", 1.0}});
    CHECK(dark == std::set<std::string>{"fd_aruco_with_light"});
  }

  SUBCASE("non-environment keys are rejected") {
    CHECK_THROWS_AS(kb::contextual_availability(knowledge, {{"battery_usage", 1.0}}),
                    kb::KbError);
    CHECK_THROWS_AS(kb::contextual_availability(knowledge, {{"nope", 1.0}}), kb::KbError);
  }
}

TEST_CASE("analyze and contextual_availability are pure and monotone") {
  auto knowledge = table_kb();
  kb::update_measurements(knowledge, {}, {}, {{"c_camera", kb::ComponentStatus::Failed}});

  const auto first = kb::analyze(knowledge);
  const auto second = kb::analyze(knowledge);
  CHECK(first.available_designs == second.available_designs);
  CHECK(first.generation == second.generation);

  testsupport::Rng rng(20260810);
  for (int i = 0; i < 50; ++i) {
    std::map<std::string, double> context;
    if (rng.chance(0.7)) context["safety"] = rng.real(0.0, 1.2);
    if (rng.chance(0.7)) context["darkness"] = rng.real(-1.5, 1.5);
    const auto subset = kb::contextual_availability(knowledge, context);
    for (const auto& id : subset) {
      CHECK(first.available_designs.count(id) == 1);
    }
    // Raising any threshold never enlarges the result.
    auto tighter = context;
    for (auto& [key, value] : tighter) value += rng.real(0.0, 0.5);
    const auto shrunk = kb::contextual_availability(knowledge, tighter);
    for (const auto& id : shrunk) {
      CHECK(subset.count(id) == 1);
    }
  }
}

TEST_CASE("grounding uniqueness holds under random grounding sequences") {
  auto knowledge = table_kb();
  knowledge.objectives["o_localize"] = kb::Objective{"o_localize", "f_localization"};
  std::vector<std::string> designs;
  for (const auto& [id, design] : knowledge.designs) {
    (void)design;
    designs.push_back(id);
  }
  testsupport::Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    kb::set_grounding(knowledge, "o_localize",
                      designs[static_cast<std::size_t>(rng.uniform(0, 5))]);
    int active = 0;
    for (const auto& grounding : knowledge.groundings) {
      if (grounding.active) ++active;
    }
    CHECK(active == 1);
  }
}

// Rule-soundness oracle: independent clause-by-clause evaluation of random
// small KBs must agree with analyze().
TEST_CASE("analyze agrees with a brute-force rule evaluator") {
  testsupport::Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    nlohmann::ordered_json doc;
    doc["functions"] = {{{"id", "f"}}};
    doc["components"] = nlohmann::ordered_json::array();
    const int component_count = rng.uniform(1, 3);
    for (int c = 0; c < component_count; ++c) {
      doc["components"].push_back({{"id", "c" + std::to_string(c)}});
    }
    doc["attribute_types"] = nlohmann::ordered_json::array();
    const int attr_count = rng.uniform(1, 4);
    for (int a = 0; a < attr_count; ++a) {
      doc["attribute_types"].push_back(
          {{"id", "q" + std::to_string(a)}, {"kind", "quality"}, {"unit", "u"}});
    }
    doc["function_designs"] = nlohmann::ordered_json::array();
    const int design_count = rng.uniform(1, 8);
    const char* comparators[] = {">=", ">", "<=", "<"};
    for (int d = 0; d < design_count; ++d) {
      nlohmann::ordered_json design;
      design["id"] = "fd" + std::to_string(d);
      design["solves"] = "f";
      design["required_components"] = nlohmann::ordered_json::array();
      for (int c = 0; c < component_count; ++c) {
        if (rng.chance(0.4)) design["required_components"].push_back("c" + std::to_string(c));
      }
      design["qa_expected"] = nlohmann::ordered_json::object();
      design["qa_requirements"] = nlohmann::ordered_json::array();
      for (int a = 0; a < attr_count; ++a) {
        if (rng.chance(0.4)) {
          design["qa_requirements"].push_back(
              {{"attribute", "q" + std::to_string(a)},
               {"comparator", comparators[rng.uniform(0, 3)]},
               {"threshold", static_cast<double>(rng.uniform(0, 10))}});
        }
      }
      design["ea_capabilities"] = nlohmann::ordered_json::object();
      doc["function_designs"].push_back(std::move(design));
    }

    auto knowledge = kb::load_kb(doc.dump());
    std::map<std::string, double> qa;
    for (int a = 0; a < attr_count; ++a) {
      if (rng.chance(0.7)) qa["q" + std::to_string(a)] = rng.uniform(0, 10);
    }
    std::map<std::string, kb::ComponentStatus> statuses;
    for (int c = 0; c < component_count; ++c) {
      statuses["c" + std::to_string(c)] =
          rng.chance(0.3) ? kb::ComponentStatus::Failed : kb::ComponentStatus::Available;
    }
    kb::update_measurements(knowledge, qa, {}, statuses);

    const auto got = kb::analyze(knowledge).available_designs;

    // Independent evaluation, clause by clause.
    std::set<std::string> expected;
    for (const auto& [id, design] : knowledge.designs) {
      bool ok = true;
      for (const auto& component : design.required_components) {
        if (statuses.at(component) != kb::ComponentStatus::Available) ok = false;
      }
      for (const auto& requirement : design.qa_requirements) {
        auto measured = qa.find(requirement.attribute);
        if (measured == qa.end()) continue;
        const double v = measured->second;
        const double t = requirement.threshold;
        bool holds = true;
        switch (requirement.comparator) {
          case kb::Comparator::Ge: holds = v >= t; break;
          case kb::Comparator::Gt: holds = v > t; break;
          case kb::Comparator::Le: holds = v <= t; break;
          case kb::Comparator::Lt: holds = v < t; break;
        }
        if (!holds) ok = false;
      }
      if (ok) expected.insert(id);
    }
    CHECK(got == expected);
  }
}
