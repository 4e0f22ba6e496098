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

// The two shipped worlds. The corridor lengths are part of the mission data:
// they make the initial optimum cross the obstacle corridor and the
// post-fault optimum detour through wp3 with fd_AMCL_lidar on every step,
// and they make the flashlight route through the dark corridor strictly
// worse than that detour.

#include <charconv>
#include <sstream>

#include "coadapt/sim.hpp"

namespace coadapt::sim {

namespace {

using nlohmann::ordered_json;

struct UgvDesignRow {
  const char* id;
  std::vector<const char*> components;
  double usage;
  double safety;
  double darkness;
};

std::vector<UgvDesignRow> ugv_designs(const UgvKbParams& params) {
  return {
      {"fd_AMCL_lidar", {"c_lidar"}, 4, 0.4, 0},
      {"fd_AMCL_kinect", {"c_kinect"}, 2, 1.0, 0},
      {"fd_MRPT_lidar", {"c_lidar"}, 6, params.mrpt_lidar_safety, 0},
      {"fd_MRPT_kinect", {"c_kinect"}, 4, params.mrpt_kinect_safety, 0},
      {"fd_aruco", {"c_camera"}, 7, 0.7, -1},
      {"fd_aruco_with_light", {"c_camera", "c_flashlight"}, 10, 0.7, 1},
  };
}

struct UgvCorridorRow {
  const char* corridor;
  const char* from;
  const char* to;
  char type;  // 'n'ormal, 'o'bstacle, 'd'ark
  double length;
};

const std::vector<UgvCorridorRow>& ugv_corridors() {
  static const std::vector<UgvCorridorRow> rows = {
      {"co_wp1_wp2", "wp1", "wp2", 'n', 1},
      {"co_wp1_wp4", "wp1", "wp4", 'n', 2},
      {"co_wp2_wp3", "wp2", "wp3", 'n', 1},
      {"co_wp2_wp5", "wp2", "wp5", 'o', 1},
      {"co_wp3_wp6", "wp3", "wp6", 'n', 1},
      {"co_wp4_wp5", "wp4", "wp5", 'n', 2},
      {"co_wp4_wp7", "wp4", "wp7", 'n', 2},
      {"co_wp5_wp6", "wp5", "wp6", 'n', 1},
      {"co_wp5_wp8", "wp5", "wp8", 'n', 1},
      {"co_wp6_wp9", "wp6", "wp9", 'd', 2},
      {"co_wp7_wp8", "wp7", "wp8", 'n', 2},
      {"co_wp8_wp9", "wp8", "wp9", 'n', 1},
  };
  return rows;
}

std::string number(double value) {
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  (void)ec;
  return std::string(buffer, ptr);
}

}  // namespace

std::string ugv_kb_text(const UgvKbParams& params) {
  ordered_json doc;
  doc["functions"] = ordered_json::array({ordered_json{{"id", "f_localization"}}});
  doc["components"] = ordered_json::array();
  for (const char* id : {"c_lidar", "c_kinect", "c_camera", "c_flashlight"}) {
    doc["components"].push_back(ordered_json{{"id", id}});
  }
  doc["attribute_types"] = ordered_json::array();
  auto attribute = [](const char* id, const char* kind, const char* unit) {
    return ordered_json{{"id", id}, {"kind", kind}, {"unit", unit}};
  };
  doc["attribute_types"].push_back(attribute("battery_usage", "quality", "percent_per_length"));
  doc["attribute_types"].push_back(attribute("battery_level", "quality", "percent"));
  doc["attribute_types"].push_back(attribute("safety", "environment", "level"));
  doc["attribute_types"].push_back(attribute("darkness", "environment", "level"));
  doc["function_designs"] = ordered_json::array();
  for (const auto& row : ugv_designs(params)) {
    ordered_json design;
    design["id"] = row.id;
    design["solves"] = "f_localization";
    design["required_components"] = row.components;
    design["qa_expected"] = ordered_json{{"battery_usage", row.usage}};
    design["qa_requirements"] = ordered_json::array();
    design["ea_capabilities"] = ordered_json{{"safety", row.safety}, {"darkness", row.darkness}};
    doc["function_designs"].push_back(std::move(design));
  }
  return doc.dump(2) + "\n";
}

std::string ugv_domain_text(double obstacle_battery_extra) {
  const std::string base = "(* (design_usage ?fd) (corridor_length ?c))";
  const std::string obstacle_amount =
      obstacle_battery_extra == 0.0 ? base
                                    : "(+ " + base + " " + number(obstacle_battery_extra) + ")";
  auto move_action = [&](const std::string& name, const std::string& tag,
                         const std::string& corridor_type, const std::string& amount) {
    std::ostringstream out;
    out << "  (:action " << name << "\n"
        << "    :parameters (?a - action_obj ?f - function ?fd - function_design ?c - corridor"
           " ?from - waypoint ?to - waypoint)\n"
        << "    :precondition (and\n"
        << "      (" << tag << " ?a)\n"
        << "      (a_req_f ?a ?f)\n"
        << "      (fd_solve_f ?fd ?f)\n"
        << "      (fd_available ?fd)\n"
        << "      (fd_allowed_on ?fd ?c)\n"
        << "      (" << corridor_type << " ?c)\n"
        << "      (corridor_connects ?c ?from ?to)\n"
        << "      (robot_at ?from)\n"
        << "      (>= (battery_level) " << amount << ")\n"
        << "    )\n"
        << "    :effect (and\n"
        << "      (not (robot_at ?from))\n"
        << "      (robot_at ?to)\n"
        << "      (decrease (battery_level) " << amount << ")\n"
        << "      (increase (total-cost) " << amount << ")\n"
        << "    )\n"
        << "  )\n";
    return out.str();
  };

  std::ostringstream out;
  out << "(define (domain ugv_navigation)\n"
      << "  (:requirements :strips :typing :negative-preconditions :numeric-fluents"
         " :action-costs)\n"
      << "  (:types\n"
      << "    waypoint corridor action_obj function function_design - object\n"
      << "  )\n"
      << "  (:predicates\n"
      << "    (robot_at ?w - waypoint)\n"
      << "    (corridor_connects ?c - corridor ?from - waypoint ?to - waypoint)\n"
      << "    (corridor_normal ?c - corridor)\n"
      << "    (corridor_obstacle ?c - corridor)\n"
      << "    (corridor_dark ?c - corridor)\n"
      << "    (move_action ?a - action_obj)\n"
      << "    (move_obstacle_action ?a - action_obj)\n"
      << "    (move_dark_action ?a - action_obj)\n"
      << "    (a_req_f ?a - action_obj ?f - function)\n"
      << "    (fd_solve_f ?fd - function_design ?f - function)\n"
      << "    (fd_available ?fd - function_design)\n"
      << "    (fd_allowed_on ?fd - function_design ?c - corridor)\n"
      << "  )\n"
      << "  (:functions\n"
      << "    (battery_level)\n"
      << "    (total-cost)\n"
      << "    (design_usage ?fd - function_design)\n"
      << "    (corridor_length ?c - corridor)\n"
      << "  )\n"
      << move_action("move", "move_action", "corridor_normal", base)
      << move_action("move_with_obstacle", "move_obstacle_action", "corridor_obstacle",
                     obstacle_amount)
      << move_action("move_dark", "move_dark_action", "corridor_dark", base) << ")\n";
  return out.str();
}

std::string ugv_problem_text(const UgvProblemParams& params, const UgvKbParams& kb_params) {
  std::ostringstream out;
  out << "(define (problem ugv_mission)\n"
      << "  (:domain ugv_navigation)\n"
      << "  (:objects\n"
      << "    wp1 wp2 wp3 wp4 wp5 wp6 wp7 wp8 wp9 - waypoint\n"
      << "    ";
  for (const auto& row : ugv_corridors()) out << row.corridor << " ";
  out << "- corridor\n"
      << "    a_move a_move_obstacle a_move_dark - action_obj\n"
      << "    f_localization - function\n"
      << "    ";
  for (const auto& row : ugv_designs(kb_params)) out << row.id << " ";
  out << "- function_design\n"
      << "  )\n"
      << "  (:init\n"
      << "    (robot_at " << params.start << ")\n"
      << "    (move_action a_move)\n"
      << "    (move_obstacle_action a_move_obstacle)\n"
      << "    (move_dark_action a_move_dark)\n"
      << "    (a_req_f a_move f_localization)\n"
      << "    (a_req_f a_move_obstacle f_localization)\n"
      << "    (a_req_f a_move_dark f_localization)\n";
  for (const auto& row : ugv_designs(kb_params)) {
    out << "    (fd_solve_f " << row.id << " f_localization)\n";
  }
  for (const auto& row : ugv_corridors()) {
    out << "    (corridor_connects " << row.corridor << " " << row.from << " " << row.to << ")\n";
    out << "    (corridor_connects " << row.corridor << " " << row.to << " " << row.from << ")\n";
  }
  for (const auto& row : ugv_corridors()) {
    const char* type = row.type == 'o'   ? "corridor_obstacle"
                       : row.type == 'd' ? "corridor_dark"
                                         : "corridor_normal";
    out << "    (" << type << " " << row.corridor << ")\n";
  }

  // Initial availability, in the exact shape update_problem produces: all
  // designs available, per-corridor admissibility from capability >= level.
  std::vector<std::string> design_ids;
  for (const auto& row : ugv_designs(kb_params)) design_ids.push_back(row.id);
  std::sort(design_ids.begin(), design_ids.end());
  for (const auto& id : design_ids) out << "    (fd_available " << id << ")\n";
  for (const auto& id : design_ids) {
    const auto rows = ugv_designs(kb_params);
    const UgvDesignRow* design = nullptr;
    for (const auto& row : rows) {
      if (id == row.id) design = &row;
    }
    for (const auto& corridor : ugv_corridors()) {
      const double safety_req = corridor.type == 'o' ? 0.8 : 0.0;
      const double darkness_req = corridor.type == 'd' ? 1.0 : 0.0;
      if (design->safety >= safety_req && design->darkness >= darkness_req) {
        out << "    (fd_allowed_on " << id << " " << corridor.corridor << ")\n";
      }
    }
  }

  out << "    (= (battery_level) 100)\n"
      << "    (= (total-cost) 0)\n";
  for (const auto& row : ugv_designs(kb_params)) {
    out << "    (= (design_usage " << row.id << ") " << number(row.usage) << ")\n";
  }
  for (const auto& row : ugv_corridors()) {
    out << "    (= (corridor_length " << row.corridor << ") " << number(row.length) << ")\n";
  }
  out << "  )\n"
      << "  (:goal (and\n"
      << "    (robot_at " << params.goal << ")\n"
      << "  ))\n"
      << "  (:metric minimize (total-cost))\n"
      << ")\n";
  return out.str();
}

std::string uuv_kb_text() {
  ordered_json doc;
  doc["functions"] = ordered_json::array();
  for (const char* id : {"f_search", "f_motion", "f_recharge"}) {
    doc["functions"].push_back(ordered_json{{"id", id}});
  }
  doc["components"] = ordered_json::array();
  for (const char* id : {"c_thrusters", "c_pipeline_camera"}) {
    doc["components"].push_back(ordered_json{{"id", id}});
  }
  doc["attribute_types"] = ordered_json::array();
  doc["attribute_types"].push_back(ordered_json{
      {"id", "battery_usage"}, {"kind", "quality"}, {"unit", "percent_per_action"}});
  doc["attribute_types"].push_back(
      ordered_json{{"id", "battery_level"}, {"kind", "quality"}, {"unit", "percent"}});
  doc["attribute_types"].push_back(
      ordered_json{{"id", "water_visibility"}, {"kind", "environment"}, {"unit", "meters"}});

  auto design = [](const char* id, const char* solves, std::vector<const char*> components,
                   double usage, ordered_json requirements) {
    ordered_json out;
    out["id"] = id;
    out["solves"] = solves;
    out["required_components"] = components;
    out["qa_expected"] = ordered_json{{"battery_usage", usage}};
    out["qa_requirements"] = std::move(requirements);
    out["ea_capabilities"] = ordered_json::object();
    return out;
  };
  auto visibility = [](double threshold) {
    return ordered_json::array({ordered_json{
        {"attribute", "water_visibility"}, {"comparator", ">="}, {"threshold", threshold}}});
  };

  doc["function_designs"] = ordered_json::array();
  doc["function_designs"].push_back(
      design("fd_search_low", "f_search", {"c_pipeline_camera"}, 3, visibility(1.25)));
  doc["function_designs"].push_back(
      design("fd_search_med", "f_search", {"c_pipeline_camera"}, 2, visibility(2.25)));
  doc["function_designs"].push_back(
      design("fd_search_high", "f_search", {"c_pipeline_camera"}, 1, visibility(3.25)));
  doc["function_designs"].push_back(
      design("fd_speed_low", "f_motion", {"c_thrusters"}, 1, ordered_json::array()));
  doc["function_designs"].push_back(
      design("fd_speed_med", "f_motion", {"c_thrusters"}, 2, ordered_json::array()));
  doc["function_designs"].push_back(
      design("fd_speed_high", "f_motion", {"c_thrusters"}, 3, ordered_json::array()));
  doc["function_designs"].push_back(
      design("fd_recharge", "f_recharge", {}, 0, ordered_json::array()));
  return doc.dump(2) + "\n";
}

std::string uuv_domain_text() {
  std::ostringstream out;
  out << "(define (domain uuv_inspection)\n"
      << "  (:requirements :strips :typing :negative-preconditions :numeric-fluents"
         " :action-costs :durative-actions)\n"
      << "  (:types\n"
      << "    action_obj function function_design - object\n"
      << "    search_function motion_function recharge_function - function\n"
      << "  )\n"
      << "  (:predicates\n"
      << "    (search_action ?a - action_obj)\n"
      << "    (follow_action ?a - action_obj)\n"
      << "    (move_action ?a - action_obj)\n"
      << "    (recharge_action ?a - action_obj)\n"
      << "    (a_req_f ?a - action_obj ?f - function)\n"
      << "    (fd_solve_f ?fd - function_design ?f - function)\n"
      << "    (fd_available ?fd - function_design)\n"
      << "    (at_station)\n"
      << "    (pipeline_found)\n"
      << "    (pipeline_inspected)\n"
      << "  )\n"
      << "  (:functions\n"
      << "    (battery_level)\n"
      << "    (total-cost)\n"
      << "    (search_cost ?fd - function_design)\n"
      << "    (search_usage ?fd - function_design)\n"
      << "    (motion_cost ?fd - function_design)\n"
      << "    (motion_usage ?fd - function_design)\n"
      << "    (motion_min_battery ?fd - function_design)\n"
      << "    (recharge_cost ?fd - function_design)\n"
      << "  )\n"
      << "  (:durative-action search_pipeline\n"
      << "    :parameters (?a - action_obj ?f - search_function ?fd - function_design"
         " ?fm - motion_function ?fdm - function_design)\n"
      << "    :duration (= ?duration 4)\n"
      << "    :condition (and\n"
      << "      (at start (search_action ?a))\n"
      << "      (at start (a_req_f ?a ?f))\n"
      << "      (at start (fd_solve_f ?fd ?f))\n"
      << "      (at start (fd_available ?fd))\n"
      << "      (at start (a_req_f ?a ?fm))\n"
      << "      (at start (fd_solve_f ?fdm ?fm))\n"
      << "      (at start (fd_available ?fdm))\n"
      << "      (at start (not (pipeline_found)))\n"
      << "      (at start (>= (battery_level) 25))\n"
      << "      (at start (>= (battery_level) (motion_min_battery ?fdm)))\n"
      << "    )\n"
      << "    :effect (and\n"
      << "      (at end (pipeline_found))\n"
      << "      (at end (decrease (battery_level) (+ (search_usage ?fd) (motion_usage ?fdm))))\n"
      << "      (at end (increase (total-cost) (+ (search_cost ?fd) (motion_cost ?fdm))))\n"
      << "    )\n"
      << "  )\n"
      << "  (:durative-action follow_pipeline\n"
      << "    :parameters (?a - action_obj ?f - motion_function ?fd - function_design)\n"
      << "    :duration (= ?duration 3)\n"
      << "    :condition (and\n"
      << "      (at start (follow_action ?a))\n"
      << "      (at start (a_req_f ?a ?f))\n"
      << "      (at start (fd_solve_f ?fd ?f))\n"
      << "      (at start (fd_available ?fd))\n"
      << "      (at start (pipeline_found))\n"
      << "      (at start (not (pipeline_inspected)))\n"
      << "      (at start (>= (battery_level) 25))\n"
      << "      (at start (>= (battery_level) (motion_min_battery ?fd)))\n"
      << "    )\n"
      << "    :effect (and\n"
      << "      (at end (pipeline_inspected))\n"
      << "      (at end (decrease (battery_level) (motion_usage ?fd)))\n"
      << "      (at end (increase (total-cost) (motion_cost ?fd)))\n"
      << "    )\n"
      << "  )\n"
      << "  (:durative-action move_to_station\n"
      << "    :parameters (?a - action_obj ?f - motion_function ?fd - function_design)\n"
      << "    :duration (= ?duration 2)\n"
      << "    :condition (and\n"
      << "      (at start (move_action ?a))\n"
      << "      (at start (a_req_f ?a ?f))\n"
      << "      (at start (fd_solve_f ?fd ?f))\n"
      << "      (at start (fd_available ?fd))\n"
      << "      (at start (not (at_station)))\n"
      << "      (at start (>= (battery_level) (motion_usage ?fd)))\n"
      << "      (at start (>= (battery_level) (motion_min_battery ?fd)))\n"
      << "    )\n"
      << "    :effect (and\n"
      << "      (at end (at_station))\n"
      << "      (at end (decrease (battery_level) (motion_usage ?fd)))\n"
      << "      (at end (increase (total-cost) (motion_cost ?fd)))\n"
      << "    )\n"
      << "  )\n"
      << "  (:durative-action recharge\n"
      << "    :parameters (?a - action_obj ?f - recharge_function ?fd - function_design)\n"
      << "    :duration (= ?duration 1)\n"
      << "    :condition (and\n"
      << "      (at start (recharge_action ?a))\n"
      << "      (at start (a_req_f ?a ?f))\n"
      << "      (at start (fd_solve_f ?fd ?f))\n"
      << "      (at start (fd_available ?fd))\n"
      << "      (at start (at_station))\n"
      << "    )\n"
      << "    :effect (and\n"
      << "      (at end (assign (battery_level) 100))\n"
      << "      (at end (increase (total-cost) (recharge_cost ?fd)))\n"
      << "    )\n"
      << "  )\n"
      << ")\n";
  return out.str();
}

std::string uuv_problem_text() {
  std::ostringstream out;
  out << "(define (problem uuv_mission)\n"
      << "  (:domain uuv_inspection)\n"
      << "  (:objects\n"
      << "    a_search a_follow a_move a_recharge - action_obj\n"
      << "    f_search - search_function\n"
      << "    f_motion - motion_function\n"
      << "    f_recharge - recharge_function\n"
      << "    fd_search_low fd_search_med fd_search_high fd_speed_low fd_speed_med fd_speed_high"
         " fd_recharge - function_design\n"
      << "  )\n"
      << "  (:init\n"
      << "    (search_action a_search)\n"
      << "    (follow_action a_follow)\n"
      << "    (move_action a_move)\n"
      << "    (recharge_action a_recharge)\n"
      << "    (a_req_f a_search f_search)\n"
      << "    (a_req_f a_search f_motion)\n"
      << "    (a_req_f a_follow f_motion)\n"
      << "    (a_req_f a_move f_motion)\n"
      << "    (a_req_f a_recharge f_recharge)\n"
      << "    (fd_solve_f fd_search_low f_search)\n"
      << "    (fd_solve_f fd_search_med f_search)\n"
      << "    (fd_solve_f fd_search_high f_search)\n"
      << "    (fd_solve_f fd_speed_low f_motion)\n"
      << "    (fd_solve_f fd_speed_med f_motion)\n"
      << "    (fd_solve_f fd_speed_high f_motion)\n"
      << "    (fd_solve_f fd_recharge f_recharge)\n"
      << "    (fd_available fd_recharge)\n"
      << "    (fd_available fd_search_low)\n"
      << "    (fd_available fd_search_med)\n"
      << "    (fd_available fd_speed_high)\n"
      << "    (fd_available fd_speed_low)\n"
      << "    (fd_available fd_speed_med)\n"
      << "    (= (battery_level) 100)\n"
      << "    (= (total-cost) 0)\n"
      << "    (= (search_cost fd_search_low) 3)\n"
      << "    (= (search_cost fd_search_med) 2)\n"
      << "    (= (search_cost fd_search_high) 1)\n"
      << "    (= (search_usage fd_search_low) 3)\n"
      << "    (= (search_usage fd_search_med) 2)\n"
      << "    (= (search_usage fd_search_high) 1)\n"
      << "    (= (motion_cost fd_speed_low) 3)\n"
      << "    (= (motion_cost fd_speed_med) 2)\n"
      << "    (= (motion_cost fd_speed_high) 1)\n"
      << "    (= (motion_usage fd_speed_low) 1)\n"
      << "    (= (motion_usage fd_speed_med) 2)\n"
      << "    (= (motion_usage fd_speed_high) 3)\n"
      << "    (= (motion_min_battery fd_speed_low) 0)\n"
      << "    (= (motion_min_battery fd_speed_med) 25)\n"
      << "    (= (motion_min_battery fd_speed_high) 50)\n"
      << "    (= (recharge_cost fd_recharge) 1)\n"
      << "  )\n"
      << "  (:goal (and\n"
      << "    (pipeline_inspected)\n"
      << "  ))\n"
      << "  (:metric minimize (total-cost))\n"
      << ")\n";
  return out.str();
}

Fixture build_ugv_fixture() {
  Fixture fixture;
  fixture.domain = pddl::parse_domain(ugv_domain_text(), "ugv_domain.pddl");
  fixture.problem = pddl::parse_problem(ugv_problem_text(), fixture.domain, "ugv_problem.pddl");
  fixture.knowledge = kb::load_kb(ugv_kb_text(), "ugv_kb.json");
  return fixture;
}

Fixture build_uuv_fixture() {
  Fixture fixture;
  fixture.domain = pddl::parse_domain(uuv_domain_text(), "uuv_domain.pddl");
  fixture.problem = pddl::parse_problem(uuv_problem_text(), fixture.domain, "uuv_problem.pddl");
  fixture.knowledge = kb::load_kb(uuv_kb_text(), "uuv_kb.json");
  return fixture;
}

std::vector<FaultSpec> ugv_fixture_faults() {
  FaultSpec fault;
  fault.trigger.kind = FaultTrigger::Kind::AtNode;
  fault.trigger.node = "wp2";
  fault.effect.kind = FaultEffect::Kind::FailComponent;
  fault.effect.id = "c_kinect";
  return {fault};
}

std::vector<FaultSpec> uuv_fixture_faults() {
  FaultSpec fault;
  fault.trigger.kind = FaultTrigger::Kind::AtSimTime;
  fault.trigger.value = 2.0;
  fault.effect.kind = FaultEffect::Kind::SetQa;
  fault.effect.id = "battery_level";
  fault.effect.value = 20.0;
  return {fault};
}

}  // namespace coadapt::sim
