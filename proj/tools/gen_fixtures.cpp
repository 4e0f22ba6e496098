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

// Regenerates the shipped scenario files from the fixture builders. The
// tests compare the files against the builders, so rerun this after any
// fixture change: gen_fixtures [scenario-dir]

#include <filesystem>
#include <fstream>
#include <iostream>

#include "coadapt/sim.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << content;
  std::cout << "wrote " << path.string() << "\n";
}

std::string canonical_pddl_domain(const std::string& text) {
  return coadapt::pddl::print_domain(coadapt::pddl::parse_domain(text));
}

std::string canonical_pddl_problem(const std::string& text, const std::string& domain_text) {
  const auto domain = coadapt::pddl::parse_domain(domain_text);
  return coadapt::pddl::print_problem(coadapt::pddl::parse_problem(text, domain));
}

ordered_json ugv_world_json() {
  ordered_json world;
  world["type"] = "ugv";
  world["parameters"] = ordered_json{{"observer_interval", 1.0}};
  world["fault_schedule"] = ordered_json::array(
      {ordered_json{{"trigger", ordered_json{{"at_node", "wp2"}}},
                    {"effect", ordered_json{{"fail_component", "c_kinect"}}}}});
  return world;
}

ordered_json scenario_json(const std::string& kb, const std::string& domain,
                           const std::string& problem, ordered_json world) {
  ordered_json doc;
  doc["kb_path"] = kb;
  doc["domain_path"] = domain;
  doc["problem_path"] = problem;
  doc["world"] = std::move(world);
  doc["seed"] = 0;
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("scenarios");
  using namespace coadapt::sim;

  const std::string ugv_domain = ugv_domain_text();

  write_file(root / "ugv" / "kb.json", ugv_kb_text());
  write_file(root / "ugv" / "domain.pddl", canonical_pddl_domain(ugv_domain));
  write_file(root / "ugv" / "problem.pddl", canonical_pddl_problem(ugv_problem_text(), ugv_domain));
  write_file(root / "ugv" / "scenario.json",
             scenario_json("kb.json", "domain.pddl", "problem.pddl", ugv_world_json()).dump(2) +
                 "\n");

  // Modification 1: only the problem file differs (start and goal swapped).
  UgvProblemParams mod1;
  mod1.start = "wp9";
  mod1.goal = "wp1";
  write_file(root / "ugv_mod1" / "problem.pddl",
             canonical_pddl_problem(ugv_problem_text(mod1), ugv_domain));
  write_file(root / "ugv_mod1" / "scenario.json",
             scenario_json("../ugv/kb.json", "../ugv/domain.pddl", "problem.pddl",
                           ugv_world_json())
                     .dump(2) +
                 "\n");

  // Modification 2: only the domain file differs (obstacle moves need and
  // consume 10 extra battery).
  write_file(root / "ugv_mod2" / "domain.pddl", canonical_pddl_domain(ugv_domain_text(10.0)));
  write_file(root / "ugv_mod2" / "scenario.json",
             scenario_json("../ugv/kb.json", "domain.pddl", "../ugv/problem.pddl",
                           ugv_world_json())
                     .dump(2) +
                 "\n");

  // Modification 3: only the KB differs (improved MRPT safety levels).
  UgvKbParams mod3;
  mod3.mrpt_lidar_safety = 0.9;
  mod3.mrpt_kinect_safety = 0.95;
  write_file(root / "ugv_mod3" / "kb.json", ugv_kb_text(mod3));
  write_file(root / "ugv_mod3" / "scenario.json",
             scenario_json("kb.json", "../ugv/domain.pddl", "../ugv/problem.pddl",
                           ugv_world_json())
                     .dump(2) +
                 "\n");

  const std::string uuv_domain = uuv_domain_text();
  ordered_json uuv_world;
  uuv_world["type"] = "uuv";
  uuv_world["parameters"] =
      ordered_json{{"observer_interval", 1.0}, {"water_visibility", 2.5},
                   {"search_battery_floor", 25.0}, {"follow_battery_floor", 25.0}};
  uuv_world["fault_schedule"] = ordered_json::array(
      {ordered_json{{"trigger", ordered_json{{"at_sim_time", 2.0}}},
                    {"effect", ordered_json{{"set_qa", ordered_json{{"id", "battery_level"},
                                                                    {"value", 20.0}}}}}}});
  write_file(root / "uuv" / "kb.json", uuv_kb_text());
  write_file(root / "uuv" / "domain.pddl", canonical_pddl_domain(uuv_domain));
  write_file(root / "uuv" / "problem.pddl", canonical_pddl_problem(uuv_problem_text(), uuv_domain));
  write_file(root / "uuv" / "scenario.json",
             scenario_json("kb.json", "domain.pddl", "problem.pddl", std::move(uuv_world)).dump(2) +
                 "\n");
  return 0;
}
