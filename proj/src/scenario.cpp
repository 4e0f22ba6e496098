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

#include <fstream>
#include <sstream>

#include "coadapt/sim.hpp"

namespace coadapt::sim {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot read " + path.string());
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  for (const auto& key : {"kb_path", "domain_path", "problem_path", "world"}) {
    if (!doc.contains(key)) {
      throw std::invalid_argument(path.string() + ": missing \"" + key + "\"");
    }
  }
  const auto base = path.parent_path();
  const auto resolve = [&](const std::string& relative) { return base / relative; };

  Scenario scenario;
  const auto kb_path = resolve(doc.at("kb_path").get<std::string>());
  const auto domain_path = resolve(doc.at("domain_path").get<std::string>());
  const auto problem_path = resolve(doc.at("problem_path").get<std::string>());
  scenario.knowledge = kb::load_kb(read_file(kb_path), kb_path.string());
  scenario.domain = pddl::parse_domain(read_file(domain_path), domain_path.string());
  scenario.problem =
      pddl::parse_problem(read_file(problem_path), scenario.domain, problem_path.string());

  const auto& world = doc.at("world");
  scenario.world_type = world.at("type").get<std::string>();
  if (scenario.world_type != "ugv" && scenario.world_type != "uuv") {
    throw std::invalid_argument(path.string() + ": unknown world type \"" + scenario.world_type +
                                "\"");
  }
  scenario.parameters = world.value("parameters", nlohmann::json::object());
  if (world.contains("fault_schedule")) {
    scenario.faults = faults_from_json(world.at("fault_schedule"));
  }
  scenario.seed = doc.value("seed", 0ULL);
  return scenario;
}

std::unique_ptr<engine::Executor> make_executor(const Scenario& scenario) {
  const double interval = scenario.parameters.value("observer_interval", 1.0);
  if (scenario.world_type == "ugv") {
    UgvWorld world = build_ugv_world(scenario.problem, scenario.knowledge, scenario.faults);
    if (scenario.parameters.contains("obstacle_safety_level")) {
      world.obstacle_safety_level = scenario.parameters.at("obstacle_safety_level").get<double>();
    }
    if (scenario.parameters.contains("dark_darkness_level")) {
      world.dark_darkness_level = scenario.parameters.at("dark_darkness_level").get<double>();
    }
    return std::make_unique<UgvExecutor>(std::move(world), interval);
  }
  UuvWorld world =
      build_uuv_world(scenario.problem, scenario.knowledge, scenario.faults, scenario.parameters);
  return std::make_unique<UuvExecutor>(std::move(world), interval);
}

}  // namespace coadapt::sim
