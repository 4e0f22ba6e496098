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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "coadapt/engine.hpp"
#include "coadapt/sim.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace coadapt;

namespace {

planner::PlanStep move_step(const std::string& action, const std::string& design,
                            const std::string& corridor, const std::string& from,
                            const std::string& to) {
  planner::PlanStep step;
  step.action = action;
  step.args = {"a_move", "f_localization", design, corridor, from, to};
  step.selected_designs["f_localization"] = design;
  return step;
}

engine::Feedback drive_to_completion(engine::Executor& executor) {
  while (true) {
    const auto feedback = executor.poll();
    if (feedback.status != engine::FeedbackStatus::Running) return feedback;
  }
}

}  // namespace

TEST_CASE("the ugv world is read out of the problem file") {
  const auto fixture = sim::build_ugv_fixture();
  const auto world = sim::build_ugv_world(fixture.problem, fixture.knowledge, {});
  CHECK(world.nodes.size() == 9);
  CHECK(world.edges.size() == 24);  // both directions of the twelve corridors
  CHECK(world.robot_at == "wp1");
  CHECK(world.battery == 100);
  CHECK(world.design_usage.at("fd_AMCL_kinect") == 2);
  CHECK(world.find_edge("co_wp2_wp5", "wp2", "wp5")->obstacle);
  CHECK(world.find_edge("co_wp6_wp9", "wp9", "wp6")->dark);
  CHECK(world.find_edge("co_wp1_wp4", "wp1", "wp4")->length == 2);
}

TEST_CASE("a kinect move from wp1 to wp2 costs two percent of battery") {
  const auto fixture = sim::build_ugv_fixture();
  sim::UgvExecutor executor(sim::build_ugv_world(fixture.problem, fixture.knowledge, {}));
  executor.start();
  executor.request_action(move_step("move", "fd_AMCL_kinect", "co_wp1_wp2", "wp1", "wp2"));
  const auto feedback = drive_to_completion(executor);
  CHECK(feedback.status == engine::FeedbackStatus::Succeeded);
  CHECK(executor.world().robot_at == "wp2");
  CHECK(executor.world().battery == 98);

  SUBCASE("inapplicable steps fail loudly instead of silently") {
    executor.drain_measurements();
    executor.request_action(move_step("move", "fd_AMCL_kinect", "co_wp1_wp2", "wp1", "wp2"));
    const auto failed = drive_to_completion(executor);
    CHECK(failed.status == engine::FeedbackStatus::Failed);
    CHECK_FALSE(failed.reason.empty());
    CHECK(executor.world().robot_at == "wp2");
  }
}

TEST_CASE("preemption keeps the robot at its source waypoint") {
  const auto fixture = sim::build_ugv_fixture();
  sim::UgvExecutor executor(sim::build_ugv_world(fixture.problem, fixture.knowledge, {}));
  executor.start();
  // The wp1-wp4 corridor takes two time units; preempt after the first tick.
  executor.request_action(move_step("move", "fd_AMCL_kinect", "co_wp1_wp4", "wp1", "wp4"));
  const auto running = executor.poll();
  CHECK(running.status == engine::FeedbackStatus::Running);
  executor.preempt();
  const auto feedback = executor.poll();
  CHECK(feedback.status == engine::FeedbackStatus::Preempted);
  CHECK(executor.world().robot_at == "wp1");
  CHECK(executor.world().battery == 100);
}

TEST_CASE("observers report the corridor context levels") {
  const auto fixture = sim::build_ugv_fixture();
  sim::UgvExecutor executor(sim::build_ugv_world(fixture.problem, fixture.knowledge, {}));
  executor.start();
  const auto batches = executor.drain_measurements();
  REQUIRE(batches.size() == 1);
  const auto& context = batches[0].context_ea;
  CHECK(context.at("co_wp2_wp5").at("safety") == 0.8);
  CHECK(context.at("co_wp2_wp5").at("darkness") == 0.0);
  CHECK(context.at("co_wp1_wp2").at("safety") == 0.0);
  CHECK(context.at("co_wp1_wp2").at("darkness") == 0.0);
  CHECK(context.at("co_wp6_wp9").at("darkness") == 1.0);
  CHECK(batches[0].qa.at("battery_level") == 100);
  CHECK(batches[0].component_status.size() == 4);
}

TEST_CASE("uuv recharge restores the battery at the station") {
  const auto fixture = sim::build_uuv_fixture();
  auto world = sim::build_uuv_world(fixture.problem, fixture.knowledge, {}, {});
  world.battery = 15;
  world.at_charging_station = true;
  sim::UuvExecutor executor(std::move(world));
  executor.start();
  planner::PlanStep step;
  step.action = "recharge";
  step.args = {"a_recharge", "f_recharge", "fd_recharge"};
  step.selected_designs["f_recharge"] = "fd_recharge";
  executor.request_action(step);
  const auto feedback = drive_to_completion(executor);
  CHECK(feedback.status == engine::FeedbackStatus::Succeeded);
  CHECK(executor.world().battery == 100);
}

TEST_CASE("the uuv search aborts when the battery collapses mid-action") {
  const auto fixture = sim::build_uuv_fixture();
  auto world = sim::build_uuv_world(fixture.problem, fixture.knowledge,
                                    sim::uuv_fixture_faults(), {});
  sim::UuvExecutor executor(std::move(world));
  executor.start();
  planner::PlanStep step;
  step.action = "search_pipeline";
  step.args = {"a_search", "f_search", "fd_search_med", "f_motion", "fd_speed_high"};
  step.selected_designs["f_search"] = "fd_search_med";
  step.selected_designs["f_motion"] = "fd_speed_high";
  executor.request_action(step);
  const auto feedback = drive_to_completion(executor);
  CHECK(feedback.status == engine::FeedbackStatus::Failed);
  CHECK(executor.world().battery == 20);
  CHECK(executor.world().phase == sim::UuvPhase::NotFound);
}

TEST_CASE("battery conservation holds over random fault-free missions") {
  testsupport::Rng rng(1212);
  const char* nodes[] = {"wp1", "wp2", "wp3", "wp4", "wp5", "wp6", "wp7", "wp8", "wp9"};
  const auto domain = pddl::parse_domain(sim::ugv_domain_text());
  const auto knowledge = kb::load_kb(sim::ugv_kb_text());

  for (int trial = 0; trial < 10; ++trial) {
    sim::UgvProblemParams params;
    params.start = nodes[rng.uniform(0, 8)];
    do {
      params.goal = nodes[rng.uniform(0, 8)];
    } while (params.goal == params.start);

    const auto problem = pddl::parse_problem(sim::ugv_problem_text(params), domain);
    sim::UgvExecutor executor(sim::build_ugv_world(problem, knowledge, {}));
    const auto result = engine::run_mission(domain, problem, knowledge, executor);
    REQUIRE(result.outcome == engine::MissionOutcome::Succeeded);

    // Sum of usage * length over executed steps, from the trace.
    std::map<std::string, double> lengths;
    for (const auto& init : problem.init_fluents) {
      if (init.fluent.predicate == "corridor_length") lengths[init.fluent.args[0]] = init.value;
    }
    double spent = 0.0;
    const auto events = result.trace.events();
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (events[i].kind != "action_start") continue;
      for (std::size_t j = i + 1; j < events.size(); ++j) {
        if (events[j].kind != "action_end") continue;
        if (events[j].payload.at("outcome") == "Succeeded") {
          const std::string design =
              events[i].payload.at("designs").at("f_localization").get<std::string>();
          const std::string corridor = events[i].payload.at("args").at(3).get<std::string>();
          spent += knowledge.designs.at(design).qa_expected.at("battery_usage") *
                   lengths.at(corridor);
        }
        break;
      }
    }
    CHECK(executor.world().battery == 100.0 - spent);  // exact, not approximate
  }
}

TEST_CASE("identical fixtures and schedules give identical traces") {
  auto run = []() {
    const auto fixture = sim::build_ugv_fixture();
    sim::UgvExecutor executor(
        sim::build_ugv_world(fixture.problem, fixture.knowledge, sim::ugv_fixture_faults()));
    return engine::run_mission(fixture.domain, fixture.problem, fixture.knowledge, executor)
        .trace.to_ndjson();
  };
  CHECK(run() == run());
}

TEST_CASE("shipped scenario files stay in sync with the fixture builders") {
  namespace fs = std::filesystem;
  const fs::path root(COADAPT_SCENARIO_DIR);
  auto slurp = [](const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
  };

  CHECK(slurp(root / "ugv" / "kb.json") == sim::ugv_kb_text());
  CHECK(slurp(root / "ugv" / "domain.pddl") ==
        pddl::print_domain(pddl::parse_domain(sim::ugv_domain_text())));
  const auto ugv_domain = pddl::parse_domain(sim::ugv_domain_text());
  CHECK(slurp(root / "ugv" / "problem.pddl") ==
        pddl::print_problem(pddl::parse_problem(sim::ugv_problem_text(), ugv_domain)));

  CHECK(slurp(root / "uuv" / "kb.json") == sim::uuv_kb_text());
  CHECK(slurp(root / "uuv" / "domain.pddl") ==
        pddl::print_domain(pddl::parse_domain(sim::uuv_domain_text())));
  const auto uuv_domain = pddl::parse_domain(sim::uuv_domain_text());
  CHECK(slurp(root / "uuv" / "problem.pddl") ==
        pddl::print_problem(pddl::parse_problem(sim::uuv_problem_text(), uuv_domain)));

  SUBCASE("scenario files load end to end") {
    const auto ugv = sim::load_scenario(root / "ugv" / "scenario.json");
    CHECK(ugv.world_type == "ugv");
    CHECK(ugv.faults.size() == 1);
    const auto uuv = sim::load_scenario(root / "uuv" / "scenario.json");
    CHECK(uuv.world_type == "uuv");
    CHECK(uuv.parameters.at("water_visibility") == 2.5);
  }
}
