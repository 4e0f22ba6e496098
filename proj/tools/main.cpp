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

// Scenario runner and inspection tool. Exit codes: run 0=mission succeeded,
// 2=mission failed, 3=configuration error; plan 0=solvable, 1=unsolvable,
// 3=input error; validate 0=valid, 1=invalid, 3=input error; diff 0=equal,
// 1=different, 3=input error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "coadapt/engine.hpp"
#include "coadapt/ground.hpp"
#include "coadapt/sim.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kDifferent = 1;
constexpr int kMissionFailed = 2;
constexpr int kConfigError = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

coadapt::planner::PlannerConfig planner_config(const std::string& mode, std::uint64_t node_limit,
                                               double time_limit) {
  coadapt::planner::PlannerConfig config;
  config.mode = mode == "greedy" ? coadapt::planner::PlannerMode::Greedy
                                 : coadapt::planner::PlannerMode::Optimal;
  config.node_limit = node_limit;
  config.time_limit_seconds = time_limit;
  return config;
}

int cmd_run(const std::string& scenario_path, const std::string& trace_out,
            const coadapt::planner::PlannerConfig& planner, bool quiet) {
  coadapt::sim::Scenario scenario = coadapt::sim::load_scenario(scenario_path);
  auto executor = coadapt::sim::make_executor(scenario);
  coadapt::engine::EngineConfig config;
  config.planner = planner;
  coadapt::engine::MissionResult result = coadapt::engine::run_mission(
      scenario.domain, scenario.problem, scenario.knowledge, *executor, config);

  if (!trace_out.empty()) {
    std::ofstream out(trace_out);
    if (!out) throw std::invalid_argument("cannot write " + trace_out);
    out << result.trace.to_ndjson();
  }
  if (!quiet) {
    int plan_number = 0;
    for (const auto* event : result.trace.of_kind("plan")) {
      std::cout << "plan " << ++plan_number << ":\n"
                << coadapt::planner::render_plan(
                       coadapt::planner::plan_from_json(event->payload));
    }
    std::cout << "replans: " << result.replan_count << "\n";
    std::cout << "outcome: "
              << (result.outcome == coadapt::engine::MissionOutcome::Succeeded ? "Succeeded"
                                                                               : "Failed");
    if (!result.failure_reason.empty()) std::cout << " (" << result.failure_reason << ")";
    std::cout << "\n";
  }
  return result.outcome == coadapt::engine::MissionOutcome::Succeeded ? kOk : kMissionFailed;
}

int cmd_plan(const std::string& domain_path, const std::string& problem_path,
             const coadapt::planner::PlannerConfig& config) {
  const auto domain = coadapt::pddl::parse_domain(read_file(domain_path), domain_path);
  const auto problem =
      coadapt::pddl::parse_problem(read_file(problem_path), domain, problem_path);
  const auto task = coadapt::ground::ground(domain, problem);
  auto outcome = coadapt::planner::plan(task, config);
  if (std::holds_alternative<coadapt::planner::Plan>(outcome)) {
    std::cout << coadapt::planner::plan_to_json(std::get<coadapt::planner::Plan>(outcome)).dump(2)
              << "\n";
    return kOk;
  }
  if (std::holds_alternative<coadapt::planner::Unsolvable>(outcome)) {
    const auto& unsolvable = std::get<coadapt::planner::Unsolvable>(outcome);
    std::cout << "unsolvable\n";
    for (const auto& atom : unsolvable.unreachable_goal_atoms) {
      std::cout << "unreachable goal atom: (" << atom << ")\n";
    }
    return kDifferent;
  }
  const auto& cap = std::get<coadapt::planner::ResourceCapExceeded>(outcome);
  std::cerr << "resource cap exceeded after " << cap.nodes_expanded << " expansions"
            << (cap.time_limit_hit ? " (time limit)" : " (node limit)") << "\n";
  return kConfigError;
}

int cmd_validate(const std::string& domain_path, const std::string& problem_path,
                 const std::string& plan_path) {
  const auto domain = coadapt::pddl::parse_domain(read_file(domain_path), domain_path);
  const auto problem =
      coadapt::pddl::parse_problem(read_file(problem_path), domain, problem_path);
  const auto task = coadapt::ground::ground(domain, problem);
  const auto plan = coadapt::planner::plan_from_json(nlohmann::json::parse(read_file(plan_path)));
  const auto verdict = coadapt::planner::validate(task, plan);
  if (verdict.valid) {
    std::cout << "valid\n";
    return kOk;
  }
  std::cout << "invalid";
  if (verdict.step >= 0) std::cout << " at step " << verdict.step;
  std::cout << ": " << verdict.reason << "\n";
  return kDifferent;
}

std::string render_step(const coadapt::planner::PlanStep& step) {
  std::ostringstream out;
  out << step.action << "(";
  for (std::size_t i = 0; i < step.args.size(); ++i) {
    if (i > 0) out << ", ";
    out << step.args[i];
  }
  out << ") [";
  bool first = true;
  for (const auto& [function, design] : step.selected_designs) {
    if (!first) out << ", ";
    out << function << "=" << design;
    first = false;
  }
  out << "] cost=" << step.cost;
  return out.str();
}

int cmd_diff(const std::string& plan_a_path, const std::string& plan_b_path) {
  const auto plan_a =
      coadapt::planner::plan_from_json(nlohmann::json::parse(read_file(plan_a_path)));
  const auto plan_b =
      coadapt::planner::plan_from_json(nlohmann::json::parse(read_file(plan_b_path)));
  bool different = false;
  const std::size_t steps = std::max(plan_a.steps.size(), plan_b.steps.size());
  for (std::size_t i = 0; i < steps; ++i) {
    if (i >= plan_a.steps.size()) {
      std::cout << "step " << i << ": only in b\n  > " << render_step(plan_b.steps[i]) << "\n";
      different = true;
      continue;
    }
    if (i >= plan_b.steps.size()) {
      std::cout << "step " << i << ": only in a\n  < " << render_step(plan_a.steps[i]) << "\n";
      different = true;
      continue;
    }
    const auto& a = plan_a.steps[i];
    const auto& b = plan_b.steps[i];
    std::vector<std::string> changes;
    if (a.action != b.action) changes.push_back("action");
    if (a.args != b.args) changes.push_back("route");
    if (a.selected_designs != b.selected_designs) changes.push_back("designs");
    if (a.cost != b.cost) changes.push_back("cost");
    if (changes.empty()) continue;
    different = true;
    std::cout << "step " << i << ": changed";
    for (const auto& what : changes) std::cout << " " << what;
    std::cout << "\n  < " << render_step(a) << "\n  > " << render_step(b) << "\n";
  }
  if (plan_a.total_cost != plan_b.total_cost) {
    std::cout << "total_cost: " << plan_a.total_cost << " != " << plan_b.total_cost << "\n";
    different = true;
  }
  return different ? kDifferent : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"architecture and task plan co-adaptation runner"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string trace_out;
  std::string mode = "optimal";
  std::uint64_t node_limit = 1'000'000;
  double time_limit = 10.0;
  bool quiet = false;

  auto add_planner_flags = [&](CLI::App* cmd) {
    cmd->add_option("--mode", mode, "planner mode: optimal|greedy")
        ->check(CLI::IsMember({"optimal", "greedy"}));
    cmd->add_option("--node-limit", node_limit, "search node limit")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--time-limit", time_limit, "search time limit in seconds")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* run = app.add_subcommand("run", "execute a mission scenario");
  run->add_option("--scenario", scenario_path, "scenario file")->required();
  run->add_option("--trace-out", trace_out, "write the mission trace here");
  run->add_flag("--quiet", quiet, "suppress the human-readable summary");
  add_planner_flags(run);

  std::string domain_path;
  std::string problem_path;
  std::string plan_path;
  CLI::App* plan = app.add_subcommand("plan", "plan a domain/problem pair");
  plan->add_option("domain", domain_path, "domain file")->required();
  plan->add_option("problem", problem_path, "problem file")->required();
  add_planner_flags(plan);

  CLI::App* validate = app.add_subcommand("validate", "check a plan file");
  validate->add_option("domain", domain_path, "domain file")->required();
  validate->add_option("problem", problem_path, "problem file")->required();
  validate->add_option("plan", plan_path, "plan file")->required();

  std::string plan_b_path;
  CLI::App* diff = app.add_subcommand("diff", "compare two plan files");
  diff->add_option("plan_a", plan_path, "first plan")->required();
  diff->add_option("plan_b", plan_b_path, "second plan")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  try {
    if (run->parsed()) {
      return cmd_run(scenario_path, trace_out, planner_config(mode, node_limit, time_limit),
                     quiet);
    }
    if (plan->parsed()) {
      return cmd_plan(domain_path, problem_path, planner_config(mode, node_limit, time_limit));
    }
    if (validate->parsed()) {
      return cmd_validate(domain_path, problem_path, plan_path);
    }
    if (diff->parsed()) {
      return cmd_diff(plan_path, plan_b_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}
