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

// Exit-code contract tests for the command-line front end. Each case shells
// out to the built binary.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "coadapt/pddl.hpp"
#include "coadapt/sim.hpp"
#include "coadapt/trace.hpp"
#include "doctest.h"

namespace {

namespace fs = std::filesystem;

struct CommandResult {
  int exit_code = -1;
  std::string out;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

CommandResult run_cli(const std::string& args) {
  const fs::path out_path = fs::temp_directory_path() / "coadapt_cli_out.txt";
  const std::string command =
      std::string(COADAPT_CLI_PATH) + " " + args + " > " + out_path.string() + " 2>&1";
  const int status = std::system(command.c_str());
  CommandResult result;
  result.exit_code = WEXITSTATUS(status);
  result.out = slurp(out_path);
  return result;
}

fs::path scenario(const std::string& name) {
  return fs::path(COADAPT_SCENARIO_DIR) / name / "scenario.json";
}

fs::path artifact(const std::string& name, const std::string& file) {
  return fs::path(COADAPT_SCENARIO_DIR) / name / file;
}

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path path = fs::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("run executes the ugv scenario and writes the trace") {
  const fs::path trace_path = fs::temp_directory_path() / "ugv_trace.ndjson";
  const auto result = run_cli("run --scenario " + scenario("ugv").string() + " --trace-out " +
                              trace_path.string());
  CHECK(result.exit_code == 0);
  CHECK(result.out.find("outcome: Succeeded") != std::string::npos);
  const auto trace = coadapt::trace::Trace::from_ndjson(slurp(trace_path));
  CHECK(trace.count("plan") == 2);

  SUBCASE("two runs produce byte-identical traces") {
    const fs::path second_path = fs::temp_directory_path() / "ugv_trace_2.ndjson";
    run_cli("run --scenario " + scenario("ugv").string() + " --trace-out " +
            second_path.string() + " --quiet");
    CHECK(slurp(trace_path) == slurp(second_path));
  }
}

TEST_CASE("run executes the uuv scenario with the recharge detour") {
  const fs::path trace_path = fs::temp_directory_path() / "uuv_trace.ndjson";
  const auto result = run_cli("run --scenario " + scenario("uuv").string() + " --trace-out " +
                              trace_path.string() + " --quiet");
  CHECK(result.exit_code == 0);
  const auto trace = coadapt::trace::Trace::from_ndjson(slurp(trace_path));
  const auto plans = trace.of_kind("plan");
  REQUIRE(plans.size() == 2);
  CHECK(plans[1]->payload.at("steps").at(0).at("action") == "move_to_station");
  CHECK(plans[1]->payload.at("steps").at(1).at("action") == "recharge");
}

TEST_CASE("greedy mode plans the ugv mission too") {
  const auto result = run_cli("plan --mode greedy " + artifact("ugv", "domain.pddl").string() +
                              " " + artifact("ugv", "problem.pddl").string());
  CHECK(result.exit_code == 0);
  CHECK_NOTHROW(nlohmann::json::parse(result.out));
}

TEST_CASE("run reports resource caps as a mission failure") {
  const auto result = run_cli("run --scenario " + scenario("ugv").string() + " --node-limit 1");
  CHECK(result.exit_code == 2);
  CHECK(result.out.find("resource-cap") != std::string::npos);
}

TEST_CASE("run rejects unreadable scenarios with exit 3") {
  CHECK(run_cli("run --scenario /nonexistent/scenario.json").exit_code == 3);
  const auto bad = temp_file("bad_scenario.json", "{\"kb_path\": 1}");
  CHECK(run_cli("run --scenario " + bad.string()).exit_code == 3);
}

TEST_CASE("plan prints the serialized plan for the shipped ugv problem") {
  const auto result = run_cli("plan " + artifact("ugv", "domain.pddl").string() + " " +
                              artifact("ugv", "problem.pddl").string());
  CHECK(result.exit_code == 0);
  const auto doc = nlohmann::json::parse(result.out);
  CHECK(doc.at("total_cost") == 8.0);
  for (const auto& step : doc.at("steps")) {
    CHECK(step.at("designs").at("f_localization") == "fd_AMCL_kinect");
  }
}

TEST_CASE("plan exits 1 on unsolvable problems and prints the evidence") {
  // Strip every fd_available fact; the goal becomes unreachable.
  const auto domain = coadapt::pddl::parse_domain(coadapt::sim::ugv_domain_text());
  const auto problem =
      coadapt::pddl::parse_problem(coadapt::sim::ugv_problem_text(), domain);
  const auto stripped = coadapt::pddl::update_problem(problem, {}, {});
  const auto path = temp_file("ugv_no_designs.pddl", coadapt::pddl::print_problem(stripped));
  const auto result = run_cli("plan " + artifact("ugv", "domain.pddl").string() + " " +
                              path.string());
  CHECK(result.exit_code == 1);
  CHECK(result.out.find("unsolvable") != std::string::npos);
  CHECK(result.out.find("robot_at wp9") != std::string::npos);
}

TEST_CASE("plan exits 3 with a position on parse errors") {
  const auto path = temp_file("broken.pddl", "(define (domain broken)\n  (:types a - ))");
  const auto result =
      run_cli("plan " + path.string() + " " + artifact("ugv", "problem.pddl").string());
  CHECK(result.exit_code == 3);
  CHECK(result.out.find("broken.pddl:") != std::string::npos);
}

TEST_CASE("plan solves the trivial goal-in-init problem with an empty plan") {
  coadapt::sim::UgvProblemParams params;
  params.start = "wp9";
  params.goal = "wp9";
  const auto path = temp_file("ugv_done.pddl", coadapt::sim::ugv_problem_text(params));
  const auto result =
      run_cli("plan " + artifact("ugv", "domain.pddl").string() + " " + path.string());
  CHECK(result.exit_code == 0);
  const auto doc = nlohmann::json::parse(result.out);
  CHECK(doc.at("steps").empty());
}

TEST_CASE("validate accepts planner output and rejects tampering") {
  const fs::path plan_path = fs::temp_directory_path() / "ugv_plan.json";
  const auto planned = run_cli("plan " + artifact("ugv", "domain.pddl").string() + " " +
                               artifact("ugv", "problem.pddl").string());
  REQUIRE(planned.exit_code == 0);
  std::ofstream(plan_path) << planned.out;

  const std::string base = "validate " + artifact("ugv", "domain.pddl").string() + " " +
                           artifact("ugv", "problem.pddl").string() + " ";
  CHECK(run_cli(base + plan_path.string()).exit_code == 0);

  auto doc = nlohmann::json::parse(planned.out);
  doc["total_cost"] = 5.0;
  const auto tampered = temp_file("ugv_plan_bad.json", doc.dump());
  const auto rejected = run_cli(base + tampered.string());
  CHECK(rejected.exit_code == 1);
  CHECK(rejected.out.find("invalid") != std::string::npos);

  const auto malformed = temp_file("ugv_plan_malformed.json", "not json");
  CHECK(run_cli(base + malformed.string()).exit_code == 3);
}

TEST_CASE("diff flags changed actions, routes and designs") {
  const auto initial = run_cli("plan " + artifact("ugv", "domain.pddl").string() + " " +
                               artifact("ugv", "problem.pddl").string());
  REQUIRE(initial.exit_code == 0);
  const auto plan_a = temp_file("diff_a.json", initial.out);

  // The adapted situation: kinect gone, re-planned from wp2.
  auto fixture = coadapt::sim::build_ugv_fixture();
  coadapt::kb::update_measurements(fixture.knowledge, {}, {},
                                   {{"c_kinect", coadapt::kb::ComponentStatus::Failed}});
  auto problem = fixture.problem;
  problem.init.erase(std::remove_if(problem.init.begin(), problem.init.end(),
                                    [](const coadapt::pddl::GroundAtom& atom) {
                                      return atom.predicate == "robot_at";
                                    }),
                     problem.init.end());
  problem.init.push_back(coadapt::pddl::GroundAtom{"robot_at", {"wp2"}});
  const auto available = coadapt::kb::analyze(fixture.knowledge).available_designs;
  std::set<std::pair<std::string, std::string>> contextual;
  for (const auto& atom : fixture.problem.init) {
    if (atom.predicate == "fd_allowed_on" && available.count(atom.args[0])) {
      contextual.insert({atom.args[0], atom.args[1]});
    }
  }
  problem = coadapt::pddl::update_problem(problem, available, contextual);
  const auto adapted_path =
      temp_file("ugv_adapted.pddl", coadapt::pddl::print_problem(problem));
  const auto adapted = run_cli("plan " + artifact("ugv", "domain.pddl").string() + " " +
                               adapted_path.string());
  REQUIRE(adapted.exit_code == 0);
  const auto plan_b = temp_file("diff_b.json", adapted.out);

  const auto diff = run_cli("diff " + plan_a.string() + " " + plan_b.string());
  CHECK(diff.exit_code == 1);
  CHECK(diff.out.find("fd_AMCL_kinect") != std::string::npos);
  CHECK(diff.out.find("fd_AMCL_lidar") != std::string::npos);
  CHECK(diff.out.find("action") != std::string::npos);

  SUBCASE("identical files produce an empty diff and exit 0") {
    const auto same = run_cli("diff " + plan_a.string() + " " + plan_a.string());
    CHECK(same.exit_code == 0);
    CHECK(same.out.empty());
  }

  SUBCASE("malformed plan files exit 3") {
    const auto malformed = temp_file("diff_bad.json", "[");
    CHECK(run_cli("diff " + plan_a.string() + " " + malformed.string()).exit_code == 3);
  }
}
