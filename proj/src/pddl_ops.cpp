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

#include <algorithm>
#include <set>

#include "coadapt/pddl.hpp"

namespace coadapt::pddl {

namespace {

const char* kReqF = "a_req_f";
const char* kSolveF = "fd_solve_f";
const char* kAvailable = "fd_available";
const char* kAllowedOn = "fd_allowed_on";

bool is_link_predicate(const std::string& name) {
  return name == kReqF || name == kSolveF || name == kAvailable || name == kAllowedOn;
}

Diagnostic make_diag(const std::string& where, const std::string& message) {
  return Diagnostic{where, SourcePos{0, 0}, "error", message};
}

}  // namespace

std::vector<Diagnostic> require_linking_pattern(const Domain& domain, const Problem& problem) {
  std::vector<Diagnostic> diagnostics;
  std::set<std::string> tag_predicates;

  for (const auto& schema : domain.actions) {
    // Collect the fd_solve_f links; each one anchors a full pattern chain.
    std::vector<const Literal*> links;
    for (const auto& lit : schema.preconditions) {
      if (!lit.negated && lit.atom.predicate == kSolveF && lit.atom.args.size() == 2) {
        links.push_back(&lit);
      }
    }
    if (links.empty()) {
      diagnostics.push_back(make_diag(
          domain.name, "action \"" + schema.name + "\" has no (fd_solve_f ?fd ?f) precondition"));
      continue;
    }
    for (const Literal* link : links) {
      const Term& fd = link->atom.args[0];
      const Term& fn = link->atom.args[1];

      bool has_available = std::any_of(
          schema.preconditions.begin(), schema.preconditions.end(), [&](const Literal& lit) {
            return !lit.negated && lit.atom.predicate == kAvailable && lit.atom.args.size() == 1 &&
                   lit.atom.args[0] == fd;
          });
      if (!has_available) {
        diagnostics.push_back(make_diag(
            domain.name, "action \"" + schema.name + "\" is missing (fd_available ...) for its \"" +
                             (fd.is_param() ? schema.parameters[fd.param].name : fd.constant) +
                             "\" design"));
      }

      const Literal* req = nullptr;
      for (const auto& lit : schema.preconditions) {
        if (!lit.negated && lit.atom.predicate == kReqF && lit.atom.args.size() == 2 &&
            lit.atom.args[1] == fn) {
          req = &lit;
          break;
        }
      }
      if (req == nullptr) {
        diagnostics.push_back(make_diag(
            domain.name, "action \"" + schema.name + "\" is missing (a_req_f ...) for its function"));
        continue;
      }

      const Term& action_obj = req->atom.args[0];
      bool has_tag = false;
      for (const auto& lit : schema.preconditions) {
        if (!lit.negated && !is_link_predicate(lit.atom.predicate) && lit.atom.args.size() == 1 &&
            lit.atom.args[0] == action_obj) {
          has_tag = true;
          tag_predicates.insert(lit.atom.predicate);
        }
      }
      if (!has_tag) {
        diagnostics.push_back(make_diag(
            domain.name,
            "action \"" + schema.name + "\" has no action-tag literal over its action object"));
      }
    }
  }

  // Every tagged action object must be linked to a function in init.
  std::set<std::string> linked;
  for (const auto& atom : problem.init) {
    if (atom.predicate == kReqF && atom.args.size() == 2) linked.insert(atom.args[0]);
  }
  for (const auto& atom : problem.init) {
    if (tag_predicates.count(atom.predicate) && atom.args.size() == 1 &&
        !linked.count(atom.args[0])) {
      diagnostics.push_back(make_diag(
          problem.name, "action object \"" + atom.args[0] + "\" has no (a_req_f " + atom.args[0] +
                            " ...) fact in init"));
    }
  }
  return diagnostics;
}

Problem update_problem(const Problem& problem, const std::set<std::string>& available,
                       const std::set<std::pair<std::string, std::string>>& contextual) {
  for (const auto& id : available) {
    if (!problem.object_type(id)) {
      throw std::invalid_argument("update_problem: unknown object \"" + id + "\"");
    }
  }
  for (const auto& [design, ctx] : contextual) {
    if (!problem.object_type(design)) {
      throw std::invalid_argument("update_problem: unknown object \"" + design + "\"");
    }
    if (!problem.object_type(ctx)) {
      throw std::invalid_argument("update_problem: unknown object \"" + ctx + "\"");
    }
  }

  Problem next = problem;
  next.init.erase(std::remove_if(next.init.begin(), next.init.end(),
                                 [](const GroundAtom& atom) {
                                   return atom.predicate == kAvailable ||
                                          atom.predicate == kAllowedOn;
                                 }),
                  next.init.end());
  for (const auto& id : available) {
    next.init.push_back(GroundAtom{kAvailable, {id}});
  }
  for (const auto& [design, ctx] : contextual) {
    next.init.push_back(GroundAtom{kAllowedOn, {design, ctx}});
  }
  return next;
}

}  // namespace coadapt::pddl
