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

#include "coadapt/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>
#include <sstream>

namespace coadapt::pddl {

namespace {

std::string lowercase(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return text;
}

// ---------------------------------------------------------------------------
// S-expression reader
// ---------------------------------------------------------------------------

struct Node {
  bool is_list = false;
  std::string atom;
  std::vector<Node> children;
  SourcePos pos;

  bool is_symbol() const { return !is_list; }
};

class Reader {
 public:
  Reader(const std::string& text, std::string file) : text_(text), file_(std::move(file)) {}

  std::vector<Node> read_all() {
    std::vector<Node> nodes;
    skip_space();
    while (!eof()) {
      nodes.push_back(read_node());
      skip_space();
    }
    return nodes;
  }

  const std::string& file() const { return file_; }

 private:
  bool eof() const { return index_ >= text_.size(); }
  char peek() const { return text_[index_]; }

  char advance() {
    char c = text_[index_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (!eof()) {
      char c = peek();
      if (c == ';') {
        while (!eof() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Node read_node() {
    SourcePos pos{line_, col_};
    if (peek() == '(') {
      advance();
      Node node;
      node.is_list = true;
      node.pos = pos;
      skip_space();
      while (!eof() && peek() != ')') {
        node.children.push_back(read_node());
        skip_space();
      }
      if (eof()) throw ParseError(file_, pos, "unterminated list");
      advance();  // ')'
      return node;
    }
    if (peek() == ')') throw ParseError(file_, pos, "unexpected \")\"");
    Node node;
    node.pos = pos;
    std::string atom;
    while (!eof() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != '(' &&
           peek() != ')' && peek() != ';') {
      atom.push_back(advance());
    }
    node.atom = std::move(atom);
    return node;
  }

  const std::string& text_;
  std::string file_;
  std::size_t index_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool is_number_token(const std::string& atom) {
  if (atom.empty()) return false;
  std::size_t i = 0;
  if (atom[0] == '+' || atom[0] == '-') i = 1;
  if (i >= atom.size()) return false;
  bool digit_seen = false;
  bool dot_seen = false;
  for (; i < atom.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(atom[i]))) {
      digit_seen = true;
    } else if (atom[i] == '.' && !dot_seen) {
      dot_seen = true;
    } else {
      return false;
    }
  }
  return digit_seen;
}

// ---------------------------------------------------------------------------
// Shared builder utilities
// ---------------------------------------------------------------------------

class Builder {
 public:
  explicit Builder(std::string file) : file_(std::move(file)) {}

 protected:
  [[noreturn]] void error(const Node& node, const std::string& message) const {
    throw ParseError(file_, node.pos, message);
  }

  const Node& expect_list(const Node& node, const std::string& what) const {
    if (!node.is_list) error(node, "expected " + what + ", got \"" + node.atom + "\"");
    return node;
  }

  const std::string& expect_symbol(const Node& node, const std::string& what) const {
    if (node.is_list) error(node, "expected " + what);
    return node.atom;
  }

  bool head_is(const Node& node, const std::string& keyword) const {
    return node.is_list && !node.children.empty() && node.children[0].is_symbol() &&
           lowercase(node.children[0].atom) == keyword;
  }

  // "(a b - t c)" style typed lists; untyped trailing names get "object".
  std::vector<TypedName> parse_typed_list(const std::vector<Node>& nodes, std::size_t begin,
                                          bool variables) const {
    std::vector<TypedName> result;
    std::vector<std::string> pending;
    for (std::size_t i = begin; i < nodes.size(); ++i) {
      const std::string& token = expect_symbol(nodes[i], "name");
      if (token == "-") {
        if (i + 1 >= nodes.size()) error(nodes[i], "type name expected after \"-\"");
        const std::string& type = expect_symbol(nodes[i + 1], "type name");
        for (auto& name : pending) result.push_back(TypedName{name, type});
        pending.clear();
        ++i;
        continue;
      }
      if (variables && token[0] != '?') error(nodes[i], "expected a ?variable, got \"" + token + "\"");
      if (!variables && token[0] == '?') error(nodes[i], "unexpected variable \"" + token + "\"");
      pending.push_back(token);
    }
    for (auto& name : pending) result.push_back(TypedName{name, "object"});
    return result;
  }

  std::string file_;
};

// ---------------------------------------------------------------------------
// Domain builder
// ---------------------------------------------------------------------------

const std::vector<std::string> kKnownRequirements = {
    ":strips",         ":typing",         ":negative-preconditions",
    ":numeric-fluents", ":fluents",       ":action-costs",
    ":durative-actions"};

// Cost convention for the subset: the metric fluent of every shipped problem.
constexpr const char* kCostFluent = "total-cost";

class DomainBuilder : Builder {
 public:
  explicit DomainBuilder(std::string file) : Builder(std::move(file)) {}

  Domain build(const Node& root) {
    expect_list(root, "(define ...)");
    if (root.children.size() < 2 || lowercase(expect_symbol(root.children[0], "define")) != "define")
      error(root, "expected (define (domain ...) ...)");
    const Node& head = expect_list(root.children[1], "(domain name)");
    if (head.children.size() != 2 || lowercase(head.children[0].atom) != "domain")
      error(head, "expected (domain name)");
    domain_.name = expect_symbol(head.children[1], "domain name");
    domain_.types["object"] = "";

    for (std::size_t i = 2; i < root.children.size(); ++i) {
      const Node& section = expect_list(root.children[i], "domain section");
      if (section.children.empty()) error(section, "empty section");
      const std::string keyword = lowercase(expect_symbol(section.children[0], "section keyword"));
      if (keyword == ":requirements") {
        parse_requirements(section);
      } else if (keyword == ":types") {
        parse_types(section);
      } else if (keyword == ":predicates") {
        parse_signatures(section, domain_.predicates);
      } else if (keyword == ":functions") {
        parse_signatures(section, domain_.fluents);
      } else if (keyword == ":action") {
        parse_action(section, false);
      } else if (keyword == ":durative-action") {
        parse_action(section, true);
      } else {
        error(section, "unknown domain section \"" + keyword + "\"");
      }
    }
    return domain_;
  }

 private:
  void parse_requirements(const Node& section) {
    for (std::size_t i = 1; i < section.children.size(); ++i) {
      const std::string flag = lowercase(expect_symbol(section.children[i], "requirement flag"));
      if (std::find(kKnownRequirements.begin(), kKnownRequirements.end(), flag) ==
          kKnownRequirements.end()) {
        error(section.children[i], "unknown requirement flag \"" + flag + "\"");
      }
      domain_.requirements.push_back(flag);
    }
  }

  void parse_types(const Node& section) {
    auto typed = parse_typed_list(section.children, 1, false);
    for (const auto& entry : typed) {
      // A type first seen as somebody's parent may still be declared later.
      if (domain_.types.count(entry.name) && entry.name != "object" &&
          !implicit_types_.count(entry.name)) {
        error(section, "duplicate type \"" + entry.name + "\"");
      }
      implicit_types_.erase(entry.name);
      domain_.types[entry.name] = entry.type == entry.name ? "object" : entry.type;
      if (!domain_.types.count(entry.type)) {
        domain_.types[entry.type] = "object";
        implicit_types_.insert(entry.type);
      }
    }
  }

  void parse_signatures(const Node& section, std::vector<PredicateDef>& out) {
    for (std::size_t i = 1; i < section.children.size(); ++i) {
      const Node& decl = expect_list(section.children[i], "declaration");
      if (decl.children.empty()) error(decl, "empty declaration");
      PredicateDef def;
      def.name = expect_symbol(decl.children[0], "name");
      for (const auto& existing : out) {
        if (existing.name == def.name) error(decl, "duplicate declaration of \"" + def.name + "\"");
      }
      def.parameters = parse_typed_list(decl.children, 1, true);
      for (const auto& param : def.parameters) {
        if (!domain_.types.count(param.type))
          error(decl, "undeclared type \"" + param.type + "\" in \"" + def.name + "\"");
      }
      out.push_back(std::move(def));
    }
  }

  // --- action bodies ---

  int param_index(const ActionSchema& schema, const Node& node) const {
    const std::string& name = node.atom;
    for (std::size_t i = 0; i < schema.parameters.size(); ++i) {
      if (schema.parameters[i].name == name) return static_cast<int>(i);
    }
    error(node, "unbound variable \"" + name + "\"");
  }

  Term parse_term(const ActionSchema& schema, const Node& node) const {
    const std::string& token = expect_symbol(node, "term");
    if (!token.empty() && token[0] == '?') return Term::parameter(param_index(schema, node));
    error(node, "undeclared constant \"" + token + "\" (domains carry no :constants in this subset)");
  }

  Atom parse_atom(const ActionSchema& schema, const Node& node) const {
    const Node& list = expect_list(node, "atom");
    if (list.children.empty()) error(node, "empty atom");
    Atom atom;
    atom.predicate = expect_symbol(list.children[0], "predicate name");
    const PredicateDef* def = domain_.find_predicate(atom.predicate);
    if (def == nullptr) error(list, "undeclared predicate \"" + atom.predicate + "\"");
    if (def->parameters.size() != list.children.size() - 1)
      error(list, "arity mismatch for \"" + atom.predicate + "\"");
    for (std::size_t i = 1; i < list.children.size(); ++i)
      atom.args.push_back(parse_term(schema, list.children[i]));
    return atom;
  }

  NumericExpr parse_expr(const ActionSchema& schema, const Node& node) const {
    NumericExpr expr;
    if (node.is_symbol()) {
      if (!is_number_token(node.atom)) error(node, "expected a number or fluent expression");
      expr.op = ExprOp::Constant;
      expr.value = std::strtod(node.atom.c_str(), nullptr);
      return expr;
    }
    if (node.children.empty()) error(node, "empty expression");
    const std::string head = expect_symbol(node.children[0], "expression head");
    if (head == "+" || head == "-" || head == "*" || head == "/") {
      if (node.children.size() < 3) error(node, "operator \"" + head + "\" needs two operands");
      ExprOp op = head == "+"   ? ExprOp::Add
                  : head == "-" ? ExprOp::Sub
                  : head == "*" ? ExprOp::Mul
                                : ExprOp::Div;
      // Left-fold n-ary applications into binary nodes.
      NumericExpr acc = parse_expr(schema, node.children[1]);
      for (std::size_t i = 2; i < node.children.size(); ++i) {
        NumericExpr next;
        next.op = op;
        next.lhs = std::make_shared<NumericExpr>(std::move(acc));
        next.rhs = std::make_shared<NumericExpr>(parse_expr(schema, node.children[i]));
        acc = std::move(next);
      }
      return acc;
    }
    const PredicateDef* def = domain_.find_fluent(head);
    if (def == nullptr) error(node, "undeclared fluent \"" + head + "\"");
    if (def->parameters.size() != node.children.size() - 1)
      error(node, "arity mismatch for fluent \"" + head + "\"");
    expr.op = ExprOp::Fluent;
    expr.fluent = head;
    for (std::size_t i = 1; i < node.children.size(); ++i)
      expr.fluent_args.push_back(parse_term(schema, node.children[i]));
    return expr;
  }

  static std::optional<CmpOp> comparator(const std::string& head) {
    if (head == "<") return CmpOp::Lt;
    if (head == "<=") return CmpOp::Le;
    if (head == ">") return CmpOp::Gt;
    if (head == ">=") return CmpOp::Ge;
    if (head == "=") return CmpOp::Eq;
    return std::nullopt;
  }

  void parse_condition(ActionSchema& schema, const Node& node) const {
    const Node& list = expect_list(node, "condition");
    if (list.children.empty()) return;  // empty conjunction
    const std::string head = list.children[0].is_symbol() ? list.children[0].atom : "";
    if (lowercase(head) == "and") {
      for (std::size_t i = 1; i < list.children.size(); ++i) parse_condition(schema, list.children[i]);
      return;
    }
    if (lowercase(head) == "not") {
      if (list.children.size() != 2) error(list, "(not ...) takes one literal");
      schema.preconditions.push_back(Literal{parse_atom(schema, list.children[1]), true});
      return;
    }
    if (auto op = comparator(head)) {
      if (list.children.size() != 3) error(list, "comparison takes two operands");
      Comparison cmp;
      cmp.op = *op;
      cmp.lhs = parse_expr(schema, list.children[1]);
      cmp.rhs = parse_expr(schema, list.children[2]);
      schema.numeric_preconditions.push_back(std::move(cmp));
      return;
    }
    schema.preconditions.push_back(Literal{parse_atom(schema, node), false});
  }

  void parse_effect(ActionSchema& schema, const Node& node) const {
    const Node& list = expect_list(node, "effect");
    if (list.children.empty()) return;
    const std::string head = list.children[0].is_symbol() ? lowercase(list.children[0].atom) : "";
    if (head == "and") {
      for (std::size_t i = 1; i < list.children.size(); ++i) parse_effect(schema, list.children[i]);
      return;
    }
    if (head == "not") {
      if (list.children.size() != 2) error(list, "(not ...) takes one atom");
      schema.effects.push_back(Literal{parse_atom(schema, list.children[1]), true});
      return;
    }
    if (head == "assign" || head == "increase" || head == "decrease") {
      if (list.children.size() != 3) error(list, "numeric effect takes a fluent and an expression");
      NumericEffect effect;
      effect.kind = head == "assign"     ? NumericEffectKind::Assign
                    : head == "increase" ? NumericEffectKind::Increase
                                         : NumericEffectKind::Decrease;
      NumericExpr target = parse_expr(schema, list.children[1]);
      if (target.op != ExprOp::Fluent) error(list.children[1], "numeric effect target must be a fluent");
      effect.fluent = target.fluent;
      effect.fluent_args = target.fluent_args;
      effect.expr = parse_expr(schema, list.children[2]);
      schema.numeric_effects.push_back(std::move(effect));
      return;
    }
    schema.effects.push_back(Literal{parse_atom(schema, node), false});
  }

  // Durative forms collapse to sequential semantics: every start/overall
  // condition is a precondition, every timed effect is a plain effect, and
  // the duration becomes the cost unless an explicit cost effect exists.
  void parse_action(const Node& section, bool durative) {
    ActionSchema schema;
    std::optional<NumericExpr> duration;
    std::size_t i = 1;
    schema.name = expect_symbol(section.children.at(i++), "action name");
    if (domain_.find_action(schema.name) != nullptr)
      error(section, "duplicate action \"" + schema.name + "\"");
    while (i < section.children.size()) {
      const std::string keyword = lowercase(expect_symbol(section.children[i], "action keyword"));
      if (i + 1 >= section.children.size()) error(section.children[i], "missing value after " + keyword);
      const Node& value = section.children[i + 1];
      if (keyword == ":parameters") {
        schema.parameters = parse_typed_list(expect_list(value, "parameter list").children, 0, true);
        for (const auto& param : schema.parameters) {
          if (!domain_.types.count(param.type))
            error(value, "undeclared type \"" + param.type + "\"");
        }
      } else if (keyword == ":precondition" || (durative && keyword == ":condition")) {
        if (durative) {
          parse_timed_condition(schema, value);
        } else {
          parse_condition(schema, value);
        }
      } else if (keyword == ":effect") {
        if (durative) {
          parse_timed_effect(schema, value);
        } else {
          parse_effect(schema, value);
        }
      } else if (durative && keyword == ":duration") {
        duration = parse_duration(schema, value);
      } else {
        error(section.children[i], "unknown action keyword \"" + keyword + "\"");
      }
      i += 2;
    }
    if (duration && !has_cost_effect(schema)) {
      NumericEffect cost;
      cost.kind = NumericEffectKind::Increase;
      cost.fluent = kCostFluent;
      cost.expr = *duration;
      if (domain_.find_fluent(kCostFluent) != nullptr) schema.numeric_effects.push_back(cost);
    }
    domain_.actions.push_back(std::move(schema));
  }

  bool has_cost_effect(const ActionSchema& schema) const {
    return std::any_of(schema.numeric_effects.begin(), schema.numeric_effects.end(),
                       [](const NumericEffect& e) {
                         return e.kind == NumericEffectKind::Increase && e.fluent == kCostFluent;
                       });
  }

  NumericExpr parse_duration(const ActionSchema& schema, const Node& node) const {
    const Node& list = expect_list(node, "duration constraint");
    if (list.children.size() != 3 || !list.children[0].is_symbol() || list.children[0].atom != "=" ||
        !list.children[1].is_symbol() || lowercase(list.children[1].atom) != "?duration") {
      error(node, "duration must have the form (= ?duration <expr>)");
    }
    return parse_expr(schema, list.children[2]);
  }

  void parse_timed_condition(ActionSchema& schema, const Node& node) const {
    const Node& list = expect_list(node, "condition");
    if (list.children.empty()) return;
    if (head_is(node, "and")) {
      for (std::size_t i = 1; i < list.children.size(); ++i)
        parse_timed_condition(schema, list.children[i]);
      return;
    }
    if (head_is(node, "at") || head_is(node, "over")) {
      if (list.children.size() != 3) error(node, "timed condition takes a qualifier and a condition");
      const std::string when = lowercase(expect_symbol(list.children[1], "time qualifier"));
      const std::string head = lowercase(expect_symbol(list.children[0], "at/over"));
      if (head == "at" && when == "end")
        error(node, "(at end ...) conditions have no sequential reading in this subset");
      if ((head == "at" && when != "start") || (head == "over" && when != "all"))
        error(node, "expected (at start ...) or (over all ...)");
      parse_condition(schema, list.children[2]);
      return;
    }
    error(node, "durative conditions must be wrapped in (at start ...) or (over all ...)");
  }

  void parse_timed_effect(ActionSchema& schema, const Node& node) const {
    const Node& list = expect_list(node, "effect");
    if (list.children.empty()) return;
    if (head_is(node, "and")) {
      for (std::size_t i = 1; i < list.children.size(); ++i) parse_timed_effect(schema, list.children[i]);
      return;
    }
    if (head_is(node, "at")) {
      if (list.children.size() != 3) error(node, "timed effect takes a qualifier and an effect");
      const std::string when = lowercase(expect_symbol(list.children[1], "time qualifier"));
      if (when != "start" && when != "end") error(node, "expected (at start ...) or (at end ...)");
      parse_effect(schema, list.children[2]);
      return;
    }
    error(node, "durative effects must be wrapped in (at start ...) or (at end ...)");
  }

  Domain domain_;
  std::set<std::string> implicit_types_;
};

// ---------------------------------------------------------------------------
// Problem builder
// ---------------------------------------------------------------------------

class ProblemBuilder : Builder {
 public:
  ProblemBuilder(std::string file, const Domain& domain) : Builder(std::move(file)), domain_(domain) {}

  Problem build(const Node& root) {
    expect_list(root, "(define ...)");
    if (root.children.size() < 2 || lowercase(expect_symbol(root.children[0], "define")) != "define")
      error(root, "expected (define (problem ...) ...)");
    const Node& head = expect_list(root.children[1], "(problem name)");
    if (head.children.size() != 2 || lowercase(head.children[0].atom) != "problem")
      error(head, "expected (problem name)");
    problem_.name = expect_symbol(head.children[1], "problem name");

    for (std::size_t i = 2; i < root.children.size(); ++i) {
      const Node& section = expect_list(root.children[i], "problem section");
      if (section.children.empty()) error(section, "empty section");
      const std::string keyword = lowercase(expect_symbol(section.children[0], "section keyword"));
      if (keyword == ":domain") {
        problem_.domain_name = expect_symbol(section.children.at(1), "domain name");
        if (problem_.domain_name != domain_.name)
          error(section, "problem targets domain \"" + problem_.domain_name + "\", parsed against \"" +
                             domain_.name + "\"");
      } else if (keyword == ":objects") {
        problem_.objects = parse_typed_list(section.children, 1, false);
        for (const auto& object : problem_.objects) {
          if (!domain_.types.count(object.type))
            error(section, "object \"" + object.name + "\" has undeclared type \"" + object.type + "\"");
          if (objects_.count(object.name))
            error(section, "duplicate object \"" + object.name + "\"");
          objects_[object.name] = object.type;
        }
      } else if (keyword == ":init") {
        parse_init(section);
      } else if (keyword == ":goal") {
        if (section.children.size() != 2) error(section, ":goal takes one condition");
        parse_goal(section.children[1]);
      } else if (keyword == ":metric") {
        parse_metric(section);
      } else {
        error(section, "unknown problem section \"" + keyword + "\"");
      }
    }
    return problem_;
  }

 private:
  std::string object_type(const Node& node) const {
    const std::string& name = expect_symbol(node, "object name");
    auto it = objects_.find(name);
    if (it == objects_.end()) error(node, "undeclared object \"" + name + "\"");
    return it->second;
  }

  GroundAtom parse_ground_atom(const Node& node) const {
    const Node& list = expect_list(node, "atom");
    if (list.children.empty()) error(node, "empty atom");
    GroundAtom atom;
    atom.predicate = expect_symbol(list.children[0], "predicate name");
    const PredicateDef* def = domain_.find_predicate(atom.predicate);
    if (def == nullptr) error(list, "undeclared predicate \"" + atom.predicate + "\"");
    if (def->parameters.size() != list.children.size() - 1)
      error(list, "arity mismatch for \"" + atom.predicate + "\"");
    for (std::size_t i = 1; i < list.children.size(); ++i) {
      const std::string type = object_type(list.children[i]);
      if (!domain_.is_subtype(type, def->parameters[i - 1].type)) {
        error(list.children[i], "object \"" + list.children[i].atom + "\" of type \"" + type +
                                    "\" where \"" + def->parameters[i - 1].type + "\" expected");
      }
      atom.args.push_back(list.children[i].atom);
    }
    return atom;
  }

  GroundAtom parse_ground_fluent(const Node& node) const {
    const Node& list = expect_list(node, "fluent");
    if (list.children.empty()) error(node, "empty fluent");
    GroundAtom fluent;
    fluent.predicate = expect_symbol(list.children[0], "fluent name");
    const PredicateDef* def = domain_.find_fluent(fluent.predicate);
    if (def == nullptr) error(list, "undeclared fluent \"" + fluent.predicate + "\"");
    if (def->parameters.size() != list.children.size() - 1)
      error(list, "arity mismatch for fluent \"" + fluent.predicate + "\"");
    for (std::size_t i = 1; i < list.children.size(); ++i) {
      const std::string type = object_type(list.children[i]);
      if (!domain_.is_subtype(type, def->parameters[i - 1].type)) {
        error(list.children[i], "object \"" + list.children[i].atom + "\" of type \"" + type +
                                    "\" where \"" + def->parameters[i - 1].type + "\" expected");
      }
      fluent.args.push_back(list.children[i].atom);
    }
    return fluent;
  }

  void parse_init(const Node& section) {
    for (std::size_t i = 1; i < section.children.size(); ++i) {
      const Node& fact = expect_list(section.children[i], "init fact");
      if (!fact.children.empty() && fact.children[0].is_symbol() && fact.children[0].atom == "=") {
        if (fact.children.size() != 3) error(fact, "fluent init takes a fluent and a number");
        FluentInit init;
        init.fluent = parse_ground_fluent(fact.children[1]);
        const std::string& number = expect_symbol(fact.children[2], "number");
        if (!is_number_token(number)) error(fact.children[2], "expected a number");
        init.value = std::strtod(number.c_str(), nullptr);
        problem_.init_fluents.push_back(std::move(init));
      } else {
        problem_.init.push_back(parse_ground_atom(fact));
      }
    }
  }

  NumericExpr parse_ground_expr(const Node& node) const {
    NumericExpr expr;
    if (node.is_symbol()) {
      if (!is_number_token(node.atom)) error(node, "expected a number or fluent expression");
      expr.op = ExprOp::Constant;
      expr.value = std::strtod(node.atom.c_str(), nullptr);
      return expr;
    }
    if (node.children.empty()) error(node, "empty expression");
    const std::string head = expect_symbol(node.children[0], "expression head");
    if (head == "+" || head == "-" || head == "*" || head == "/") {
      if (node.children.size() != 3) error(node, "operator \"" + head + "\" needs two operands");
      expr.op = head == "+"   ? ExprOp::Add
                : head == "-" ? ExprOp::Sub
                : head == "*" ? ExprOp::Mul
                              : ExprOp::Div;
      expr.lhs = std::make_shared<NumericExpr>(parse_ground_expr(node.children[1]));
      expr.rhs = std::make_shared<NumericExpr>(parse_ground_expr(node.children[2]));
      return expr;
    }
    GroundAtom fluent = parse_ground_fluent(node);
    expr.op = ExprOp::Fluent;
    expr.fluent = fluent.predicate;
    for (const auto& arg : fluent.args) expr.fluent_args.push_back(Term::object(arg));
    return expr;
  }

  void parse_goal(const Node& node) {
    const Node& list = expect_list(node, "goal condition");
    if (list.children.empty()) return;
    const std::string head = list.children[0].is_symbol() ? lowercase(list.children[0].atom) : "";
    if (head == "and") {
      for (std::size_t i = 1; i < list.children.size(); ++i) parse_goal(list.children[i]);
      return;
    }
    if (head == "not") {
      if (list.children.size() != 2) error(list, "(not ...) takes one atom");
      GroundAtom atom = parse_ground_atom(list.children[1]);
      Literal literal;
      literal.negated = true;
      literal.atom.predicate = atom.predicate;
      for (const auto& arg : atom.args) literal.atom.args.push_back(Term::object(arg));
      problem_.goal.push_back(std::move(literal));
      return;
    }
    if (head == "<" || head == "<=" || head == ">" || head == ">=" || head == "=") {
      if (list.children.size() != 3) error(list, "comparison takes two operands");
      Comparison cmp;
      cmp.op = head == "<"    ? CmpOp::Lt
               : head == "<=" ? CmpOp::Le
               : head == ">"  ? CmpOp::Gt
               : head == ">=" ? CmpOp::Ge
                              : CmpOp::Eq;
      cmp.lhs = parse_ground_expr(list.children[1]);
      cmp.rhs = parse_ground_expr(list.children[2]);
      problem_.goal_numeric.push_back(std::move(cmp));
      return;
    }
    GroundAtom atom = parse_ground_atom(node);
    Literal literal;
    literal.atom.predicate = atom.predicate;
    for (const auto& arg : atom.args) literal.atom.args.push_back(Term::object(arg));
    problem_.goal.push_back(std::move(literal));
  }

  void parse_metric(const Node& section) {
    if (section.children.size() != 3) error(section, ":metric takes minimize and a fluent");
    if (lowercase(expect_symbol(section.children[1], "minimize")) != "minimize")
      error(section.children[1], "only \"minimize\" metrics are supported");
    const Node& fluent = expect_list(section.children[2], "metric fluent");
    if (fluent.children.size() != 1)
      error(fluent, "metric must be a single zero-ary fluent");
    const std::string& name = expect_symbol(fluent.children[0], "fluent name");
    if (domain_.find_fluent(name) == nullptr) error(fluent, "undeclared fluent \"" + name + "\"");
    problem_.metric_fluent = name;
  }

  const Domain& domain_;
  Problem problem_;
  std::map<std::string, std::string> objects_;
};

}  // namespace

ParseError::ParseError(std::string file, SourcePos pos, const std::string& message)
    : std::runtime_error(file + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.col) +
                         ": error: " + message),
      file_(std::move(file)),
      pos_(pos) {}

std::string Diagnostic::render() const {
  std::ostringstream out;
  out << file << ":" << pos.line << ":" << pos.col << ": " << severity << ": " << message;
  return out.str();
}

std::string to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Eq: return "=";
  }
  return "?";
}

bool Domain::is_subtype(const std::string& type, const std::string& ancestor) const {
  std::string current = type;
  while (true) {
    if (current == ancestor) return true;
    auto it = types.find(current);
    if (it == types.end() || it->second.empty()) return ancestor == "object" && current == "object";
    current = it->second;
  }
}

const PredicateDef* Domain::find_predicate(const std::string& name) const {
  for (const auto& def : predicates) {
    if (def.name == name) return &def;
  }
  return nullptr;
}

const PredicateDef* Domain::find_fluent(const std::string& name) const {
  for (const auto& def : fluents) {
    if (def.name == name) return &def;
  }
  return nullptr;
}

const ActionSchema* Domain::find_action(const std::string& name) const {
  for (const auto& action : actions) {
    if (action.name == name) return &action;
  }
  return nullptr;
}

std::string GroundAtom::key() const {
  std::string out = predicate;
  for (const auto& arg : args) {
    out.push_back(' ');
    out += arg;
  }
  return out;
}

std::optional<std::string> Problem::object_type(const std::string& name) const {
  for (const auto& object : objects) {
    if (object.name == name) return object.type;
  }
  return std::nullopt;
}

Domain parse_domain(const std::string& text, const std::string& file) {
  Reader reader(text, file);
  auto nodes = reader.read_all();
  if (nodes.size() != 1) {
    throw ParseError(file, nodes.empty() ? SourcePos{1, 1} : nodes[1].pos,
                     "expected exactly one (define ...) form");
  }
  return DomainBuilder(file).build(nodes[0]);
}

Problem parse_problem(const std::string& text, const Domain& domain, const std::string& file) {
  Reader reader(text, file);
  auto nodes = reader.read_all();
  if (nodes.size() != 1) {
    throw ParseError(file, nodes.empty() ? SourcePos{1, 1} : nodes[1].pos,
                     "expected exactly one (define ...) form");
  }
  return ProblemBuilder(file, domain).build(nodes[0]);
}

}  // namespace coadapt::pddl
