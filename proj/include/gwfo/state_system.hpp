#pragma once

// Finite state systems: a state space, a cap threshold kappa, a recursion
// function over capped child-state counts, and an accepting set. Systems are
// either rule-based (hand-written files, first matching rule wins, mandatory
// default) or compiled (representatives plus a quantifier depth k; the
// recursion function is recovered by classification).
//
// File format (line oriented, '#' starts a comment):
//   states: <name>+
//   threshold: <kappa>
//   accept: <name>*
//   rule: <state> n[<state>]=<0..kappa-1|w|*> ...   (unmentioned = *)
//   default: <state>
//   k: <depth>            (compiled systems)
//   rep: <state> <tree>   (compiled systems, one per state)

#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gwfo/error.hpp"
#include "gwfo/tree.hpp"

namespace gwfo {

// Entries range over {0, .., kappa-1, kappa}; the value kappa encodes omega,
// meaning "at least kappa".
using CountVector = std::vector<int>;

inline int capped(int raw, int kappa) { return raw < kappa ? raw : kappa; }

struct Rule {
  int state = -1;
  CountVector pattern;  // per-state: 0..kappa for literal/omega, -1 wildcard
};

class StateSystem {
 public:
  StateSystem(std::vector<std::string> names, int threshold)
      : names_(std::move(names)), threshold_(threshold) {
    if (names_.empty()) fail("parse-error", "a system needs at least one state");
    if (threshold_ < 1) fail("parse-error", "threshold must be at least 1");
  }

  int num_states() const { return static_cast<int>(names_.size()); }
  int threshold() const { return threshold_; }
  int omega() const { return threshold_; }
  const std::string& state_name(int j) const { return names_[j]; }
  const std::vector<std::string>& state_names() const { return names_; }

  int state_index(std::string_view name) const {
    for (int j = 0; j < num_states(); ++j)
      if (names_[j] == name) return j;
    fail("unknown-state", "unknown state name '" + std::string(name) + "'");
  }

  const std::vector<int>& accept() const { return accept_; }
  void set_accept(std::vector<int> a) { accept_ = std::move(a); }
  bool accepts(int j) const {
    for (int a : accept_)
      if (a == j) return true;
    return false;
  }

  // rule engine -----------------------------------------------------------
  void add_rule(Rule r) { rules_.push_back(std::move(r)); }
  void set_default_state(int j) { default_state_ = j; }
  const std::vector<Rule>& rules() const { return rules_; }
  int default_state() const { return default_state_; }
  bool rule_based() const { return default_state_ >= 0; }

  int apply_rules(const CountVector& counts) const {
    if (!rule_based()) fail("usage", "system has no rule-based recursion function");
    if (static_cast<int>(counts.size()) != num_states())
      fail("dimension-mismatch", "count vector has the wrong state count");
    for (const auto& r : rules_) {
      bool match = true;
      for (int j = 0; j < num_states() && match; ++j)
        match = r.pattern[j] < 0 || r.pattern[j] == counts[j];
      if (match) return r.state;
    }
    return default_state_;
  }

  // compiled systems ------------------------------------------------------
  void set_compiled(int k, std::vector<RootedTree> reps) {
    if (static_cast<int>(reps.size()) != num_states())
      fail("parse-error", "compiled systems need one representative per state");
    k_ = k;
    reps_ = std::move(reps);
  }
  bool compiled() const { return k_.has_value(); }
  int quantifier_rank() const {
    if (!k_) fail("usage", "system is not compiled");
    return *k_;
  }
  const std::vector<RootedTree>& representatives() const {
    if (!k_) fail("usage", "system is not compiled");
    return reps_;
  }

 private:
  std::vector<std::string> names_;
  int threshold_;
  std::vector<int> accept_;
  std::vector<Rule> rules_;
  int default_state_ = -1;
  std::optional<int> k_;
  std::vector<RootedTree> reps_;
};

namespace detail {

inline std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

inline int parse_count_value(std::string_view v, int kappa, int line_no) {
  if (v == "*") return -1;
  if (v == "w") return kappa;
  int value = 0;
  for (char ch : v) {
    if (ch < '0' || ch > '9')
      fail("parse-error", "bad count value '" + std::string(v) + "' on line " + std::to_string(line_no));
    value = value * 10 + (ch - '0');
  }
  if (value >= kappa)
    fail("parse-error", "count value " + std::to_string(value) + " is not below the threshold (line " +
                            std::to_string(line_no) + ")");
  return value;
}

}  // namespace detail

inline StateSystem load_system(std::string_view text) {
  std::vector<std::string> names;
  int threshold = -1;
  std::vector<std::string> accept_names;
  struct PendingRule {
    std::string state;
    std::vector<std::pair<std::string, std::string>> entries;
    int line_no;
  };
  std::vector<PendingRule> pending_rules;
  std::string default_name;
  std::optional<int> k;
  std::vector<std::pair<std::string, std::string>> rep_lines;  // state, tree text

  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto words = detail::split_words(line);
    if (words.empty()) continue;
    const std::string& head = words[0];
    auto rest = std::vector<std::string>(words.begin() + 1, words.end());
    if (head == "states:") {
      names = rest;
    } else if (head == "threshold:") {
      if (rest.size() != 1) fail("parse-error", "threshold needs one value (line " + std::to_string(line_no) + ")");
      threshold = std::stoi(rest[0]);
    } else if (head == "accept:") {
      accept_names = rest;
    } else if (head == "rule:") {
      if (rest.empty()) fail("parse-error", "rule needs a target state (line " + std::to_string(line_no) + ")");
      PendingRule r{rest[0], {}, line_no};
      for (std::size_t i = 1; i < rest.size(); ++i) {
        const std::string& e = rest[i];
        auto open = e.find("n[");
        auto close = e.find("]=");
        if (open != 0 || close == std::string::npos)
          fail("parse-error", "bad rule entry '" + e + "' on line " + std::to_string(line_no));
        r.entries.emplace_back(e.substr(2, close - 2), e.substr(close + 2));
      }
      pending_rules.push_back(std::move(r));
    } else if (head == "default:") {
      if (rest.size() != 1) fail("parse-error", "default needs one state (line " + std::to_string(line_no) + ")");
      default_name = rest[0];
    } else if (head == "k:") {
      if (rest.size() != 1) fail("parse-error", "k needs one value (line " + std::to_string(line_no) + ")");
      k = std::stoi(rest[0]);
    } else if (head == "rep:") {
      if (rest.size() < 2) fail("parse-error", "rep needs a state and a tree (line " + std::to_string(line_no) + ")");
      std::string tree_text;
      for (std::size_t i = 1; i < rest.size(); ++i) tree_text += rest[i];
      rep_lines.emplace_back(rest[0], tree_text);
    } else {
      fail("parse-error", "unknown directive '" + head + "' on line " + std::to_string(line_no));
    }
  }

  if (names.empty()) fail("parse-error", "missing states: line");
  if (threshold < 1) fail("parse-error", "missing or invalid threshold: line");
  StateSystem sys(names, threshold);

  std::vector<int> accept;
  for (const auto& a : accept_names) accept.push_back(sys.state_index(a));
  sys.set_accept(std::move(accept));

  for (const auto& pr : pending_rules) {
    Rule r;
    r.state = sys.state_index(pr.state);
    r.pattern.assign(sys.num_states(), -1);
    for (const auto& [state_name, value] : pr.entries)
      r.pattern[sys.state_index(state_name)] = detail::parse_count_value(value, threshold, pr.line_no);
    sys.add_rule(std::move(r));
  }

  if (!rep_lines.empty() || k.has_value()) {
    if (!k.has_value()) fail("parse-error", "representatives need a k: line");
    std::vector<RootedTree> reps(sys.num_states());
    std::vector<bool> have(sys.num_states(), false);
    for (const auto& [state_name, tree_text] : rep_lines) {
      int j = sys.state_index(state_name);
      reps[j] = parse_tree(tree_text);
      have[j] = true;
    }
    for (int j = 0; j < sys.num_states(); ++j)
      if (!have[j]) fail("parse-error", "state '" + sys.state_name(j) + "' has no representative");
    sys.set_compiled(*k, std::move(reps));
    if (!default_name.empty()) sys.set_default_state(sys.state_index(default_name));
  } else {
    if (default_name.empty()) fail("missing-default", "rule-based systems need a default: line");
    sys.set_default_state(sys.state_index(default_name));
  }
  return sys;
}

// Loads a hand-written rule-based system (no representatives).
inline StateSystem load_manual_system(std::string_view text) {
  StateSystem sys = load_system(text);
  if (sys.compiled()) fail("parse-error", "expected a manual system without representatives");
  return sys;
}

inline std::string save_system(const StateSystem& sys) {
  std::string out = "states:";
  for (const auto& n : sys.state_names()) out += " " + n;
  out += "\nthreshold: " + std::to_string(sys.threshold()) + "\naccept:";
  for (int j : sys.accept()) out += " " + sys.state_name(j);
  out += '\n';
  for (const auto& r : sys.rules()) {
    out += "rule: " + sys.state_name(r.state);
    for (int j = 0; j < sys.num_states(); ++j) {
      if (r.pattern[j] < 0) continue;
      out += " n[" + sys.state_name(j) + "]=";
      out += r.pattern[j] == sys.threshold() ? "w" : std::to_string(r.pattern[j]);
    }
    out += '\n';
  }
  if (sys.default_state() >= 0) out += "default: " + sys.state_name(sys.default_state()) + '\n';
  if (sys.compiled()) {
    out += "k: " + std::to_string(sys.quantifier_rank()) + '\n';
    for (int j = 0; j < sys.num_states(); ++j)
      out += "rep: " + sys.state_name(j) + " " + format_tree(sys.representatives()[j]) + '\n';
  }
  return out;
}

}  // namespace gwfo
