#pragma once

// First-order sentences over rooted trees, vocabulary {R, =, parent}.
// Terms are plain (a variable or the constant R); parent takes terms only,
// which keeps the equivalence-class space finite.

#include <algorithm>
#include <cctype>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gwfo/error.hpp"

namespace gwfo {

struct Term {
  bool is_root = false;  // the constant R
  std::string var;       // valid when !is_root
  friend bool operator==(const Term&, const Term&) = default;
};

enum class NodeKind { Not, And, Or, Implies, Exists, Forall, Eq, Parent };

struct Sentence {
  NodeKind kind{};
  std::vector<Sentence> args;  // connectives and quantifier bodies
  std::string var;             // quantified variable
  Term lhs, rhs;               // atoms
};

inline int quantifier_depth(const Sentence& s) {
  int inner = 0;
  for (const auto& a : s.args) inner = std::max(inner, quantifier_depth(a));
  if (s.kind == NodeKind::Exists || s.kind == NodeKind::Forall) return inner + 1;
  return inner;
}

namespace detail {

struct SexpTokenizer {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    if (pos >= text.size()) fail("syntax-error", "unexpected end of sentence text");
    return text[pos];
  }
  void expect(char ch) {
    if (peek() != ch)
      fail("syntax-error", std::string("expected '") + ch + "' at offset " + std::to_string(pos));
    ++pos;
  }
  std::string symbol() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
           text[pos] != '(' && text[pos] != ')')
      ++pos;
    if (start == pos) fail("syntax-error", "expected a symbol at offset " + std::to_string(pos));
    return std::string(text.substr(start, pos - start));
  }
};

inline Term parse_term(SexpTokenizer& tok) {
  if (tok.peek() == '(') {
    std::size_t at = tok.pos;
    ++tok.pos;
    std::string head = tok.symbol();
    if (head == "parent")
      fail("nested-parent-term", "parent terms cannot be nested (offset " + std::to_string(at) + ")");
    fail("syntax-error", "expected a term at offset " + std::to_string(at));
  }
  std::string sym = tok.symbol();
  if (sym == "R") return Term{true, {}};
  return Term{false, sym};
}

inline Sentence parse_expr(SexpTokenizer& tok) {
  tok.expect('(');
  std::string head = tok.symbol();
  Sentence node;
  auto sub = [&] { return parse_expr(tok); };
  if (head == "not") {
    node.kind = NodeKind::Not;
    node.args.push_back(sub());
  } else if (head == "and" || head == "or") {
    node.kind = head == "and" ? NodeKind::And : NodeKind::Or;
    while (tok.peek() != ')') node.args.push_back(sub());
    if (node.args.empty()) fail("syntax-error", "'" + head + "' needs at least one argument");
  } else if (head == "implies") {
    node.kind = NodeKind::Implies;
    node.args.push_back(sub());
    node.args.push_back(sub());
  } else if (head == "exists" || head == "forall") {
    node.kind = head == "exists" ? NodeKind::Exists : NodeKind::Forall;
    node.var = tok.symbol();
    if (node.var == "R") fail("syntax-error", "cannot quantify over the constant R");
    node.args.push_back(sub());
  } else if (head == "=") {
    node.kind = NodeKind::Eq;
    node.lhs = parse_term(tok);
    node.rhs = parse_term(tok);
  } else if (head == "parent") {
    node.kind = NodeKind::Parent;
    node.lhs = parse_term(tok);
    node.rhs = parse_term(tok);
  } else {
    fail("syntax-error", "unknown operator '" + head + "'");
  }
  tok.expect(')');
  return node;
}

inline void check_closed(const Sentence& s, std::set<std::string>& bound) {
  auto check_term = [&](const Term& t) {
    if (!t.is_root && !bound.contains(t.var))
      fail("free-variable", "variable '" + t.var + "' is not bound");
  };
  switch (s.kind) {
    case NodeKind::Eq:
    case NodeKind::Parent:
      check_term(s.lhs);
      check_term(s.rhs);
      break;
    case NodeKind::Exists:
    case NodeKind::Forall: {
      bool fresh = bound.insert(s.var).second;
      check_closed(s.args[0], bound);
      if (fresh) bound.erase(s.var);
      break;
    }
    default:
      for (const auto& a : s.args) check_closed(a, bound);
  }
}

}  // namespace detail

inline Sentence parse_sentence(std::string_view text) {
  detail::SexpTokenizer tok{text};
  Sentence s = detail::parse_expr(tok);
  if (!tok.at_end()) fail("syntax-error", "trailing characters after sentence");
  std::set<std::string> bound;
  detail::check_closed(s, bound);
  return s;
}

inline std::string format_sentence(const Sentence& s) {
  auto term = [](const Term& t) { return t.is_root ? std::string("R") : t.var; };
  switch (s.kind) {
    case NodeKind::Not:
      return "(not " + format_sentence(s.args[0]) + ")";
    case NodeKind::And:
    case NodeKind::Or: {
      std::string out = s.kind == NodeKind::And ? "(and" : "(or";
      for (const auto& a : s.args) out += " " + format_sentence(a);
      return out + ")";
    }
    case NodeKind::Implies:
      return "(implies " + format_sentence(s.args[0]) + " " + format_sentence(s.args[1]) + ")";
    case NodeKind::Exists:
      return "(exists " + s.var + " " + format_sentence(s.args[0]) + ")";
    case NodeKind::Forall:
      return "(forall " + s.var + " " + format_sentence(s.args[0]) + ")";
    case NodeKind::Eq:
      return "(= " + term(s.lhs) + " " + term(s.rhs) + ")";
    case NodeKind::Parent:
      return "(parent " + term(s.lhs) + " " + term(s.rhs) + ")";
  }
  fail("usage", "unreachable sentence kind");
}

}  // namespace gwfo
