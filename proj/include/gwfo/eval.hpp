#pragma once

// Tarskian truth of a first-order sentence on a finite rooted tree.
// parent(a, b) holds iff a is not the root and b is a's parent; in
// particular parent(R, t) is false, never an error.

#include <string>
#include <utility>
#include <vector>

#include "gwfo/sentence.hpp"
#include "gwfo/tree.hpp"

namespace gwfo {

namespace detail {

struct Env {
  std::vector<std::pair<std::string, int>> frames;

  int resolve(const Term& t, const RootedTree& tree) const {
    if (t.is_root) return tree.root();
    for (auto it = frames.rbegin(); it != frames.rend(); ++it)
      if (it->first == t.var) return it->second;
    fail("free-variable", "variable '" + t.var + "' is not bound");
  }
};

inline bool eval_rec(const RootedTree& t, const Sentence& s, Env& env) {
  switch (s.kind) {
    case NodeKind::Not:
      return !eval_rec(t, s.args[0], env);
    case NodeKind::And:
      for (const auto& a : s.args)
        if (!eval_rec(t, a, env)) return false;
      return true;
    case NodeKind::Or:
      for (const auto& a : s.args)
        if (eval_rec(t, a, env)) return true;
      return false;
    case NodeKind::Implies:
      return !eval_rec(t, s.args[0], env) || eval_rec(t, s.args[1], env);
    case NodeKind::Exists:
    case NodeKind::Forall: {
      bool want = s.kind == NodeKind::Exists;
      env.frames.emplace_back(s.var, 0);
      for (int v = 0; v < t.size(); ++v) {
        env.frames.back().second = v;
        if (eval_rec(t, s.args[0], env) == want) {
          env.frames.pop_back();
          return want;
        }
      }
      env.frames.pop_back();
      return !want;
    }
    case NodeKind::Eq:
      return env.resolve(s.lhs, t) == env.resolve(s.rhs, t);
    case NodeKind::Parent: {
      int a = env.resolve(s.lhs, t);
      int b = env.resolve(s.rhs, t);
      return a != t.root() && t.parent_of(a) == b;
    }
  }
  fail("usage", "unreachable sentence kind");
}

}  // namespace detail

inline bool evaluate(const RootedTree& t, const Sentence& s) {
  detail::Env env;
  return detail::eval_rec(t, s, env);
}

}  // namespace gwfo
