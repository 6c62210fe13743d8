#pragma once

// The k-move Ehrenfeucht game on two rooted trees, decided by memoized
// alternating search: for every Spoiler move (either tree) there must exist
// a Duplicator reply keeping the selected pairs, together with the mandatory
// root pair, a partial isomorphism.
//
// Memo keys are canonical codes of both trees with the selected vertices
// marked, so positions that differ only by an automorphism share one entry.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "gwfo/error.hpp"
#include "gwfo/tree.hpp"

namespace gwfo {

struct GameOptions {
  std::size_t memo_budget = 1u << 22;  // entries before budget-exceeded
};

namespace detail {

// canonical code with selection marks: label(v) = sorted selection slots
inline std::string marked_code(const RootedTree& t, const std::vector<int>& sel) {
  std::vector<std::string> code(t.size());
  for (int v = t.size() - 1; v >= 0; --v) {
    std::string label;
    for (std::size_t i = 0; i < sel.size(); ++i)
      if (sel[i] == v) label += static_cast<char>('a' + i);
    std::vector<std::string> parts;
    for (int c : t.children_of(v)) parts.push_back(code[c]);
    std::sort(parts.begin(), parts.end());
    std::string s = "(" + label;
    for (auto& p : parts) s += p;
    s += ')';
    code[v] = std::move(s);
  }
  return code[0];
}

class GameSearch {
 public:
  GameSearch(const RootedTree& left, const RootedTree& right, const GameOptions& opts)
      : left_(left), right_(right), opts_(opts) {}

  bool duplicator_wins(int moves) {
    std::vector<int> sl, sr;
    return wins(sl, sr, moves);
  }

 private:
  // pairs (sl[i], sr[i]) plus the implicit root pair must stay a partial
  // isomorphism; checked incrementally when a pair is added
  bool pair_ok(const std::vector<int>& sl, const std::vector<int>& sr, int a, int b) const {
    auto rel = [](const RootedTree& t, int x, int y) {
      return std::pair{x == y, x != t.root() && t.parent_of(x) == y};
    };
    auto check = [&](int x, int y) {
      return rel(left_, a, x) == rel(right_, b, y) && rel(left_, x, a) == rel(right_, y, b);
    };
    if (!check(left_.root(), right_.root())) return false;
    for (std::size_t i = 0; i < sl.size(); ++i)
      if (!check(sl[i], sr[i])) return false;
    return true;
  }

  bool wins(std::vector<int>& sl, std::vector<int>& sr, int moves) {
    if (moves == 0) return true;
    std::string key = std::to_string(moves) + '|' + marked_code(left_, sl) + '|' +
                      marked_code(right_, sr);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (memo_.size() >= opts_.memo_budget)
      fail("budget-exceeded", "game memo table exceeded its budget");

    bool result = true;
    for (int side = 0; side < 2 && result; ++side) {
      const RootedTree& from = side == 0 ? left_ : right_;
      const RootedTree& to = side == 0 ? right_ : left_;
      for (int u = 0; u < from.size() && result; ++u) {
        bool answered = false;
        for (int w = 0; w < to.size() && !answered; ++w) {
          int a = side == 0 ? u : w;
          int b = side == 0 ? w : u;
          if (!pair_ok(sl, sr, a, b)) continue;
          sl.push_back(a);
          sr.push_back(b);
          answered = wins(sl, sr, moves - 1);
          sl.pop_back();
          sr.pop_back();
        }
        result = answered;
      }
    }
    memo_.emplace(std::move(key), result);
    return result;
  }

  const RootedTree& left_;
  const RootedTree& right_;
  GameOptions opts_;
  std::unordered_map<std::string, bool> memo_;
};

}  // namespace detail

// True iff Duplicator has a winning strategy in EHR[left, right, k].
inline bool ehr_wins(const RootedTree& left, const RootedTree& right, int k,
                     const GameOptions& opts = {}) {
  if (k < 0) fail("usage", "move count must be nonnegative");
  if (canonical_code(left) == canonical_code(right)) return true;  // mirror strategy
  detail::GameSearch search(left, right, opts);
  return search.duplicator_wins(k);
}

}  // namespace gwfo
