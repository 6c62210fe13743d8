#pragma once

// Rooted trees: representation, text format, canonical codes, graph metrics,
// and the universal-tree (Christmas tree) construction.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gwfo/error.hpp"

namespace gwfo {

// Finite rooted tree with dense node ids; the root is always node 0 and every
// parent id is smaller than its children's ids. Child order carries no
// meaning (trees are unordered); canonical_code() is the identity of record.
class RootedTree {
 public:
  RootedTree() : parent_{-1}, children_(1) {}

  int root() const { return 0; }
  int size() const { return static_cast<int>(parent_.size()); }

  int parent_of(int v) const {
    check_node(v);
    return parent_[v];
  }

  const std::vector<int>& children_of(int v) const {
    check_node(v);
    return children_[v];
  }

  int add_child(int parent) {
    check_node(parent);
    int id = size();
    parent_.push_back(parent);
    children_.emplace_back();
    children_[parent].push_back(id);
    return id;
  }

  // Grafts a copy of `other` with other's root attached as a child of `at`;
  // returns the id of the copied root.
  int graft(int at, const RootedTree& other) {
    check_node(at);
    std::vector<int> remap(other.size(), -1);
    remap[0] = add_child(at);
    for (int v = 1; v < other.size(); ++v) remap[v] = add_child(remap[other.parent_[v]]);
    return remap[0];
  }

  // Depth of every node (root = 0). Parents precede children by construction.
  std::vector<int> depths() const {
    std::vector<int> d(size(), 0);
    for (int v = 1; v < size(); ++v) d[v] = d[parent_[v]] + 1;
    return d;
  }

  int height() const {
    auto d = depths();
    return *std::max_element(d.begin(), d.end());
  }

  void check_node(int v) const {
    if (v < 0 || v >= size()) fail("unknown-node", "node id " + std::to_string(v) + " out of range");
  }

 private:
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
};

// --- text format -------------------------------------------------------
// A tree is "(" followed by the texts of its children followed by ")".
// Whitespace between tokens is ignored on parse and never emitted.

inline RootedTree parse_tree(std::string_view text) {
  RootedTree tree;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  if (i >= text.size() || text[i] != '(') fail("syntax-error", "tree text must start with '('");
  ++i;
  std::vector<int> stack{tree.root()};
  while (!stack.empty()) {
    skip_ws();
    if (i >= text.size()) fail("syntax-error", "unbalanced tree text");
    if (text[i] == '(') {
      stack.push_back(tree.add_child(stack.back()));
      ++i;
    } else if (text[i] == ')') {
      stack.pop_back();
      ++i;
    } else {
      fail("syntax-error", "unexpected character in tree text at offset " + std::to_string(i));
    }
  }
  skip_ws();
  if (i != text.size()) fail("syntax-error", "trailing characters after tree text");
  return tree;
}

namespace detail {
inline void format_rec(const RootedTree& t, int v, std::string& out) {
  out += '(';
  for (int c : t.children_of(v)) format_rec(t, c, out);
  out += ')';
}
}  // namespace detail

inline std::string format_tree(const RootedTree& t) {
  std::string out;
  detail::format_rec(t, t.root(), out);
  return out;
}

// --- canonical code -----------------------------------------------------

// AHU-style canonical encoding. Children codes are concatenated in sorted
// order, so equal codes hold exactly for isomorphic rooted trees.
struct TreeCode {
  std::string code;
  friend bool operator==(const TreeCode&, const TreeCode&) = default;
  friend auto operator<=>(const TreeCode&, const TreeCode&) = default;
};

// Canonical code of every subtree; entry v encodes T(v).
inline std::vector<std::string> subtree_codes(const RootedTree& t) {
  std::vector<std::string> code(t.size());
  for (int v = t.size() - 1; v >= 0; --v) {
    std::vector<std::string> parts;
    parts.reserve(t.children_of(v).size());
    for (int c : t.children_of(v)) parts.push_back(code[c]);
    std::sort(parts.begin(), parts.end());
    std::string s = "(";
    for (auto& p : parts) s += p;
    s += ')';
    code[v] = std::move(s);
  }
  return code;
}

inline TreeCode canonical_code(const RootedTree& t) { return TreeCode{subtree_codes(t)[0]}; }

// --- structural operations ----------------------------------------------

// Induced tree on vertices at generation <= s.
inline RootedTree cutoff(const RootedTree& t, int s) {
  if (s < 0) fail("usage", "cutoff depth must be nonnegative");
  auto depth = t.depths();
  RootedTree out;
  std::vector<int> remap(t.size(), -1);
  remap[0] = 0;
  for (int v = 1; v < t.size(); ++v)
    if (depth[v] <= s) remap[v] = out.add_child(remap[t.parent_of(v)]);
  return out;
}

// T(v): v and all of its descendants, with v as root.
inline RootedTree subtree(const RootedTree& t, int v) {
  t.check_node(v);
  RootedTree out;
  std::vector<int> remap(t.size(), -1);
  remap[v] = 0;
  // ids are increasing along root-to-leaf paths, one forward pass suffices
  for (int w = v + 1; w < t.size(); ++w) {
    int p = t.parent_of(w);
    if (p >= 0 && remap[p] >= 0) remap[w] = out.add_child(remap[p]);
  }
  return out;
}

// Shortest parent/child path length between v and w.
inline int tree_distance(const RootedTree& t, int v, int w) {
  t.check_node(v);
  t.check_node(w);
  auto depth = t.depths();
  int a = v, b = w, d = 0;
  while (depth[a] > depth[b]) {
    a = t.parent_of(a);
    ++d;
  }
  while (depth[b] > depth[a]) {
    b = t.parent_of(b);
    ++d;
  }
  while (a != b) {
    a = t.parent_of(a);
    b = t.parent_of(b);
    d += 2;
  }
  return d;
}

// B(v, r): all nodes within distance r of v, sorted by id. v is the
// designated vertex and is always a member.
inline std::vector<int> ball(const RootedTree& t, int v, int r) {
  t.check_node(v);
  if (r < 0) fail("usage", "ball radius must be nonnegative");
  std::vector<int> dist(t.size(), -1);
  std::deque<int> queue{v};
  dist[v] = 0;
  std::vector<int> out;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    out.push_back(u);
    if (dist[u] == r) continue;
    auto visit = [&](int w) {
      if (w >= 0 && dist[w] < 0) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    };
    visit(t.parent_of(u));
    for (int c : t.children_of(u)) visit(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Rad(0) = 0, Rad(i+1) = 3*Rad(i) + 1.
inline std::uint64_t rad(int i) {
  if (i < 0) fail("usage", "rad argument must be nonnegative");
  if (i > 39) fail("limit-exceeded", "rad(i) overflows 64 bits for i > 39");
  std::uint64_t r = 0;
  for (int j = 0; j < i; ++j) r = 3 * r + 1;
  return r;
}

// Christmas tree: a root carrying k*|ornaments| disjoint paths of length
// Rad(k)+Rad(k-1)+1, each path ending in the root of a fresh ornament copy
// (k copies per ornament).
inline RootedTree christmas_tree(const std::vector<RootedTree>& ornaments, int k) {
  if (ornaments.empty()) fail("usage", "christmas_tree needs at least one ornament");
  if (k < 1) fail("usage", "christmas_tree needs k >= 1");
  std::uint64_t path_len = rad(k) + rad(k - 1) + 1;
  RootedTree out;
  for (const auto& orn : ornaments) {
    for (int copy = 0; copy < k; ++copy) {
      int cur = out.root();
      for (std::uint64_t step = 0; step + 1 < path_len; ++step) cur = out.add_child(cur);
      out.graft(cur, orn);  // ornament root is the path endpoint
    }
  }
  return out;
}

// True iff some T(v) is isomorphic to the pattern, via canonical codes.
inline bool contains_subtree_iso(const RootedTree& t, const RootedTree& pattern) {
  std::string want = canonical_code(pattern).code;
  for (const auto& c : subtree_codes(t))
    if (c == want) return true;
  return false;
}

// --- canonical enumeration ----------------------------------------------

namespace detail {

// All canonical rooted trees with exactly n nodes (A000081: 1,1,2,4,9,...).
// Children are chosen as a multiset over smaller trees, so no two results
// are isomorphic.
inline const std::vector<RootedTree>& trees_of_size(int n) {
  static std::map<int, std::vector<RootedTree>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<RootedTree> out;
  if (n == 1) {
    out.emplace_back();
  } else {
    // child multiset as a non-increasing sequence of (size, index) picks
    std::vector<std::pair<int, int>> picks;
    auto build = [&] {
      RootedTree t;
      for (auto [sz, idx] : picks) t.graft(t.root(), trees_of_size(sz)[idx]);
      out.push_back(std::move(t));
    };
    auto rec = [&](auto&& self, int remaining, int max_size, int max_index) -> void {
      if (remaining == 0) {
        build();
        return;
      }
      for (int sz = std::min(remaining, max_size); sz >= 1; --sz) {
        int start = (sz == max_size) ? max_index : static_cast<int>(trees_of_size(sz).size()) - 1;
        for (int idx = start; idx >= 0; --idx) self(self, remaining - sz, sz, idx);
      }
    };
    rec(rec, n - 1, n - 1, static_cast<int>(trees_of_size(std::min(n - 1, n - 1)).size()) - 1);
  }
  return cache.emplace(n, std::move(out)).first->second;
}

}  // namespace detail

inline const std::vector<RootedTree>& enumerate_trees(int n) {
  if (n < 1) fail("usage", "tree enumeration needs n >= 1");
  return detail::trees_of_size(n);
}

}  // namespace gwfo
