#pragma once

// Ehrenfeucht ranks for rooted trees. Two trees get the same rank-k type id
// iff they agree on every sentence of quantifier depth <= k, equivalently iff
// Duplicator wins the k-move game. rank2_profile() is a closed-form special
// case for k = 2: the set of per-vertex bit tuples
//   (depth capped at 3, has-child, exists unrelated rootchild,
//    exists unrelated depth>=2 vertex)
// characterizes the rank-2 type exactly.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gwfo/tree.hpp"

namespace gwfo {

// Hash-consing table shared across trees so equal ids mean equal types.
class TypeInterner {
 public:
  int intern(const std::string& key) {
    auto [it, inserted] = ids_.emplace(key, static_cast<int>(ids_.size()));
    return it->second;
  }
  std::size_t size() const { return ids_.size(); }

 private:
  std::map<std::string, int> ids_;
};

namespace detail {

inline void atomic_signature(const RootedTree& t, const std::vector<int>& tuple, std::string& out) {
  // full atomic diagram of the tuple; position 0 is always the root constant
  for (std::size_t i = 0; i < tuple.size(); ++i)
    for (std::size_t j = 0; j < tuple.size(); ++j) {
      out += tuple[i] == tuple[j] ? '=' : '.';
      out += (tuple[i] != t.root() && t.parent_of(tuple[i]) == tuple[j]) ? 'p' : '.';
    }
}

inline int type_rec(const RootedTree& t, std::vector<int>& tuple, int moves, TypeInterner& interner) {
  std::string key = std::to_string(moves);
  key += ':';
  atomic_signature(t, tuple, key);
  if (moves > 0) {
    std::vector<int> child_types;
    child_types.reserve(t.size());
    for (int v = 0; v < t.size(); ++v) {
      tuple.push_back(v);
      child_types.push_back(type_rec(t, tuple, moves - 1, interner));
      tuple.pop_back();
    }
    std::sort(child_types.begin(), child_types.end());
    child_types.erase(std::unique(child_types.begin(), child_types.end()), child_types.end());
    key += '{';
    for (int id : child_types) {
      key += std::to_string(id);
      key += ',';
    }
    key += '}';
  }
  return interner.intern(key);
}

}  // namespace detail

// Rank-k type id of the rooted tree (the root is a named constant).
inline int ef_type(const RootedTree& t, int k, TypeInterner& interner) {
  if (k < 0) fail("usage", "rank must be nonnegative");
  std::vector<int> tuple{t.root()};
  return detail::type_rec(t, tuple, k, interner);
}

// --- rank-2 closed form ---------------------------------------------------

// Bit index for one vertex tuple; 32 possible values.
inline int rank2_bit(int d, bool ch, bool orc, bool odp) {
  return ((d * 2 + (ch ? 1 : 0)) * 2 + (orc ? 1 : 0)) * 2 + (odp ? 1 : 0);
}

// Set of realized per-vertex tuples, packed into a mask. Equal masks hold
// exactly for rank-2 equivalent trees.
inline std::uint32_t rank2_profile(const RootedTree& t) {
  auto depth = t.depths();
  int n = t.size();
  int rootchildren = static_cast<int>(t.children_of(t.root()).size());
  int deep = 0;  // vertices at depth >= 2
  for (int v = 0; v < n; ++v)
    if (depth[v] >= 2) ++deep;

  std::uint32_t mask = 0;
  for (int v = 0; v < n; ++v) {
    int d = depth[v] < 3 ? depth[v] : 3;
    bool ch = !t.children_of(v).empty();
    bool orc;  // exists rootchild w with w != v, w != parent(v), parent(w) != v
    if (d == 0)
      orc = false;  // every rootchild is a child of the root
    else if (d <= 2)
      orc = rootchildren >= 2;
    else
      orc = rootchildren >= 1;
    // exists w at depth >= 2 with w != v, w != parent(v), parent(w) != v
    int witnesses = deep;
    if (depth[v] >= 2) --witnesses;                                  // v itself
    if (depth[v] >= 3) --witnesses;                                  // parent of v
    if (depth[v] >= 1) witnesses -= static_cast<int>(t.children_of(v).size());
    bool odp = witnesses > 0;
    mask |= 1u << rank2_bit(d, ch, orc, odp);
  }
  return mask;
}

}  // namespace gwfo
