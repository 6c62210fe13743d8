#pragma once

// Galton-Watson sampling with Poisson(c) offspring, truncated at a depth
// bound. Generation is breadth-first; node i consumes the draw X_i, so
// "abort" (the process dies before reaching the depth bound) is well-defined.

#include <cstdint>
#include <vector>

#include "gwfo/error.hpp"
#include "gwfo/rng.hpp"
#include "gwfo/tree.hpp"

namespace gwfo {

struct SampleOutcome {
  RootedTree tree;             // truncated at depth s
  bool aborted = false;        // process died before producing depth-s nodes
  std::vector<int> frontier;   // nodes at depth exactly s
};

struct GwParams {
  double c = 1.0;
  int depth = 0;
  std::uint64_t seed = 1;
  std::uint64_t sample_index = 0;
  int max_nodes = 1'000'000;
};

inline void check_rate(double c) {
  if (c < 0 || c > 1000.0) fail("usage", "offspring mean must be in [0, 1000]");
}

inline SampleOutcome sample_gw(const GwParams& p) {
  check_rate(p.c);
  if (p.depth < 0) fail("usage", "depth bound must be nonnegative");
  if (p.max_nodes < 1) fail("usage", "max_nodes must be at least 1");

  std::uint64_t base = hash2(p.seed, p.sample_index);
  SampleOutcome out;
  std::vector<int> depth{0};
  // node ids are breadth-first by construction: children are appended in
  // order while we walk ids ascending
  for (int v = 0; v < out.tree.size(); ++v) {
    if (depth[v] >= p.depth) continue;  // depth-s nodes stay unexpanded
    CounterRng node_rng(hash2(base, static_cast<std::uint64_t>(v)));
    int children = node_rng.next_poisson(p.c);
    if (out.tree.size() + children > p.max_nodes)
      fail("budget-exceeded", "tree grew past max_nodes; raise the budget or reduce depth");
    for (int i = 0; i < children; ++i) {
      out.tree.add_child(v);
      depth.push_back(depth[v] + 1);
    }
  }
  for (int v = 0; v < out.tree.size(); ++v)
    if (depth[v] == p.depth) out.frontier.push_back(v);
  out.aborted = out.frontier.empty();
  return out;
}

inline SampleOutcome sample_gw(double c, int depth, std::uint64_t seed,
                               int max_nodes = 1'000'000, std::uint64_t sample_index = 0) {
  return sample_gw(GwParams{c, depth, seed, sample_index, max_nodes});
}

}  // namespace gwfo
