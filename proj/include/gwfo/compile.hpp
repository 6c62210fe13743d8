#pragma once

// State-space construction and the recursion function.
//
// build_state_space(k) computes the equivalence classes reachable from the
// single-node class by closing under the recursion function: put a_j copies
// of representative j under a fresh root (omega realized as exactly k
// copies), classify the candidate, repeat until no class is new.
//
// For k = 2 the closure runs over a finite composition algebra instead of
// raw count vectors: a multiset of child classes is summarized by capped
// copy counts plus the union of per-class vertex bits, and the rank-2
// profile of the composed tree is a closed form of that summary. The
// summary space is exhausted by BFS, so closedness of the returned state
// set is checked over every reachable summary, not sampled.

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gwfo/ef_type.hpp"
#include "gwfo/error.hpp"
#include "gwfo/eval.hpp"
#include "gwfo/sentence.hpp"
#include "gwfo/state_system.hpp"
#include "gwfo/tree.hpp"

namespace gwfo {

struct BuildLimits {
  int max_states = 4096;
  double max_seconds = 120.0;
};

// --- rank-2 composition algebra -------------------------------------------

namespace r2 {

// Vertex bits of a class seen as a component under a new root: depth within
// the component capped at 2, has-child, and "some unrelated vertex at
// component depth >= 1 exists" (which equals orc | odp of the standalone
// profile). tall = the component has at least two nodes.
struct ComponentInfo {
  std::uint32_t vmask = 0;  // bit index: ((e*2+ch)*2+iod) + (tall ? 12 : 0)
  bool tall = false;
};

inline ComponentInfo component_info(std::uint32_t profile_mask) {
  ComponentInfo info;
  for (int bit = 0; bit < 32; ++bit)
    if (profile_mask >> bit & 1u)
      if ((bit >> 3) >= 1) info.tall = true;
  for (int bit = 0; bit < 32; ++bit) {
    if (!(profile_mask >> bit & 1u)) continue;
    int d = bit >> 3;
    int ch = bit >> 2 & 1;
    int orc = bit >> 1 & 1;
    int odp = bit & 1;
    int e = d < 2 ? d : 2;
    int iod = orc | odp;
    info.vmask |= 1u << (((e * 2 + ch) * 2 + iod) + (info.tall ? 12 : 0));
  }
  return info;
}

// Summary of a multiset of components, packed into 28 bits:
// vertex-bit union (24) | copy count capped at 2 | tall-copy count capped at 2.
using Summary = std::uint32_t;

inline Summary empty_summary() { return 0; }
inline int copies(Summary s) { return s >> 24 & 3; }
inline int tall_copies(Summary s) { return s >> 26 & 3; }

inline Summary add_copy(Summary s, const ComponentInfo& c) {
  std::uint32_t vmask = (s & 0xffffffu) | c.vmask;
  int nc = std::min(2, copies(s) + 1);
  int nd = std::min(2, tall_copies(s) + (c.tall ? 1 : 0));
  return vmask | (static_cast<std::uint32_t>(nc) << 24) | (static_cast<std::uint32_t>(nd) << 26);
}

// Rank-2 profile of a root with exactly this multiset of child components.
inline std::uint32_t finalize(Summary s) {
  int nc = copies(s);
  int nd = tall_copies(s);
  std::uint32_t profile = 1u << rank2_bit(0, nc >= 1, false, nd >= 1);
  for (int bit = 0; bit < 24; ++bit) {
    if (!(s >> bit & 1u)) continue;
    bool tall = bit >= 12;
    int idx = tall ? bit - 12 : bit;
    int e = idx >> 2;
    bool ch = idx >> 1 & 1;
    bool iod = idx & 1;
    int d = e + 1 < 3 ? e + 1 : 3;
    bool orc = e >= 2 ? true : nc >= 2;
    bool odp = iod || nd >= 2 || (nd == 1 && !tall);
    profile |= 1u << rank2_bit(d, ch, orc, odp);
  }
  return profile;
}

// A compiled k=2 system in algebra form.
struct System {
  std::vector<std::uint32_t> profiles;              // per state
  std::vector<ComponentInfo> comp;                  // per state
  std::unordered_map<std::uint32_t, int> class_of;  // profile -> state

  int num_states() const { return static_cast<int>(profiles.size()); }

  int class_of_profile(std::uint32_t profile) const {
    auto it = class_of.find(profile);
    if (it == class_of.end())
      fail("unclassifiable", "rank-2 profile outside the compiled state space");
    return it->second;
  }

  int gamma(const CountVector& counts) const {
    Summary s = empty_summary();
    for (int j = 0; j < num_states(); ++j)
      for (int copy = 0; copy < counts[j]; ++copy) s = add_copy(s, comp[j]);
    return class_of_profile(finalize(s));
  }

  static System from_profiles(const std::vector<std::uint32_t>& profiles) {
    System sys;
    sys.profiles = profiles;
    for (int j = 0; j < static_cast<int>(profiles.size()); ++j) {
      sys.comp.push_back(component_info(profiles[j]));
      if (!sys.class_of.emplace(profiles[j], j).second)
        fail("parse-error", "duplicate representatives for one class");
    }
    return sys;
  }
};

}  // namespace r2

// --- recursion-function engine ---------------------------------------------

// Evaluates the recursion function of any system and supports bottom-up set
// propagation. Built on demand from the system alone, so systems loaded from
// files behave identically to freshly compiled ones.
class GammaEngine {
 public:
  enum class Backend { Rules, Table, Rank2, OnDemand };

  explicit GammaEngine(const StateSystem& sys) : sys_(sys) {
    if (!sys.compiled()) {
      backend_ = Backend::Rules;
      return;
    }
    int k = sys.quantifier_rank();
    if (k == 2) {
      std::vector<std::uint32_t> profiles;
      for (const auto& rep : sys.representatives()) profiles.push_back(rank2_profile(rep));
      r2_ = r2::System::from_profiles(profiles);
      backend_ = Backend::Rank2;
      return;
    }
    double table_size = 1;
    for (int j = 0; j < sys.num_states(); ++j) table_size *= k + 1;
    if (table_size <= 1e7) {
      backend_ = Backend::Table;
      build_table();
    } else {
      backend_ = Backend::OnDemand;
    }
  }

  Backend backend() const { return backend_; }
  int num_states() const { return sys_.num_states(); }
  int kappa() const { return sys_.threshold(); }
  const StateSystem& system() const { return sys_; }
  const r2::System& rank2() const { return r2_; }
  const std::vector<std::uint16_t>& table() const { return table_; }

  int gamma(const CountVector& counts) const {
    validate(counts);
    switch (backend_) {
      case Backend::Rules:
        return sys_.apply_rules(counts);
      case Backend::Table:
        return table_[vector_index(counts)];
      case Backend::Rank2:
        return r2_.gamma(counts);
      case Backend::OnDemand:
        return classify_candidate(counts);
    }
    fail("usage", "unreachable backend");
  }

  std::size_t vector_index(const CountVector& counts) const {
    std::size_t idx = 0;
    for (int j = sys_.num_states() - 1; j >= 0; --j) idx = idx * (kappa() + 1) + counts[j];
    return idx;
  }

 private:
  void validate(const CountVector& counts) const {
    if (static_cast<int>(counts.size()) != sys_.num_states())
      fail("dimension-mismatch", "count vector has the wrong state count");
    for (int v : counts)
      if (v < 0 || v > kappa()) fail("usage", "count entry outside the cap alphabet");
  }

  // candidate tree for a count vector: omega realized as exactly kappa copies
  RootedTree candidate(const CountVector& counts) const {
    RootedTree t;
    for (int j = 0; j < sys_.num_states(); ++j)
      for (int copy = 0; copy < counts[j]; ++copy) t.graft(t.root(), sys_.representatives()[j]);
    return t;
  }

  int classify_candidate(const CountVector& counts) const {
    std::scoped_lock lock(mutex_);
    auto [it, inserted] = memo_.try_emplace(vector_index(counts), -1);
    if (inserted) it->second = classify_by_type(candidate(counts));
    return it->second;
  }

  int classify_by_type(const RootedTree& t) const {
    ensure_rep_types();
    int tid = ef_type(t, sys_.quantifier_rank(), interner_);
    for (int j = 0; j < sys_.num_states(); ++j)
      if (rep_types_[j] == tid) return j;
    fail("unclassifiable", "tree falls outside the compiled state space");
  }

  void ensure_rep_types() const {
    if (!rep_types_.empty()) return;
    for (const auto& rep : sys_.representatives())
      rep_types_.push_back(ef_type(rep, sys_.quantifier_rank(), interner_));
  }

  void build_table() {
    int m = sys_.num_states();
    int radix = kappa() + 1;
    std::size_t size = 1;
    for (int j = 0; j < m; ++j) size *= radix;
    table_.resize(size);
    CountVector counts(m, 0);
    for (std::size_t idx = 0; idx < size; ++idx) {
      table_[idx] = static_cast<std::uint16_t>(classify_by_type(candidate(counts)));
      for (int j = 0; j < m; ++j) {
        if (++counts[j] <= kappa()) break;
        counts[j] = 0;
      }
    }
  }

  const StateSystem& sys_;
  Backend backend_;
  r2::System r2_;
  std::vector<std::uint16_t> table_;
  mutable TypeInterner interner_;
  mutable std::vector<int> rep_types_;
  mutable std::unordered_map<std::size_t, int> memo_;
  mutable std::mutex mutex_;
};

// Total recursion function: table lookup / algebra for compiled systems,
// first-matching rule for manual ones.
inline int gamma_of_tree_counts(const StateSystem& sys, const CountVector& counts) {
  return GammaEngine(sys).gamma(counts);
}

// --- bottom-up set propagation ----------------------------------------------

// Accumulates child state-sets under one node and yields the set of possible
// root states. Tracks either capped count vectors or rank-2 summaries;
// when the frontier of distinct configurations passes `limit`, the result is
// over-approximated to the full state set (sound, never wrong on singletons).
class SetAccumulator {
 public:
  SetAccumulator(const GammaEngine& engine, std::size_t limit)
      : engine_(engine), limit_(limit) {
    if (engine_.backend() == GammaEngine::Backend::Rank2)
      summaries_.push_back(r2::empty_summary());
    else
      vectors_.push_back(CountVector(engine_.num_states(), 0));
  }

  bool over_approx() const { return over_; }

  // one child whose subtree can be in any state of `states`
  void add_child_set(const std::vector<bool>& states) {
    if (over_) return;
    if (engine_.backend() == GammaEngine::Backend::Rank2) {
      std::vector<r2::Summary> next;
      for (auto s : summaries_)
        for (int j = 0; j < engine_.num_states(); ++j)
          if (states[j]) next.push_back(r2::add_copy(s, engine_.rank2().comp[j]));
      dedupe(next, summaries_);
    } else {
      std::vector<CountVector> next;
      for (const auto& vec : vectors_)
        for (int j = 0; j < engine_.num_states(); ++j)
          if (states[j]) {
            CountVector v = vec;
            v[j] = capped(v[j] + 1, engine_.kappa());
            next.push_back(std::move(v));
          }
      dedupe(next, vectors_);
    }
  }

  // r children about which nothing is known; saturates instead of looping r times
  void add_unknown_children(long long r) {
    std::vector<bool> full(engine_.num_states(), true);
    for (long long i = 0; i < r && !over_; ++i) {
      std::size_t before = frontier_size();
      auto snapshot_s = summaries_;
      auto snapshot_v = vectors_;
      add_child_set(full);
      if (frontier_size() == before && snapshot_s == summaries_ && snapshot_v == vectors_) break;
    }
  }

  std::vector<bool> finalize() const {
    std::vector<bool> out(engine_.num_states(), false);
    if (over_) return std::vector<bool>(engine_.num_states(), true);
    if (engine_.backend() == GammaEngine::Backend::Rank2) {
      for (auto s : summaries_) out[engine_.rank2().class_of_profile(r2::finalize(s))] = true;
    } else {
      for (const auto& vec : vectors_) out[engine_.gamma(vec)] = true;
    }
    return out;
  }

 private:
  std::size_t frontier_size() const { return summaries_.size() + vectors_.size(); }

  template <typename T>
  void dedupe(std::vector<T>& next, std::vector<T>& dest) {
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    if (next.size() > limit_) {
      over_ = true;
      dest.clear();
      return;
    }
    dest = std::move(next);
  }

  const GammaEngine& engine_;
  std::size_t limit_;
  bool over_ = false;
  std::vector<r2::Summary> summaries_;
  std::vector<CountVector> vectors_;
};

// --- classification and accepting sets --------------------------------------

// The unique state whose representative is k-game equivalent to T.
inline int classify(const StateSystem& sys, const RootedTree& t) {
  if (!sys.compiled()) fail("usage", "classify needs a compiled system");
  if (sys.quantifier_rank() == 2) {
    std::uint32_t profile = rank2_profile(t);
    for (int j = 0; j < sys.num_states(); ++j)
      if (rank2_profile(sys.representatives()[j]) == profile) return j;
    fail("unclassifiable", "tree falls outside the compiled state space");
  }
  TypeInterner interner;
  int tid = ef_type(t, sys.quantifier_rank(), interner);
  for (int j = 0; j < sys.num_states(); ++j)
    if (ef_type(sys.representatives()[j], sys.quantifier_rank(), interner) == tid) return j;
  fail("unclassifiable", "tree falls outside the compiled state space");
}

// S(A): the states whose trees satisfy A. Well-defined because every tree in
// a class agrees with the class representative on sentences of depth <= k.
inline std::vector<int> accepting_set(const StateSystem& sys, const Sentence& a) {
  if (!sys.compiled()) fail("usage", "accepting_set needs a compiled system");
  if (quantifier_depth(a) > sys.quantifier_rank())
    fail("depth-exceeds-k", "sentence depth " + std::to_string(quantifier_depth(a)) +
                                " exceeds the system rank " + std::to_string(sys.quantifier_rank()));
  std::vector<int> out;
  for (int j = 0; j < sys.num_states(); ++j)
    if (evaluate(sys.representatives()[j], a)) out.push_back(j);
  return out;
}

// --- closure construction ----------------------------------------------------

namespace detail {

inline double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Replace representatives by the smallest trees realizing each class.
inline void minimize_reps(std::vector<RootedTree>& reps, int k) {
  TypeInterner interner;
  std::vector<int> want;
  for (const auto& rep : reps) want.push_back(ef_type(rep, k, interner));
  std::vector<bool> found(reps.size(), false);
  int remaining = static_cast<int>(reps.size());
  for (int n = 1; n <= 12 && remaining > 0; ++n) {
    for (const auto& t : enumerate_trees(n)) {
      int tid = ef_type(t, k, interner);
      for (std::size_t j = 0; j < reps.size(); ++j)
        if (!found[j] && want[j] == tid) {
          reps[j] = t;
          found[j] = true;
          --remaining;
        }
    }
  }
}

// Generic closure over raw count vectors; feasible for k = 1, guarded by
// limits elsewhere (the state space grows like a tower function in k).
inline std::vector<RootedTree> close_literal(int k, const BuildLimits& limits) {
  auto start = std::chrono::steady_clock::now();
  TypeInterner interner;
  std::vector<RootedTree> reps{RootedTree()};
  std::vector<int> types{ef_type(reps[0], k, interner)};

  bool changed = true;
  while (changed) {
    changed = false;
    int m = static_cast<int>(reps.size());
    std::size_t total = 1;
    for (int j = 0; j < m; ++j) total *= k + 1;
    CountVector counts(m, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
      if (elapsed_seconds(start) > limits.max_seconds)
        fail("limit-exceeded", "state-space closure passed its time limit; lower k");
      RootedTree candidate;
      for (int j = 0; j < m; ++j)
        for (int copy = 0; copy < counts[j]; ++copy) candidate.graft(candidate.root(), reps[j]);
      int tid = ef_type(candidate, k, interner);
      if (std::find(types.begin(), types.end(), tid) == types.end()) {
        if (static_cast<int>(reps.size()) >= limits.max_states)
          fail("limit-exceeded", "state-space closure passed max_states; lower k");
        reps.push_back(candidate);
        types.push_back(tid);
        changed = true;
      }
      for (int j = 0; j < m; ++j) {
        if (++counts[j] <= k) break;
        counts[j] = 0;
      }
    }
  }
  return reps;
}

// k = 2 closure over the composition algebra: BFS over reachable summaries,
// registering every profile the recursion function can produce. Exhausting
// the summary space proves the returned state set closed under the
// recursion function for every count vector.
inline std::vector<RootedTree> close_rank2(const BuildLimits& limits) {
  auto start = std::chrono::steady_clock::now();
  std::vector<std::uint32_t> profiles{rank2_profile(RootedTree())};
  std::vector<r2::ComponentInfo> comp{r2::component_info(profiles[0])};
  std::unordered_map<std::uint32_t, int> class_of{{profiles[0], 0}};
  // provenance: summary -> (previous summary, state added); 0 is the empty summary
  std::unordered_map<std::uint32_t, std::pair<std::uint32_t, int>> seen;
  seen.emplace(r2::empty_summary(), std::pair{r2::empty_summary(), -1});

  std::vector<std::uint32_t> queue{r2::empty_summary()};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    if (elapsed_seconds(start) > limits.max_seconds)
      fail("limit-exceeded", "state-space closure passed its time limit");
    std::uint32_t s = queue[qi];
    std::uint32_t profile = r2::finalize(s);
    if (!class_of.contains(profile)) {
      if (static_cast<int>(profiles.size()) >= limits.max_states)
        fail("limit-exceeded", "state-space closure passed max_states");
      class_of.emplace(profile, static_cast<int>(profiles.size()));
      profiles.push_back(profile);
      comp.push_back(r2::component_info(profile));
      // a new state adds transitions from every summary seen so far
      queue.assign(1, r2::empty_summary());
      for (const auto& [sum, prov] : seen)
        if (sum != r2::empty_summary()) queue.push_back(sum);
      qi = static_cast<std::size_t>(-1);
      continue;
    }
    for (int j = 0; j < static_cast<int>(profiles.size()); ++j) {
      std::uint32_t next = r2::add_copy(s, comp[j]);
      if (seen.emplace(next, std::pair{s, j}).second) queue.push_back(next);
    }
  }

  // smallest representatives first: sweep canonical trees by size
  std::vector<RootedTree> reps(profiles.size());
  std::vector<bool> have(profiles.size(), false);
  int remaining = static_cast<int>(profiles.size());
  for (int n = 1; n <= 12 && remaining > 0; ++n) {
    for (const auto& t : enumerate_trees(n)) {
      auto it = class_of.find(rank2_profile(t));
      if (it == class_of.end())
        fail("unclassifiable", "internal closure error: enumerated tree outside the closed space");
      if (!have[it->second]) {
        reps[it->second] = t;
        have[it->second] = true;
        --remaining;
      }
    }
  }
  // classes without a small tree fall back to their provenance chains
  std::function<RootedTree(std::uint32_t)> tree_of = [&](std::uint32_t s) {
    RootedTree t;
    while (s != r2::empty_summary()) {
      auto [prev, j] = seen.at(s);
      t.graft(t.root(), reps[j]);
      s = prev;
    }
    return t;
  };
  bool progress = remaining > 0;
  while (progress) {
    progress = false;
    for (const auto& [sum, prov] : seen) {
      int cls = class_of.at(r2::finalize(sum));
      if (have[cls]) continue;
      bool ready = true;
      for (std::uint32_t s = sum; s != r2::empty_summary();) {
        auto [prev, j] = seen.at(s);
        if (!have[j]) {
          ready = false;
          break;
        }
        s = prev;
      }
      if (!ready) continue;
      reps[cls] = tree_of(sum);
      have[cls] = true;
      progress = true;
    }
  }
  for (bool h : have)
    if (!h) fail("unclassifiable", "internal closure error: class without a representative");
  return reps;
}

}  // namespace detail

// Compiled state space for quantifier depth k, with representatives and a
// total recursion function behind GammaEngine.
inline StateSystem build_state_space(int k, const BuildLimits& limits = {}) {
  if (k < 1) fail("usage", "state spaces need k >= 1");
  std::vector<RootedTree> reps =
      k == 2 ? detail::close_rank2(limits) : detail::close_literal(k, limits);
  if (k != 2) detail::minimize_reps(reps, k);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < reps.size(); ++j) names.push_back("s" + std::to_string(j + 1));
  StateSystem sys(names, k);
  sys.set_compiled(k, std::move(reps));
  return sys;
}

}  // namespace gwfo
