// Independent brute-force oracles used to validate the library. These stay
// deliberately naive: full enumeration, no pruning, no shared code with the
// algorithms under test beyond the basic model types.
#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "seqalloc/engine.hpp"
#include "seqalloc/flows.hpp"
#include "seqalloc/model.hpp"
#include "seqalloc/queries.hpp"
#include "seqalloc/reductions.hpp"

namespace oracle {

using namespace seqalloc;

inline Instance random_instance(int n, int m, std::mt19937_64& rng) {
  std::vector<std::string> agents, items;
  for (int a = 1; a <= n; ++a) agents.push_back("a" + std::to_string(a));
  for (int i = 1; i <= m; ++i) items.push_back("x" + std::to_string(i));
  std::vector<std::vector<std::string>> prefs(n, items);
  for (auto& p : prefs) std::shuffle(p.begin(), p.end(), rng);
  return Instance(agents, items, prefs);
}

// All complete assignments (n^m owner vectors).
inline std::vector<Assignment> all_assignments(const Instance& inst) {
  std::vector<Assignment> out;
  Assignment m = Assignment::empty_of(inst);
  const int items = inst.item_count();
  const int n = inst.agent_count();
  std::fill(m.owner.begin(), m.owner.end(), 0);
  while (true) {
    out.push_back(m);
    int pos = items - 1;
    while (pos >= 0 && m.owner[pos] == n - 1) m.owner[pos--] = 0;
    if (pos < 0) break;
    ++m.owner[pos];
  }
  return out;
}

// Itemwise weak domination with at least one strict improvement, comparing
// sorted rank vectors per agent (shares must have equal sizes).
inline bool dominates(const Instance& inst, const Assignment& better,
                      const Assignment& worse) {
  bool strict = false;
  for (int a = 0; a < inst.agent_count(); ++a) {
    std::vector<int> rb, rw;
    for (int i = 0; i < inst.item_count(); ++i) {
      if (better.owner[i] == a) rb.push_back(inst.rank0(a, i));
      if (worse.owner[i] == a) rw.push_back(inst.rank0(a, i));
    }
    if (rb.size() != rw.size()) return false;
    std::sort(rb.begin(), rb.end());
    std::sort(rw.begin(), rw.end());
    for (size_t j = 0; j < rb.size(); ++j) {
      if (rb[j] > rw[j]) return false;
      if (rb[j] < rw[j]) strict = true;
    }
  }
  return strict;
}

inline bool brute_pareto_optimal(const Instance& inst, const Assignment& m) {
  for (const Assignment& other : all_assignments(inst))
    if (dominates(inst, other, m)) return false;
  return true;
}

// Plain enumerate-everything decision procedure.
struct BruteAnswer {
  bool yes;
  std::optional<Policy> witness;
};

inline BruteAnswer naive_solve(const Instance& inst, const Query& q) {
  OutcomePredicate pred = query_predicate(inst, q);
  bool possible = is_possible_problem(q.problem);
  std::optional<Policy> certificate;
  for_each_policy(inst, q.cls, [&](const Policy& pi) {
    bool holds = pred.eval(inst, execute_to_assignment(inst, pi));
    if (holds == possible) {
      certificate = pi;
      return false;
    }
    return true;
  });
  if (possible) return {certificate.has_value(), certificate};
  return {!certificate.has_value(), certificate};
}

// Minimum s-t cut by enumerating source-side subsets (≤ ~20 nodes).
inline long long brute_min_cut(const FlowNetwork& net) {
  const int n = net.node_count;
  long long best = -1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
    if (!(mask >> net.source & 1)) continue;
    if (mask >> net.sink & 1) continue;
    long long cut = 0;
    for (const auto& arc : net.arcs)
      if ((mask >> arc.from & 1) && !(mask >> arc.to & 1)) cut += arc.capacity;
    if (best < 0 || cut < best) best = cut;
  }
  return best;
}

// Exact-cover search: pick disjoint sets covering the lowest uncovered
// element until the universe is exactly covered.
inline bool x3c_solvable(const X3CInstance& x) {
  const int q = static_cast<int>(x.universe.size());
  std::uint64_t full = q == 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << q) - 1;
  std::vector<std::uint64_t> masks;
  for (const auto& s : x.sets)
    masks.push_back((std::uint64_t(1) << s[0]) | (std::uint64_t(1) << s[1]) |
                    (std::uint64_t(1) << s[2]));
  std::function<bool(std::uint64_t)> rec = [&](std::uint64_t covered) {
    if (covered == full) return true;
    int lowest = 0;
    while (covered >> lowest & 1) ++lowest;
    for (std::uint64_t mask : masks) {
      if (!(mask >> lowest & 1)) continue;
      if (mask & covered) continue;
      if (rec(covered | mask)) return true;
    }
    return false;
  };
  return rec(0);
}

// Deterministic instance families for sweeps: every preference profile of a
// 2-agent, m-item instance, indexed by a pair of permutation ranks.
inline Instance profile_instance(int m, int perm_rank_a, int perm_rank_b) {
  std::vector<std::string> items;
  for (int i = 1; i <= m; ++i) items.push_back("x" + std::to_string(i));
  auto nth_perm = [&](int rank) {
    std::vector<std::string> p = items;
    std::sort(p.begin(), p.end());
    for (int i = 0; i < rank; ++i) std::next_permutation(p.begin(), p.end());
    return p;
  };
  return Instance({"a1", "a2"}, items, {nth_perm(perm_rank_a), nth_perm(perm_rank_b)});
}

}  // namespace oracle
