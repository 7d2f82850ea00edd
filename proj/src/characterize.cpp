#include "seqalloc/characterize.hpp"

#include <algorithm>

#include "seqalloc/engine.hpp"
#include "seqalloc/pareto.hpp"

namespace seqalloc {

namespace {

void check_complete(const Instance& inst, const Assignment& m) {
  if (static_cast<int>(m.owner.size()) != inst.item_count() || !m.complete())
    throw ValidationError("assignment is not a complete partition of the items");
}

bool balanced(const Instance& inst, const Assignment& m) {
  if (!inst.divisible()) return false;
  const int k = inst.turns_per_agent();
  for (int size : m.share_sizes(inst))
    if (size != k) return false;
  return true;
}

}  // namespace

bool has_round_dominance(const Instance& inst, const Assignment& m) {
  check_complete(inst, m);
  if (!balanced(inst, m))
    throw ValidationError("round dominance is defined for balanced assignments");
  const int n = inst.agent_count();
  const int k = inst.turns_per_agent();
  auto p = ranked_shares(inst, m);
  for (int a = 0; a < n; ++a) {
    // It suffices to compare consecutive rounds: p[a][t] vs p[b][t+1].
    for (int t = 0; t + 1 < k; ++t) {
      for (int b = 0; b < n; ++b) {
        if (b == a) continue;
        if (inst.rank0(a, p[b][t + 1]) < inst.rank0(a, p[a][t])) return false;
      }
    }
  }
  return true;
}

bool PrecedenceGraph::acyclic() const {
  return static_cast<int>(topological_order().size()) == agent_count;
}

std::vector<int> PrecedenceGraph::topological_order() const {
  std::vector<int> indegree(agent_count, 0);
  for (int from = 0; from < agent_count; ++from)
    for (int to = 0; to < agent_count; ++to)
      if (edge[from][to]) ++indegree[to];
  std::vector<int> order;
  std::vector<char> placed(agent_count, 0);
  for (int step = 0; step < agent_count; ++step) {
    int pick = -1;
    for (int a = 0; a < agent_count && pick < 0; ++a)
      if (!placed[a] && indegree[a] == 0) pick = a;
    if (pick < 0) return {};  // cycle
    placed[pick] = 1;
    order.push_back(pick);
    for (int to = 0; to < agent_count; ++to)
      if (edge[pick][to]) --indegree[to];
  }
  return order;
}

PrecedenceGraph build_precedence_graph(const Instance& inst, const Assignment& m,
                                       PrecedenceKind kind) {
  check_complete(inst, m);
  if (!balanced(inst, m) || !is_pareto_optimal(inst, m) ||
      !has_round_dominance(inst, m))
    throw ValidationError(
        "precedence graphs need a balanced, Pareto-optimal, round-dominant "
        "assignment");
  const int n = inst.agent_count();
  const int k = inst.turns_per_agent();
  auto p = ranked_shares(inst, m);
  PrecedenceGraph g;
  g.kind = kind;
  g.agent_count = n;
  g.edge.assign(n, std::vector<char>(n, 0));
  for (int round = 1; round <= k; ++round) {
    bool reversed = kind == PrecedenceKind::Serpentine && round % 2 == 0;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (a == b) continue;
        // Agent a prefers b's round item to her own: b must pick earlier in
        // this round's order.
        if (inst.rank0(a, p[b][round - 1]) < inst.rank0(a, p[a][round - 1])) {
          if (reversed)
            g.edge[a][b] = 1;
          else
            g.edge[b][a] = 1;
        }
      }
    }
  }
  return g;
}

namespace {

// Witness for a recursively balanced target: per round, repeatedly the
// lowest-indexed agent whose most preferred remaining item is her own round
// item picks next.
std::optional<Policy> rec_balanced_witness(const Instance& inst, const Assignment& m) {
  const int n = inst.agent_count();
  const int k = inst.turns_per_agent();
  auto p = ranked_shares(inst, m);
  std::vector<char> taken(inst.item_count(), 0);
  std::vector<int> cursor(n, 0);
  Policy pi;
  for (int round = 0; round < k; ++round) {
    std::vector<char> done(n, 0);
    for (int slot = 0; slot < n; ++slot) {
      int chosen = -1;
      for (int a = 0; a < n && chosen < 0; ++a) {
        if (done[a]) continue;
        int& c = cursor[a];
        const auto& pref = inst.pref(a);
        while (taken[pref[c]]) ++c;
        if (pref[c] == p[a][round]) chosen = a;
      }
      if (chosen < 0) return std::nullopt;
      taken[p[chosen][round]] = 1;
      done[chosen] = 1;
      pi.turns.push_back(chosen);
    }
  }
  return pi;
}

Policy repeat_order(const std::vector<int>& order, int rounds, bool serpentine) {
  Policy pi;
  const int n = static_cast<int>(order.size());
  for (int r = 0; r < rounds; ++r)
    for (int i = 0; i < n; ++i)
      pi.turns.push_back(serpentine && r % 2 == 1 ? order[n - 1 - i] : order[i]);
  return pi;
}

}  // namespace

Achievability achievable(const Instance& inst, const Assignment& m, PolicyClass cls) {
  check_complete(inst, m);
  if (cls == PolicyClass::Arbitrary) {
    if (!is_pareto_optimal(inst, m)) return {};
    return {true, witness_picking_sequence(inst, m)};
  }
  if (!inst.divisible())
    throw ValidationError(
        "the number of items must be a multiple of the number of agents for "
        "this policy class");
  // Cheap to expensive: balance, Pareto optimality, round dominance, then
  // the class-specific acyclicity condition.
  if (!balanced(inst, m)) return {};
  if (!is_pareto_optimal(inst, m)) return {};
  if (cls == PolicyClass::Balanced) {
    // The greedy witness uses each agent exactly |share| = k times.
    return {true, witness_picking_sequence(inst, m)};
  }
  if (!has_round_dominance(inst, m)) return {};
  if (cls == PolicyClass::RecursivelyBalanced) {
    auto witness = rec_balanced_witness(inst, m);
    if (!witness) return {};
    return {true, std::move(witness)};
  }
  PrecedenceKind kind = cls == PolicyClass::BalancedAlternation
                            ? PrecedenceKind::Serpentine
                            : PrecedenceKind::Uniform;
  PrecedenceGraph g = build_precedence_graph(inst, m, kind);
  std::vector<int> order = g.topological_order();
  if (order.empty()) return {};  // cyclic
  return {true, repeat_order(order, inst.turns_per_agent(),
                             cls == PolicyClass::BalancedAlternation)};
}

}  // namespace seqalloc
