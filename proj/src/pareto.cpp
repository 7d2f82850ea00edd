#include "seqalloc/pareto.hpp"

#include <algorithm>

namespace seqalloc {

namespace {

void check_complete(const Instance& inst, const Assignment& m) {
  if (static_cast<int>(m.owner.size()) != inst.item_count() || !m.complete())
    throw ValidationError("assignment is not a complete partition of the items");
  for (int a : m.owner)
    if (a < 0 || a >= inst.agent_count())
      throw ValidationError("assignment names an unknown agent");
}

// Returns the first cycle found by depth-first search from the
// lowest-numbered node, as a list of nodes, or empty when acyclic.
std::vector<int> first_cycle(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
  std::vector<int> stack, edge_pos;
  for (int start = 0; start < n; ++start) {
    if (state[start] != 0) continue;
    stack = {start};
    edge_pos = {0};
    state[start] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      if (edge_pos.back() == static_cast<int>(adj[v].size())) {
        state[v] = 2;
        stack.pop_back();
        edge_pos.pop_back();
        continue;
      }
      int w = adj[v][edge_pos.back()++];
      if (state[w] == 1) {
        auto it = std::find(stack.begin(), stack.end(), w);
        return std::vector<int>(it, stack.end());
      }
      if (state[w] == 0) {
        state[w] = 1;
        stack.push_back(w);
        edge_pos.push_back(0);
      }
    }
  }
  return {};
}

}  // namespace

TradingGraph TradingGraph::build(const Instance& inst, const Assignment& m) {
  check_complete(inst, m);
  TradingGraph g;
  g.item_count = inst.item_count();
  g.adj.assign(2 * g.item_count, {});
  for (int item = 0; item < g.item_count; ++item) {
    int agent = m.owner[item];
    // Clone of `agent` holding `item`: out-edges to every strictly
    // preferred item, most preferred first.
    const auto& pref = inst.pref(agent);
    for (int pos = 0; pref[pos] != item; ++pos)
      g.adj[g.clone_node(item)].push_back(g.item_node(pref[pos]));
    g.adj[g.item_node(item)].push_back(g.clone_node(item));
  }
  return g;
}

bool is_pareto_optimal(const Instance& inst, const Assignment& m) {
  return first_cycle(TradingGraph::build(inst, m).adj).empty();
}

Assignment pareto_improve(const Instance& inst, const Assignment& m) {
  Assignment cur = m;
  while (true) {
    TradingGraph g = TradingGraph::build(inst, cur);
    std::vector<int> cycle = first_cycle(g.adj);
    if (cycle.empty()) return cur;
    // The cycle alternates clone -> item -> clone ...; each clone's agent
    // trades its owned item for the item it points to.
    Assignment next = cur;
    for (size_t i = 0; i < cycle.size(); ++i) {
      int v = cycle[i];
      if (v >= g.item_count) continue;  // item node
      int wanted = cycle[(i + 1) % cycle.size()] - g.item_count;
      next.owner[wanted] = cur.owner[v];
    }
    cur = next;
  }
}

Policy witness_picking_sequence(const Instance& inst, const Assignment& m) {
  check_complete(inst, m);
  const int n = inst.agent_count();
  const int total = inst.item_count();
  std::vector<char> taken(total, 0);
  std::vector<int> cursor(n, 0);
  Policy pi;
  for (int step = 0; step < total; ++step) {
    int chosen = -1;
    for (int a = 0; a < n && chosen < 0; ++a) {
      int& c = cursor[a];
      const auto& pref = inst.pref(a);
      while (c < total && taken[pref[c]]) ++c;
      if (c < total && m.owner[pref[c]] == a) chosen = a;
    }
    if (chosen < 0) throw ValidationError("not Pareto optimal");
    int item = inst.pref(chosen)[cursor[chosen]];
    taken[item] = 1;
    pi.turns.push_back(chosen);
  }
  return pi;
}

}  // namespace seqalloc
