#pragma once

#include "seqalloc/model.hpp"

namespace seqalloc {

// Trading graph of a complete assignment. Every owned item contributes one
// owner node ("clone" of the owning agent holding exactly that item); the
// clone points to every item its agent strictly prefers to the owned one,
// and every item points back to its owner clone. The assignment is Pareto
// optimal (responsive preferences) iff this graph is acyclic.
struct TradingGraph {
  // Node ids: 0..m-1 owner clones keyed by the owned item, m..2m-1 items.
  int item_count = 0;
  std::vector<std::vector<int>> adj;

  static TradingGraph build(const Instance& inst, const Assignment& m);
  int clone_node(int owned_item) const { return owned_item; }
  int item_node(int item) const { return item_count + item; }
};

// Acyclicity test on the trading graph; O(m^2) in the number of items.
bool is_pareto_optimal(const Instance& inst, const Assignment& m);

// Repeatedly executes trading cycles (the first cycle reached by
// depth-first search from the lowest-numbered node, neighbors in preference
// order) until the graph is acyclic. The result is Pareto optimal and
// weakly dominates the input itemwise; an already optimal assignment is
// returned unchanged.
Assignment pareto_improve(const Instance& inst, const Assignment& m);

// A policy whose sincere execution reproduces the Pareto-optimal assignment
// `m`: at every step the lowest-indexed agent whose most preferred
// remaining item lies in her own share picks next. Throws ValidationError
// ("not Pareto optimal") when no such agent exists at some step.
Policy witness_picking_sequence(const Instance& inst, const Assignment& m);

}  // namespace seqalloc
