#pragma once

#include <optional>

#include "seqalloc/model.hpp"

namespace seqalloc {

// Round-dominance for a balanced assignment: with p[a][i] the (i+1)-th
// ranked item inside agent a's share, every agent prefers each of her own
// earlier-round items to every other agent's later-round item (all t < s,
// all ordered pairs of distinct agents). Throws when shares are unbalanced.
bool has_round_dominance(const Instance& inst, const Assignment& m);

// Directed precedence graphs over agents, defined for balanced assignments
// that pass is_pareto_optimal and has_round_dominance. With p[a][i] as
// above, round i contributes an edge whenever one agent prefers another's
// round-i item to her own:
//   Serpentine: odd rounds (i = 1, 3, ... counted from 1) orient the edge
//     envied -> envier, even rounds reverse it. Acyclicity characterizes
//     achievability by a serpentine (balanced alternation) policy.
//   Uniform: every round orients envied -> envier. Acyclicity characterizes
//     achievability by a repeated-order (strict alternation) policy.
enum class PrecedenceKind { Serpentine, Uniform };

struct PrecedenceGraph {
  PrecedenceKind kind;
  int agent_count = 0;
  std::vector<std::vector<char>> edge;  // edge[from][to]

  bool has_edge(int from, int to) const { return edge[from][to] != 0; }
  bool acyclic() const;
  // Topological order, lowest agent index first among ready nodes. Empty
  // when cyclic.
  std::vector<int> topological_order() const;
};

PrecedenceGraph build_precedence_graph(const Instance& inst, const Assignment& m,
                                       PrecedenceKind kind);

struct Achievability {
  bool achievable = false;
  std::optional<Policy> witness;
};

// Decides whether some policy of the class produces exactly `m`, returning
// a witness policy in the class when one exists.
Achievability achievable(const Instance& inst, const Assignment& m, PolicyClass cls);

}  // namespace seqalloc
