#pragma once

#include <vector>

#include "seqalloc/model.hpp"

namespace seqalloc {

// Integer-capacity flow network with distinguished source and sink.
struct FlowNetwork {
  struct Arc {
    int from;
    int to;
    long long capacity;
  };

  int node_count = 0;
  int source = 0;
  int sink = 0;
  std::vector<Arc> arcs;

  int add_arc(int from, int to, long long capacity) {
    arcs.push_back({from, to, capacity});
    return static_cast<int>(arcs.size()) - 1;
  }
};

struct MaxFlowResult {
  long long value = 0;
  std::vector<long long> arc_flow;  // parallel to FlowNetwork::arcs
};

// Maximum s-t flow with an integral flow assignment, via shortest
// augmenting paths (breadth-first search). Throws ValidationError on
// malformed networks (bad indices, negative capacity, arcs into the source
// or out of the sink).
MaxFlowResult max_flow(const FlowNetwork& net);

// Maximum matching in a bipartite graph given as edges (left, right), via
// augmenting paths. Returns right_match[left] (-1 where unmatched).
struct MatchingResult {
  int size = 0;
  std::vector<int> right_of_left;
};

MatchingResult max_bipartite_matching(int left_count, int right_count,
                                      const std::vector<std::pair<int, int>>& edges);

}  // namespace seqalloc
