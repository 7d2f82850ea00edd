#include "seqalloc/flows.hpp"

#include <limits>
#include <queue>

namespace seqalloc {

MaxFlowResult max_flow(const FlowNetwork& net) {
  if (net.node_count < 2 || net.source < 0 || net.source >= net.node_count ||
      net.sink < 0 || net.sink >= net.node_count || net.source == net.sink)
    throw ValidationError("malformed flow network: bad source/sink");
  for (const auto& arc : net.arcs) {
    if (arc.from < 0 || arc.from >= net.node_count || arc.to < 0 ||
        arc.to >= net.node_count)
      throw ValidationError("malformed flow network: arc endpoint out of range");
    if (arc.capacity < 0)
      throw ValidationError("malformed flow network: negative capacity");
    if (arc.to == net.source || arc.from == net.sink)
      throw ValidationError(
          "malformed flow network: arc into the source or out of the sink");
  }

  // Residual representation: forward and reverse entries paired by xor 1.
  struct Edge {
    int to;
    long long residual;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<int>> adj(net.node_count);
  edges.reserve(net.arcs.size() * 2);
  for (const auto& arc : net.arcs) {
    adj[arc.from].push_back(static_cast<int>(edges.size()));
    edges.push_back({arc.to, arc.capacity});
    adj[arc.to].push_back(static_cast<int>(edges.size()));
    edges.push_back({arc.from, 0});
  }

  MaxFlowResult result;
  std::vector<int> parent_edge(net.node_count);
  while (true) {
    std::fill(parent_edge.begin(), parent_edge.end(), -1);
    parent_edge[net.source] = -2;
    std::queue<int> frontier;
    frontier.push(net.source);
    while (!frontier.empty() && parent_edge[net.sink] == -1) {
      int v = frontier.front();
      frontier.pop();
      for (int e : adj[v]) {
        if (edges[e].residual <= 0 || parent_edge[edges[e].to] != -1) continue;
        parent_edge[edges[e].to] = e;
        frontier.push(edges[e].to);
      }
    }
    if (parent_edge[net.sink] == -1) break;
    long long bottleneck = std::numeric_limits<long long>::max();
    for (int v = net.sink; v != net.source;) {
      int e = parent_edge[v];
      bottleneck = std::min(bottleneck, edges[e].residual);
      v = edges[e ^ 1].to;
    }
    for (int v = net.sink; v != net.source;) {
      int e = parent_edge[v];
      edges[e].residual -= bottleneck;
      edges[e ^ 1].residual += bottleneck;
      v = edges[e ^ 1].to;
    }
    result.value += bottleneck;
  }

  result.arc_flow.resize(net.arcs.size());
  for (size_t i = 0; i < net.arcs.size(); ++i)
    result.arc_flow[i] = net.arcs[i].capacity - edges[2 * i].residual;
  return result;
}

namespace {

bool try_augment(int left, const std::vector<std::vector<int>>& adj,
                 std::vector<int>& right_of_left, std::vector<int>& left_of_right,
                 std::vector<char>& visited) {
  for (int right : adj[left]) {
    if (visited[right]) continue;
    visited[right] = 1;
    if (left_of_right[right] == -1 ||
        try_augment(left_of_right[right], adj, right_of_left, left_of_right,
                    visited)) {
      right_of_left[left] = right;
      left_of_right[right] = left;
      return true;
    }
  }
  return false;
}

}  // namespace

MatchingResult max_bipartite_matching(int left_count, int right_count,
                                      const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(left_count);
  for (const auto& [l, r] : edges) {
    if (l < 0 || l >= left_count || r < 0 || r >= right_count)
      throw ValidationError("bipartite edge endpoint out of range");
    adj[l].push_back(r);
  }
  MatchingResult result;
  result.right_of_left.assign(left_count, -1);
  std::vector<int> left_of_right(right_count, -1);
  std::vector<char> visited(right_count);
  for (int l = 0; l < left_count; ++l) {
    std::fill(visited.begin(), visited.end(), 0);
    if (try_augment(l, adj, result.right_of_left, left_of_right, visited))
      ++result.size;
  }
  return result;
}

}  // namespace seqalloc
