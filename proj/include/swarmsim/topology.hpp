#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "swarmsim/rng.hpp"
#include "swarmsim/types.hpp"

namespace swarmsim::topo {

enum class HandshakeOutcome { Accepted, RefusedBlocked, RefusedFull, RefusedDuplicate };
const char* to_string(HandshakeOutcome o);

/// Undirected swarm connectivity with per-node connection limits and timed
/// block lists. Edges are stored symmetrically; a blocked pair cannot
/// handshake until the stored expiry time is reached.
class SwarmGraph {
 public:
  SwarmGraph() = default;
  SwarmGraph(int node_count, std::vector<int> max_connections);

  int node_count() const { return static_cast<int>(adj_.size()); }
  int degree(NodeId a) const { return static_cast<int>(adj_[a].size()); }
  const std::set<NodeId>& neighbors(NodeId a) const { return adj_[a]; }
  bool has_edge(NodeId a, NodeId b) const { return adj_[a].count(b) > 0; }
  int max_connections(NodeId a) const { return max_conn_[a]; }

  /// Blocked entries expire exactly at their stored time.
  bool blocked(NodeId owner, NodeId peer, std::int64_t now_ms) const;
  void block(NodeId owner, NodeId peer, std::int64_t until_ms);

  /// Mutual connection attempt. On acceptance the symmetric edge is added;
  /// profile exchange and strategy hooks are the caller's concern.
  HandshakeOutcome handshake(NodeId a, NodeId b, std::int64_t now_ms);

  void remove_edge(NodeId a, NodeId b);

  /// Drops every edge of `a` (node failure); returns the former neighbors.
  std::vector<NodeId> isolate(NodeId a);

  bool connected() const;  // ignores isolated graphs of size < 2

  std::size_t edge_count() const;  // undirected count

  /// Lines of "a b" with a < b, sorted; the snapshot export format.
  std::string edge_list_text() const;

 private:
  std::vector<std::set<NodeId>> adj_;
  std::vector<std::map<NodeId, std::int64_t>> block_until_;
  std::vector<int> max_conn_;
};

/// Wires a connected random topology: a shuffled chain for connectivity plus
/// random extra edges until each node reaches target_degree or attempts run
/// out. Deterministic for a fixed rng state. Throws std::runtime_error when
/// connectivity is impossible under the connection limits.
void build_initial_topology(SwarmGraph& graph, int target_degree, Rng& rng);

/// Per-connection attractiveness by task type, as the active strategy scores
/// it (pheromone levels or message counts).
using AttractivenessView = std::map<NodeId, std::array<double, kTaskTypeCount>>;

/// The k connections with the smallest attractiveness summed over task
/// types, weakest first; ties break toward the lexicographically smaller
/// neighbor id. Returns fewer than k when the view is smaller.
std::vector<NodeId> weakest_links(const AttractivenessView& view, int k);

}  // namespace swarmsim::topo
