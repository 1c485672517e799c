#include "swarmsim/topology.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace swarmsim::topo {

const char* to_string(HandshakeOutcome o) {
  switch (o) {
    case HandshakeOutcome::Accepted: return "accepted";
    case HandshakeOutcome::RefusedBlocked: return "refused_blocked";
    case HandshakeOutcome::RefusedFull: return "refused_full";
    case HandshakeOutcome::RefusedDuplicate: return "refused_duplicate";
  }
  return "?";
}

SwarmGraph::SwarmGraph(int node_count, std::vector<int> max_connections)
    : adj_(node_count), block_until_(node_count), max_conn_(std::move(max_connections)) {
  if (static_cast<int>(max_conn_.size()) != node_count) {
    throw std::invalid_argument("max_connections size mismatch");
  }
}

bool SwarmGraph::blocked(NodeId owner, NodeId peer, std::int64_t now_ms) const {
  auto it = block_until_[owner].find(peer);
  return it != block_until_[owner].end() && now_ms < it->second;
}

void SwarmGraph::block(NodeId owner, NodeId peer, std::int64_t until_ms) {
  block_until_[owner][peer] = until_ms;
}

HandshakeOutcome SwarmGraph::handshake(NodeId a, NodeId b, std::int64_t now_ms) {
  if (has_edge(a, b)) return HandshakeOutcome::RefusedDuplicate;
  if (blocked(a, b, now_ms) || blocked(b, a, now_ms)) return HandshakeOutcome::RefusedBlocked;
  if (degree(a) >= max_conn_[a] || degree(b) >= max_conn_[b]) return HandshakeOutcome::RefusedFull;
  adj_[a].insert(b);
  adj_[b].insert(a);
  return HandshakeOutcome::Accepted;
}

void SwarmGraph::remove_edge(NodeId a, NodeId b) {
  adj_[a].erase(b);
  adj_[b].erase(a);
}

std::vector<NodeId> SwarmGraph::isolate(NodeId a) {
  std::vector<NodeId> former(adj_[a].begin(), adj_[a].end());
  for (NodeId b : former) adj_[b].erase(a);
  adj_[a].clear();
  return former;
}

bool SwarmGraph::connected() const {
  const int n = node_count();
  if (n < 2) return true;
  std::vector<char> seen(n, 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  int visited = 1;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : adj_[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++visited;
        stack.push_back(v);
      }
    }
  }
  return visited == n;
}

std::size_t SwarmGraph::edge_count() const {
  std::size_t directed = 0;
  for (const auto& s : adj_) directed += s.size();
  return directed / 2;
}

std::string SwarmGraph::edge_list_text() const {
  std::ostringstream out;
  for (NodeId a = 0; a < node_count(); ++a) {
    for (NodeId b : adj_[a]) {
      if (a < b) out << node_name(a) << ' ' << node_name(b) << '\n';
    }
  }
  return out.str();
}

void build_initial_topology(SwarmGraph& graph, int target_degree, Rng& rng) {
  const int n = graph.node_count();
  if (n < 2) throw std::runtime_error("topology needs at least 2 nodes");
  if (target_degree < 1) throw std::invalid_argument("target_degree must be >= 1");

  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  // Chain pass guarantees connectivity and needs two slots per inner node.
  for (int i = 0; i + 1 < n; ++i) {
    if (graph.handshake(order[i], order[i + 1], 0) != HandshakeOutcome::Accepted) {
      throw std::runtime_error(
          "initial topology unreachable: connection limits below 2");
    }
  }

  // Random chords until everyone reaches the target degree or the attempt
  // budget runs out (dense constraints can make some deficits unfillable).
  long attempts = 64L * n * target_degree;
  while (attempts-- > 0) {
    std::vector<NodeId> deficient;
    for (NodeId v = 0; v < n; ++v) {
      if (graph.degree(v) < target_degree && graph.degree(v) < graph.max_connections(v)) {
        deficient.push_back(v);
      }
    }
    if (deficient.empty()) break;
    NodeId u = deficient[rng.uniform_index(deficient.size())];
    NodeId v = static_cast<NodeId>(rng.uniform_index(n));
    if (u == v) continue;
    graph.handshake(u, v, 0);
  }
}

std::vector<NodeId> weakest_links(const AttractivenessView& view, int k) {
  std::vector<std::pair<double, NodeId>> scored;
  scored.reserve(view.size());
  for (const auto& [nb, values] : view) {
    double sum = 0.0;
    for (double v : values) sum += v;
    scored.emplace_back(sum, nb);
  }
  std::sort(scored.begin(), scored.end());
  std::vector<NodeId> out;
  for (int i = 0; i < k && i < static_cast<int>(scored.size()); ++i) {
    out.push_back(scored[i].second);
  }
  return out;
}

}  // namespace swarmsim::topo
