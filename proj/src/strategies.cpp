#include "swarmsim/strategies.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <stdexcept>

namespace swarmsim {

namespace {

using sim::AcceptedOffload;
using sim::Engine;
using sim::GossipCandidate;
using sim::GossipPending;
using sim::Strategy;
using sim::TimerTag;

std::int64_t req_of(std::uint64_t req) { return static_cast<std::int64_t>(req); }

// Task comes back to its origin for local execution after a failed search.
// The request is a miss the moment the search gives up.
void return_unplaced(Engine& e, NodeId here, std::uint64_t req, const Task& task) {
  e.request_lost(req);
  if (here == task.origin) {
    e.enqueue_task(here, task);
    return;
  }
  ResultPayload r;
  r.request = req;
  r.task_id = task.task_id;
  r.status = ResultStatus::Returned;
  r.task = task;
  e.send(here, task.origin, r, req_of(req));
}

// ---------------------------------------------------------------------------
// Random search: hop the task to uniformly drawn neighbors until someone can
// take it or the TTL runs out. The previous holder is excluded to damp
// two-cycles, with a fallback to the full neighbor set.

class RandomStrategy final : public Strategy {
 public:
  const char* name() const override { return "random"; }

  void on_request(Engine& e, std::uint64_t req, const Task& task) override {
    OffloadPayload p;
    p.request = req;
    p.task = task;
    p.ttl_remaining_ms = task.ttl_ms;
    p.hops = 0;
    p.via = kNoNode;
    step(e, task.origin, std::move(p));
  }

  void on_message(Engine& e, const MessageEnvelope& env) override {
    if (env.kind() == MsgKind::Offload) {
      step(e, env.receiver, std::get<OffloadPayload>(env.payload));
      return;
    }
    if (env.kind() == MsgKind::Result) {
      const auto& p = std::get<ResultPayload>(env.payload);
      if (p.status == ResultStatus::Completed) {
        e.request_returned(p.request);
      } else if (p.status == ResultStatus::Returned) {
        e.enqueue_task(env.receiver, *p.task);
      }
    }
  }

  void on_offloaded_task_done(Engine& e, NodeId node, const Task& task,
                              const AcceptedOffload& info) override {
    ResultPayload r;
    r.request = info.request;
    r.task_id = task.task_id;
    r.status = ResultStatus::Completed;
    e.send(node, task.origin, r, req_of(info.request));
  }

 private:
  void step(Engine& e, NodeId here, OffloadPayload p) {
    if (e.accepts(here, p.task.type)) {
      AcceptedOffload info;
      info.request = p.request;
      info.hops = p.hops;
      e.accept_offload(here, p.task, std::move(info));
      return;
    }
    if (p.ttl_remaining_ms <= 0) {
      return_unplaced(e, here, p.request, p.task);
      return;
    }
    std::vector<NodeId> cands = e.strategy_candidates(here);
    if (p.via != kNoNode) {
      std::erase(cands, p.via);
      if (cands.empty()) cands = e.strategy_candidates(here);
    }
    if (cands.empty()) {
      return_unplaced(e, here, p.request, p.task);
      return;
    }
    NodeId next = cands[e.rng().uniform_index(cands.size())];
    p.via = here;
    ++p.hops;
    p.ttl_remaining_ms -= e.cfg().latency_ms;
    std::uint64_t req = p.request;
    e.send(here, next, std::move(p), req_of(req));
  }
};

// ---------------------------------------------------------------------------
// Ant strategy: a forward ant carries the task along the transition rule,
// a backward ant retraces the path depositing pheromone scaled by target
// quality and closeness to the origin.

class AcoStrategy final : public Strategy {
 public:
  const char* name() const override { return "aco"; }
  bool wants_evaporation() const override { return true; }

  void on_connected(Engine& e, NodeId node, NodeId neighbor) override {
    const NodeProfile& prof = e.node(node).neighbor_profiles.at(neighbor);
    e.node(node).pheromones.init_neighbor(neighbor, prof.spec, params(e));
  }

  void on_disconnected(Engine& e, NodeId node, NodeId neighbor) override {
    e.node(node).pheromones.erase_neighbor(neighbor);
  }

  void on_evaporate(Engine& e, NodeId node) override {
    e.node(node).pheromones.evaporate(e.cfg().aco_rho);
  }

  void on_node_cleared(Engine& e, NodeId node) override {
    e.node(node).pheromones.clear();
  }

  void on_request(Engine& e, std::uint64_t req, const Task& task) override {
    ++e.stats().forward_ants;
    ForwardAntPayload p;
    p.request = req;
    p.task = task;
    p.ttl_remaining_ms = task.ttl_ms;
    p.path = {task.origin};
    step(e, task.origin, std::move(p));
  }

  void on_message(Engine& e, const MessageEnvelope& env) override {
    switch (env.kind()) {
      case MsgKind::ForwardAnt:
        step(e, env.receiver, std::get<ForwardAntPayload>(env.payload));
        break;
      case MsgKind::BackwardAnt:
        walk_back(e, env.receiver, std::get<BackwardAntPayload>(env.payload));
        break;
      case MsgKind::Result: {
        const auto& p = std::get<ResultPayload>(env.payload);
        if (p.status == ResultStatus::Returned) e.enqueue_task(env.receiver, *p.task);
        break;
      }
      default:
        break;
    }
  }

  void on_offloaded_task_done(Engine& e, NodeId node, const Task& task,
                              const AcceptedOffload& info) override {
    if (info.path.size() < 2) {  // accepted at the origin itself
      e.request_returned(info.request);
      return;
    }
    ++e.stats().backward_ants;
    BackwardAntPayload b;
    b.request = info.request;
    b.task_id = task.task_id;
    b.type = task.type;
    b.quality = info.quality;
    b.path = info.path;
    b.cursor = static_cast<std::int32_t>(info.path.size()) - 2;
    std::uint64_t req = info.request;
    e.send(node, b.path[b.cursor], std::move(b), req_of(req));
  }

  std::optional<topo::AttractivenessView> attractiveness(Engine& e, NodeId node) override {
    topo::AttractivenessView view;
    const auto& table = e.node(node).pheromones;
    for (NodeId nb : e.graph().neighbors(node)) {
      auto& row = view[nb];
      for (TaskType t : all_task_types()) {
        row[static_cast<std::size_t>(t)] = table.level(nb, t, e.cfg().aco_tau0);
      }
    }
    return view;
  }

 private:
  static aco::AcoParams params(Engine& e) {
    aco::AcoParams p;
    p.alpha = e.cfg().aco_alpha;
    p.beta = e.cfg().aco_beta;
    p.rho = e.cfg().aco_rho;
    p.tau0 = e.cfg().aco_tau0;
    p.tau0_plus = e.cfg().aco_tau0_plus;
    return p;
  }

  void step(Engine& e, NodeId here, ForwardAntPayload p) {
    if (e.accepts(here, p.task.type)) {
      accept(e, here, std::move(p));
      return;
    }
    if (p.ttl_remaining_ms <= 0) {
      return_unplaced(e, here, p.request, p.task);
      return;
    }
    // Visited nodes are excluded; a boxed-in ant falls back to every
    // neighbor rather than dying in place.
    std::vector<NodeId> all = e.strategy_candidates(here);
    std::set<NodeId> visited(p.path.begin(), p.path.end());
    std::vector<NodeId> cands;
    for (NodeId c : all) {
      if (!visited.count(c)) cands.push_back(c);
    }
    bool fallback = false;
    if (cands.empty()) {
      cands = all;
      fallback = true;
    }
    if (cands.empty()) {
      return_unplaced(e, here, p.request, p.task);
      return;
    }
    const aco::AcoParams prm = params(e);
    const sim::NodeRuntime& n = e.node(here);
    std::vector<aco::TransitionCandidate> tc(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) {
      tc[i].id = cands[i];
      tc[i].tau = n.pheromones.level(cands[i], p.task.type, prm.tau0);
      tc[i].eta = aco::heuristic_eta(n.neighbor_profiles.at(cands[i]).spec, p.task.type, prm);
    }
    std::vector<double> probs = aco::transition_probabilities(tc, prm);
    NodeId next = cands[e.rng().weighted_index(probs)];
    p.path.push_back(next);
    p.fallback_used = p.fallback_used || fallback;
    p.ttl_remaining_ms -= e.cfg().latency_ms;
    std::uint64_t req = p.request;
    e.send(here, next, std::move(p), req_of(req));
  }

  void accept(Engine& e, NodeId here, ForwardAntPayload p) {
    const sim::NodeRuntime& n = e.node(here);
    // Quality is snapshotted at acceptance; the backward ant carries it out
    // at completion together with the result.
    const double q_l = aco::queue_quality(n.queue.l_avg(), n.queue.limit());
    AcceptedOffload info;
    info.request = p.request;
    info.quality = aco::quality_pheromones(q_l, n.profile.spec);
    info.path = std::move(p.path);
    info.hops = static_cast<int>(info.path.size()) - 1;
    e.accept_offload(here, p.task, std::move(info));
  }

  void walk_back(Engine& e, NodeId here, BackwardAntPayload b) {
    assert(b.cursor >= 0 && b.path[b.cursor] == here);
    const NodeId toward_target = b.path[b.cursor + 1];
    // Deposit on the outgoing edge toward the target; hops_to_origin is the
    // edge's position, so trails near the origin come out strongest. Links
    // pruned while the ant was in flight take no deposit.
    if (e.graph().has_edge(here, toward_target)) {
      const double delta = aco::delta_pheromone(b.quality, b.cursor + 1);
      e.node(here).pheromones.add(toward_target, b.type, delta, e.cfg().aco_tau0);
    }
    if (b.cursor == 0) {
      e.request_returned(b.request);
      return;
    }
    --b.cursor;
    NodeId prev = b.path[b.cursor];
    std::uint64_t req = b.request;
    e.send(here, prev, std::move(b), req_of(req));
  }
};

// ---------------------------------------------------------------------------
// Gossips: flood discovery messages, collect responses until the discovery
// deadline, then offload along the best-ranked path, falling through the
// ranking on rejections and silence.

class GossipStrategy final : public Strategy {
 public:
  const char* name() const override { return "gossips"; }

  void on_request(Engine& e, std::uint64_t req, const Task& task) override {
    const NodeId origin = task.origin;
    std::vector<NodeId> nbrs = e.strategy_candidates(origin);
    if (nbrs.empty()) {
      e.request_lost(req);
      e.enqueue_task(origin, task);
      return;
    }
    const std::int64_t deadline =
        e.now_ms() + static_cast<std::int64_t>(e.cfg().gossip_discovery_fraction *
                                               static_cast<double>(task.ttl_ms));
    GossipPending pend;
    pend.task = task;
    pend.discovery_deadline_ms = deadline;
    pend.ttl_deadline_ms = e.now_ms() + task.ttl_ms;
    e.node(origin).gossip_pending.emplace(req, std::move(pend));
    mark_seen(e, origin, req, deadline);

    GossipDiscoveryPayload d;
    d.gossip_id = req;
    d.request = req;
    d.type = task.type;
    d.origin = origin;
    d.path = {origin};
    d.deadline_ms = deadline;
    for (NodeId nb : nbrs) {
      count_traffic(e, origin, nb, task.type);
      e.send(origin, nb, d, req_of(req));
    }
    e.schedule_timer(deadline, origin, req, 0, TimerTag::GossipDeadline);
  }

  void on_message(Engine& e, const MessageEnvelope& env) override {
    switch (env.kind()) {
      case MsgKind::GossipDiscovery:
        handle_discovery(e, env.receiver, env.sender,
                         std::get<GossipDiscoveryPayload>(env.payload));
        break;
      case MsgKind::GossipResponse:
        relay_response(e, env.receiver, env.sender,
                       std::get<GossipResponsePayload>(env.payload));
        break;
      case MsgKind::Offload:
        relay_offload(e, env.receiver, env.sender, std::get<OffloadPayload>(env.payload));
        break;
      case MsgKind::Result:
        handle_result(e, env.receiver, env.sender, std::get<ResultPayload>(env.payload));
        break;
      default:
        break;
    }
  }

  void on_timer(Engine& e, NodeId node, std::uint64_t req, std::uint64_t aux,
                TimerTag tag) override {
    auto& pending = e.node(node).gossip_pending;
    auto it = pending.find(req);
    if (it == pending.end()) return;
    if (tag == TimerTag::GossipDeadline) {
      it->second.ranked = baselines::gossip_rank(it->second.responses);
      it->second.offloading = true;
      try_next_target(e, node, req);
    } else if (tag == TimerTag::GossipAttempt) {
      if (aux != it->second.attempt_seq) return;  // superseded attempt
      try_next_target(e, node, req);              // silence: presume the path dead
    }
  }

  void on_offloaded_task_done(Engine& e, NodeId node, const Task& task,
                              const AcceptedOffload& info) override {
    // The result retraces the offload route back to the origin.
    ResultPayload r;
    r.request = info.request;
    r.task_id = task.task_id;
    r.status = ResultStatus::Completed;
    r.route = info.path;  // target first, origin last
    r.route_cursor = 0;
    if (r.route.size() < 2) {
      e.request_returned(info.request);
      return;
    }
    count_traffic(e, node, r.route[1], task.type);
    std::uint64_t req = info.request;
    NodeId next = r.route[1];
    r.route_cursor = 1;
    e.send(node, next, std::move(r), req_of(req));
  }

  void on_node_cleared(Engine& e, NodeId node) override {
    auto& n = e.node(node);
    // Tasks awaiting placement die with their origin.
    for (auto& [req, pend] : n.gossip_pending) e.task_lost(pend.task.task_id);
    n.gossip_pending.clear();
    n.gossip_seen.clear();
    n.gossip_traffic.clear();
  }

  void on_disconnected(Engine& e, NodeId node, NodeId neighbor) override {
    e.node(node).gossip_traffic.erase(neighbor);
  }

  std::optional<topo::AttractivenessView> attractiveness(Engine& e, NodeId node) override {
    topo::AttractivenessView view;
    const auto& traffic = e.node(node).gossip_traffic;
    for (NodeId nb : e.graph().neighbors(node)) {
      auto& row = view[nb];
      row.fill(0.0);
      auto it = traffic.find(nb);
      if (it != traffic.end()) {
        for (int t = 0; t < kTaskTypeCount; ++t) {
          row[t] = static_cast<double>(it->second[t]);
        }
      }
    }
    return view;
  }

 private:
  void mark_seen(Engine& e, NodeId node, std::uint64_t gossip_id, std::int64_t expiry) {
    auto& seen = e.node(node).gossip_seen;
    seen[gossip_id] = expiry;
    if (seen.size() > 512) {  // shed flood ids that can no longer recur
      for (auto it = seen.begin(); it != seen.end();) {
        it = it->second < e.now_ms() ? seen.erase(it) : std::next(it);
      }
    }
  }

  void count_traffic(Engine& e, NodeId node, NodeId neighbor, TaskType t) {
    auto& row = e.node(node).gossip_traffic[neighbor];
    ++row[static_cast<std::size_t>(t)];
  }

  void handle_discovery(Engine& e, NodeId here, NodeId sender, GossipDiscoveryPayload p) {
    count_traffic(e, here, sender, p.type);
    auto& seen = e.node(here).gossip_seen;
    if (seen.count(p.gossip_id)) {
      ++e.stats().gossip_dup_drops;
      return;
    }
    if (e.now_ms() > p.deadline_ms) return;
    mark_seen(e, here, p.gossip_id, p.deadline_ms);

    if (e.accepts(here, p.type)) {
      const sim::NodeRuntime& n = e.node(here);
      GossipResponsePayload r;
      r.gossip_id = p.gossip_id;
      r.request = p.request;
      r.type = p.type;
      r.responder = here;
      r.queue_occupation = n.queue.occupation();
      r.queue_limit = n.queue.limit();
      r.c_comm = n.profile.spec.c_comm;
      r.c_comp = n.profile.spec.c_comp;
      r.c_storage = n.profile.spec.c_storage;
      r.route.assign(p.path.rbegin(), p.path.rend());  // back toward the origin
      r.route_cursor = 0;
      count_traffic(e, here, r.route[0], p.type);
      NodeId first_hop = r.route[0];
      e.send(here, first_hop, std::move(r), req_of(p.request));
    }

    // Capable or not, keep spreading; receivers deduplicate by gossip id.
    p.path.push_back(here);
    for (NodeId nb : e.strategy_candidates(here)) {
      if (nb == sender) continue;
      count_traffic(e, here, nb, p.type);
      e.send(here, nb, p, req_of(p.request));
    }
  }

  void relay_response(Engine& e, NodeId here, NodeId sender, GossipResponsePayload p) {
    count_traffic(e, here, sender, p.type);
    assert(p.route_cursor < static_cast<std::int32_t>(p.route.size()));
    assert(p.route[p.route_cursor] == here);
    if (p.route_cursor + 1 < static_cast<std::int32_t>(p.route.size())) {
      ++p.route_cursor;
      NodeId next = p.route[p.route_cursor];
      std::uint64_t req = p.request;
      e.send(here, next, std::move(p), req_of(req));
      return;
    }
    // Arrived at the origin: collect while the discovery window is open.
    auto& pending = e.node(here).gossip_pending;
    auto it = pending.find(p.gossip_id);
    if (it == pending.end() || it->second.offloading) return;
    it->second.responses.push_back(std::move(p));
  }

  void try_next_target(Engine& e, NodeId origin, std::uint64_t req) {
    auto& pending = e.node(origin).gossip_pending;
    auto it = pending.find(req);
    if (it == pending.end()) return;
    GossipPending& pend = it->second;
    while (pend.next_candidate < pend.ranked.size()) {
      const GossipCandidate& c = pend.ranked[pend.next_candidate];
      const std::int64_t round_trip = static_cast<std::int64_t>(c.hops + 2) * e.cfg().latency_ms;
      if (e.now_ms() + round_trip > pend.ttl_deadline_ms) break;  // out of time
      ++pend.next_candidate;
      ++pend.attempt_seq;
      OffloadPayload op;
      op.request = req;
      op.task = pend.task;
      op.ttl_remaining_ms = pend.ttl_deadline_ms - e.now_ms();
      op.hops = c.hops;
      op.route = c.route;
      op.route_cursor = 1;
      count_traffic(e, origin, c.route[1], pend.task.type);
      e.send(origin, c.route[1], std::move(op), req_of(req));
      e.schedule_timer(e.now_ms() + round_trip, origin, req, pend.attempt_seq,
                       TimerTag::GossipAttempt);
      return;
    }
    // Ranking exhausted (or no time left): execute locally, a miss.
    Task task = pend.task;
    pending.erase(it);
    e.request_lost(req);
    e.enqueue_task(origin, task);
  }

  void relay_offload(Engine& e, NodeId here, NodeId sender, OffloadPayload p) {
    count_traffic(e, here, sender, p.task.type);
    assert(!p.route.empty() && p.route[p.route_cursor] == here);
    if (p.route_cursor + 1 < static_cast<std::int32_t>(p.route.size())) {
      ++p.route_cursor;
      NodeId next = p.route[p.route_cursor];
      count_traffic(e, here, next, p.task.type);
      std::uint64_t req = p.request;
      e.send(here, next, std::move(p), req_of(req));
      return;
    }
    // At the chosen target: accept or bounce, answering the origin directly.
    const NodeId origin = p.task.origin;
    ResultPayload ack;
    ack.request = p.request;
    ack.task_id = p.task.task_id;
    if (e.accepts(here, p.task.type)) {
      AcceptedOffload info;
      info.request = p.request;
      info.hops = p.hops;
      info.path.assign(p.route.rbegin(), p.route.rend());  // return route
      e.accept_offload(here, p.task, std::move(info));
      ack.status = ResultStatus::Accepted;
    } else {
      ack.status = ResultStatus::Rejected;
    }
    std::uint64_t req = p.request;
    e.send(here, origin, std::move(ack), req_of(req));
  }

  void handle_result(Engine& e, NodeId here, NodeId sender, ResultPayload p) {
    switch (p.status) {
      case ResultStatus::Accepted: {
        // Custody handed over; the completion will arrive on its own time.
        e.node(here).gossip_pending.erase(p.request);
        break;
      }
      case ResultStatus::Rejected:
        try_next_target(e, here, p.request);
        break;
      case ResultStatus::Completed: {
        (void)sender;
        if (p.route_cursor + 1 < static_cast<std::int32_t>(p.route.size())) {
          ++p.route_cursor;
          NodeId next = p.route[p.route_cursor];
          std::uint64_t req = p.request;
          e.send(here, next, std::move(p), req_of(req));
        } else {
          e.request_returned(p.request);
        }
        break;
      }
      case ResultStatus::Returned:
        break;  // not used by this strategy
    }
  }
};

}  // namespace

namespace baselines {

std::vector<sim::GossipCandidate> gossip_rank(
    const std::vector<GossipResponsePayload>& responses) {
  std::vector<sim::GossipCandidate> out;
  out.reserve(responses.size());
  for (const auto& r : responses) {
    sim::GossipCandidate c;
    c.target = r.responder;
    c.hops = static_cast<int>(r.route.size());
    // Full forward sequence: origin first, responder last.
    c.route.assign(r.route.rbegin(), r.route.rend());
    c.route.push_back(r.responder);
    DeviceSpec spec;
    spec.c_comm = r.c_comm;
    spec.c_comp = r.c_comp;
    spec.c_storage = r.c_storage;
    const double q_l = aco::queue_quality(r.queue_occupation, r.queue_limit);
    c.score = aco::quality_pheromones(q_l, spec) * (1.0 / static_cast<double>(c.hops));
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.target < b.target;
  });
  return out;
}

}  // namespace baselines

namespace sim {

std::unique_ptr<Strategy> make_strategy(const std::string& name) {
  if (name == "random") return std::make_unique<RandomStrategy>();
  if (name == "aco") return std::make_unique<AcoStrategy>();
  if (name == "gossips") return std::make_unique<GossipStrategy>();
  throw ConfigError("unknown strategy '" + name + "'");
}

}  // namespace sim

}  // namespace swarmsim
