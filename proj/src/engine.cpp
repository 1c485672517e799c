#include "swarmsim/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace swarmsim::sim {

namespace {

std::vector<std::pair<NodeId, NodeId>> parse_topology_edges(const std::string& text, int n) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ';')) {
    if (item.empty()) continue;
    auto dash = item.find('-');
    if (dash == std::string::npos) throw ConfigError("topology: expected 'a-b' pairs");
    int a = 0, b = 0;
    try {
      a = std::stoi(item.substr(0, dash));
      b = std::stoi(item.substr(dash + 1));
    } catch (const std::exception&) {
      throw ConfigError("topology: bad edge '" + item + "'");
    }
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) {
      throw ConfigError("topology: edge '" + item + "' out of range");
    }
    edges.emplace_back(a, b);
  }
  return edges;
}

// Deterministic device-type assignment: largest-remainder allocation of the
// mix weights over n slots, then a seeded shuffle so types do not correlate
// with node ids.
std::vector<int> allocate_types(const std::array<double, 10>& weights, int n, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  std::vector<int> counts(10, 0);
  std::vector<std::pair<double, int>> remainders;
  int assigned = 0;
  for (int i = 0; i < 10; ++i) {
    double exact = n * weights[i] / total;
    counts[i] = static_cast<int>(exact);
    assigned += counts[i];
    remainders.emplace_back(-(exact - counts[i]), i);
  }
  std::sort(remainders.begin(), remainders.end());
  for (int k = 0; assigned < n; ++k) {
    ++counts[remainders[k % remainders.size()].second];
    ++assigned;
  }
  std::vector<int> slots;
  slots.reserve(n);
  for (int i = 0; i < 10; ++i) {
    for (int c = 0; c < counts[i]; ++c) slots.push_back(i);
  }
  rng.shuffle(slots);
  return slots;
}

}  // namespace

Engine::Engine(const ScenarioConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
  auto errors = cfg_.validate();
  if (!errors.empty()) {
    std::string joined;
    for (const auto& e : errors) {
      if (!joined.empty()) joined += "; ";
      joined += e;
    }
    throw ConfigError(joined);
  }
  emit_weights_.resize(kTaskTypeCount, 0.0);
  for (int i = 0; i < kTaskTypeCount; ++i) {
    if (cfg_.emit_interval_s[i] > 0.0) {
      emit_weights_[i] = 1.0 / cfg_.emit_interval_s[i];
      emit_rate_total_ += emit_weights_[i];
    }
  }
}

Engine::~Engine() = default;

void Engine::push_event(Ev ev) {
  ev.seq = seq_counter_++;
  queue_.push(std::move(ev));
}

void Engine::setup() {
  const int n = cfg_.node_count;
  std::vector<int> type_of = allocate_types(cfg_.mix_weights, n, rng_);
  nodes_.resize(n);
  std::vector<int> max_conn(n, cfg_.max_connections);
  for (NodeId i = 0; i < n; ++i) {
    NodeRuntime& nr = nodes_[i];
    nr.profile.node_id = i;
    nr.profile.spec = catalog()[type_of[i]];
    if (cfg_.queue_capacity > 0) nr.profile.spec.queue_limit = cfg_.queue_capacity;
    nr.profile.listen_address = "sim://" + node_name(i);
    nr.profile.max_connections = cfg_.max_connections;
    nr.queue = QueueState(nr.profile.spec.queue_limit);
  }
  graph_ = topo::SwarmGraph(n, max_conn);
  strategy_ = make_strategy(cfg_.strategy);

  if (!cfg_.topology.empty()) {
    for (auto [a, b] : parse_topology_edges(cfg_.topology, n)) {
      auto out = handshake_with_hooks(a, b);
      if (out != topo::HandshakeOutcome::Accepted) {
        throw ConfigError("topology: edge " + std::to_string(a) + "-" + std::to_string(b) +
                          " rejected (" + topo::to_string(out) + ")");
      }
    }
  } else {
    topo::SwarmGraph plan(n, max_conn);
    topo::build_initial_topology(plan, cfg_.target_degree, rng_);
    for (NodeId a = 0; a < n; ++a) {
      for (NodeId b : plan.neighbors(a)) {
        if (a < b) handshake_with_hooks(a, b);
      }
    }
  }
}

void Engine::apply_fixture_ops() {
  for (const Prefill& p : prefills_) {
    for (int i = 0; i < p.count; ++i) {
      Task t = make_task(p.node, p.type);
      enqueue_task(p.node, t);
    }
  }
  for (const Injection& inj : injections_) {
    Ev ev;
    ev.at = inj.at_ms;
    ev.kind = EvKind::Timer;
    ev.tag = TimerTag::InjectRequest;
    ev.node = inj.origin;
    ev.epoch = nodes_[inj.origin].epoch;
    ev.b = static_cast<std::uint64_t>(inj.type);
    push_event(std::move(ev));
  }
}

void Engine::schedule_recurring() {
  const std::int64_t duration = cfg_.duration_ms();

  // End goes in first: at equal timestamps it outranks everything, so the
  // run never observes events on the closing boundary.
  push_event({duration, 0, EvKind::End, kNoNode, 0, 0, 0, {}, nullptr});
  push_event({0, 0, EvKind::MetricsSample, kNoNode, 0, 0, 0, {}, nullptr});

  if (cfg_.emitters_enabled && emit_rate_total_ > 0.0) {
    for (NodeId i = 0; i < node_count(); ++i) {
      push_event({next_emit_at(), 0, EvKind::Emit, i, 0, 0, 0, {}, nullptr});
    }
  }
  if (strategy_->wants_evaporation()) {
    const auto interval =
        static_cast<std::int64_t>(cfg_.evaporation_interval_s * 1000.0);
    for (NodeId i = 0; i < node_count(); ++i) {
      std::int64_t jitter = static_cast<std::int64_t>(
          (static_cast<std::uint64_t>(i) * 2654435761ull) % static_cast<std::uint64_t>(interval));
      push_event({jitter, 0, EvKind::Evaporate, i, 0, 0, 0, {}, nullptr});
    }
  }
  if (cfg_.sa_enabled) {
    const auto interval = static_cast<std::int64_t>(cfg_.sa_interval_s * 1000.0);
    for (NodeId i = 0; i < node_count(); ++i) {
      std::int64_t jitter = static_cast<std::int64_t>(
          (static_cast<std::uint64_t>(i) * 40503ull + 2654435761ull) %
          static_cast<std::uint64_t>(interval));
      push_event({jitter, 0, EvKind::SATick, i, 0, 0, 0, {}, nullptr});
    }
  }
  if (cfg_.environment == "dynamic") {
    push_event({static_cast<std::int64_t>(cfg_.fail_tick_s * 1000.0), 0, EvKind::FailTick,
                kNoNode, 0, 0, 0, {}, nullptr});
    push_event({static_cast<std::int64_t>(cfg_.recover_tick_s * 1000.0), 0,
                EvKind::RecoverTick, kNoNode, 0, 0, 0, {}, nullptr});
  }
  if (cfg_.topology_snapshot_interval_s > 0.0) snapshot_topology();
}

RunResult Engine::run() {
  if (ran_) throw std::logic_error("Engine::run may only be called once");
  ran_ = true;

  setup();
  schedule_recurring();
  apply_fixture_ops();

  while (!queue_.empty()) {
    Ev ev = queue_.top();
    queue_.pop();
    assert(ev.at >= clock_);
    clock_ = ev.at;
    if (ev.kind == EvKind::End) break;
    dispatch(ev);
  }

  RunResult out;
  finalize(out);
  return out;
}

void Engine::dispatch(const Ev& ev) {
  switch (ev.kind) {
    case EvKind::Deliver: handle_deliver(ev); break;
    case EvKind::Emit: handle_emit(ev); break;
    case EvKind::ProcessDone: handle_process_done(ev); break;
    case EvKind::Evaporate: {
      const auto interval =
          static_cast<std::int64_t>(cfg_.evaporation_interval_s * 1000.0);
      if (clock_ + interval < cfg_.duration_ms()) {
        push_event({clock_ + interval, 0, EvKind::Evaporate, ev.node, 0, 0, 0, {}, nullptr});
      }
      if (nodes_[ev.node].alive) strategy_->on_evaporate(*this, ev.node);
      break;
    }
    case EvKind::SATick: handle_sa_tick(ev); break;
    case EvKind::FailTick: handle_fail_tick(); break;
    case EvKind::RecoverTick: handle_recover_tick(); break;
    case EvKind::MetricsSample: handle_metrics_sample(); break;
    case EvKind::Timer: handle_timer(ev); break;
    case EvKind::End: break;
  }
}

// --- emission and queue service ----------------------------------------

TaskType Engine::draw_task_type() {
  return static_cast<TaskType>(rng_.weighted_index(emit_weights_));
}

std::int64_t Engine::next_emit_at() {
  double gap_s = rng_.exponential(1.0 / emit_rate_total_);
  auto ms = static_cast<std::int64_t>(gap_s * 1000.0);
  return clock_ + std::max<std::int64_t>(1, ms);
}

Task Engine::make_task(NodeId origin, TaskType type) {
  Task t;
  t.task_id = ++task_counter_;
  t.type = type;
  t.origin = origin;
  t.emitted_at_ms = clock_;
  t.ttl_ms = cfg_.ttl_ms();
  t.base_processing_ms = static_cast<std::int64_t>(
      cfg_.base_time_s[static_cast<std::size_t>(type)] * 1000.0);
  ++stats_.tasks_emitted;
  task_fates_[t.task_id] = TaskFate::Live;
  return t;
}

void Engine::handle_emit(const Ev& ev) {
  if (nodes_[ev.node].alive) emit_one(ev.node);
  const std::int64_t next = next_emit_at();
  if (next < cfg_.duration_ms()) {
    push_event({next, 0, EvKind::Emit, ev.node, 0, 0, 0, {}, nullptr});
  }
}

void Engine::emit_one(NodeId id) {
  NodeRuntime& n = nodes_[id];
  Task t = make_task(id, draw_task_type());
  if (n.queue.has_headroom()) {
    enqueue_task(id, t);
  } else {
    // Overloaded: the task becomes an offload request in the strategy's
    // hands instead of joining the local queue.
    create_request(t);
  }
}

std::uint64_t Engine::create_request(const Task& task) {
  const std::uint64_t req = ++req_counter_;
  requests_[req] = {task.origin, task.type, clock_, RequestPhase::Searching, false};
  ledger_.offload_requested(clock_, static_cast<std::int64_t>(req), task.origin);
  ++stats_.requests;
  strategy_->on_request(*this, req, task);
  return req;
}

std::int64_t Engine::processing_ms(const NodeRuntime& n, const Task& t) const {
  double eff = static_cast<double>(t.base_processing_ms) * capacity_factor(n.profile.spec);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(eff)));
}

void Engine::maybe_start_service(NodeId id) {
  NodeRuntime& n = nodes_[id];
  if (!n.alive || n.serving || n.queue.empty()) return;
  n.serving = true;
  const Task& head = n.queue.front();
  n.serving_task = head.task_id;
  Ev ev;
  ev.at = clock_ + processing_ms(n, head);
  ev.kind = EvKind::ProcessDone;
  ev.node = id;
  ev.epoch = n.epoch;
  ev.a = head.task_id;
  push_event(std::move(ev));
}

void Engine::handle_process_done(const Ev& ev) {
  NodeRuntime& n = nodes_[ev.node];
  if (!n.alive || n.epoch != ev.epoch) return;  // perished with the node
  assert(n.serving && n.serving_task == ev.a && !n.queue.empty());
  Task t = n.queue.pop_front();
  n.serving = false;
  assert(t.task_id == ev.a);

  auto off = offloaded_.find(t.task_id);
  if (off != offloaded_.end()) {
    AcceptedOffload info = off->second;
    offloaded_.erase(off);
    if (ev.node == t.origin) {
      // A wandering request can settle back on a drained origin; the result
      // is already home.
      finish_task(t.task_id, TaskFate::DoneLocal);
      request_returned(info.request);
    } else {
      finish_task(t.task_id, TaskFate::DoneRemote);
      strategy_->on_offloaded_task_done(*this, ev.node, t, info);
    }
  } else {
    finish_task(t.task_id, TaskFate::DoneLocal);
  }
  maybe_start_service(ev.node);
}

void Engine::finish_task(std::uint64_t task_id, TaskFate fate) {
  auto it = task_fates_.find(task_id);
  if (it == task_fates_.end() || it->second != TaskFate::Live) return;
  it->second = fate;
  switch (fate) {
    case TaskFate::DoneLocal: ++stats_.done_local; break;
    case TaskFate::DoneRemote: ++stats_.done_remote; break;
    case TaskFate::Lost: ++stats_.tasks_lost; break;
    case TaskFate::Live: break;
  }
}

void Engine::task_lost(std::uint64_t task_id) { finish_task(task_id, TaskFate::Lost); }

void Engine::enqueue_task(NodeId id, const Task& task) {
  nodes_[id].queue.push(task);
  maybe_start_service(id);
}

void Engine::accept_offload(NodeId id, const Task& task, AcceptedOffload info) {
  request_found(info.request, info.hops);
  offloaded_[task.task_id] = std::move(info);
  enqueue_task(id, task);
}

// --- request bookkeeping ------------------------------------------------

void Engine::request_found(std::uint64_t req, int hops) {
  auto it = requests_.find(req);
  if (it == requests_.end() || it->second.phase != RequestPhase::Searching) return;
  it->second.phase = RequestPhase::Found;
  ++stats_.hits;
  ledger_.target_found(clock_, static_cast<std::int64_t>(req), hops);
}

void Engine::request_lost(std::uint64_t req) {
  auto it = requests_.find(req);
  if (it == requests_.end() || it->second.phase != RequestPhase::Searching) return;
  it->second.phase = RequestPhase::Lost;
  ++stats_.misses;
  ledger_.request_lost(clock_, static_cast<std::int64_t>(req));
}

void Engine::request_returned(std::uint64_t req) {
  auto it = requests_.find(req);
  if (it == requests_.end() || it->second.phase != RequestPhase::Found ||
      it->second.returned) {
    return;
  }
  it->second.returned = true;
  ++stats_.returned;
  ledger_.result_returned(clock_, static_cast<std::int64_t>(req));
}

// --- messaging ----------------------------------------------------------

void Engine::send(NodeId from, NodeId to, Payload payload, std::int64_t attributed_request,
                  bool control) {
  assert(nodes_[from].alive);  // dead nodes neither send nor receive
  auto env = std::make_shared<MessageEnvelope>();
  env->msg_id = ++msg_counter_;
  env->sender = from;
  env->receiver = to;
  env->sent_at_ms = clock_;
  env->payload = std::move(payload);
  if (!control) {
    ++stats_.strategy_messages;
    ledger_.message_sent(clock_, attributed_request);
  } else {
    ++stats_.control_messages;
    if (cfg_.count_control_messages) ledger_.message_sent(clock_, -1);
  }
  if (sink_) sink_(*env);
  Ev ev;
  ev.at = clock_ + cfg_.latency_ms;
  ev.kind = EvKind::Deliver;
  ev.node = to;
  ev.msg = std::move(env);
  push_event(std::move(ev));
}

void Engine::handle_deliver(const Ev& ev) {
  const MessageEnvelope& env = *ev.msg;
  NodeRuntime& recv = nodes_[env.receiver];
  if (!recv.alive) {
    ++stats_.dropped_dead;
    // Task custody dies with the carrier when the recipient is gone.
    switch (env.kind()) {
      case MsgKind::ForwardAnt: {
        const auto& p = std::get<ForwardAntPayload>(env.payload);
        task_lost(p.task.task_id);
        request_lost(p.request);
        break;
      }
      case MsgKind::Offload: {
        const auto& p = std::get<OffloadPayload>(env.payload);
        if (p.route.empty()) {  // random walk carries custody with the hop
          task_lost(p.task.task_id);
          request_lost(p.request);
        }
        break;
      }
      case MsgKind::Result: {
        const auto& p = std::get<ResultPayload>(env.payload);
        if (p.task) task_lost(p.task->task_id);
        break;
      }
      default: break;
    }
    return;
  }
  switch (env.kind()) {
    case MsgKind::SANotice:
      recv.sa_suppressed.insert(env.sender);
      break;
    case MsgKind::Disconnect:
    case MsgKind::Handshake:
      break;  // state already applied when the link changed
    default:
      strategy_->on_message(*this, env);
      break;
  }
}

void Engine::schedule_timer(std::int64_t at_ms, NodeId node, std::uint64_t req,
                            std::uint64_t aux, TimerTag tag) {
  Ev ev;
  ev.at = at_ms;
  ev.kind = EvKind::Timer;
  ev.node = node;
  ev.epoch = nodes_[node].epoch;
  ev.a = req;
  ev.b = aux;
  ev.tag = tag;
  push_event(std::move(ev));
}

void Engine::handle_timer(const Ev& ev) {
  NodeRuntime& n = nodes_[ev.node];
  if (!n.alive || n.epoch != ev.epoch) return;
  switch (ev.tag) {
    case TimerTag::SaPhase2:
      sa_phase2(ev.node, static_cast<NodeId>(ev.b));
      break;
    case TimerTag::InjectRequest: {
      Task t = make_task(ev.node, static_cast<TaskType>(ev.b));
      create_request(t);
      break;
    }
    default:
      strategy_->on_timer(*this, ev.node, ev.a, ev.b, ev.tag);
      break;
  }
}

// --- sampling -----------------------------------------------------------

void Engine::handle_metrics_sample() {
  for (NodeId i = 0; i < node_count(); ++i) {
    if (!nodes_[i].alive) continue;
    ledger_.queue_sample(clock_, i, nodes_[i].queue.occupation());
    nodes_[i].queue.record_sample();
  }
  const auto interval = static_cast<std::int64_t>(cfg_.metrics_sample_interval_s * 1000.0);
  if (clock_ + interval < cfg_.duration_ms()) {
    push_event({clock_ + interval, 0, EvKind::MetricsSample, kNoNode, 0, 0, 0, {}, nullptr});
  }
  if (cfg_.topology_snapshot_interval_s > 0.0) {
    const auto snap =
        static_cast<std::int64_t>(cfg_.topology_snapshot_interval_s * 1000.0);
    if (!snapshots_.empty() && clock_ - snapshots_.back().first >= snap) snapshot_topology();
  }
}

void Engine::snapshot_topology() {
  snapshots_.emplace_back(clock_, graph_.edge_list_text());
}

// --- failure model --------------------------------------------------------

void Engine::handle_fail_tick() {
  const auto interval = static_cast<std::int64_t>(cfg_.fail_tick_s * 1000.0);
  if (clock_ + interval < cfg_.duration_ms()) {
    push_event({clock_ + interval, 0, EvKind::FailTick, kNoNode, 0, 0, 0, {}, nullptr});
  }
  for (NodeId i = 0; i < node_count(); ++i) {
    if (nodes_[i].alive && rng_.bernoulli(nodes_[i].profile.spec.p_fail)) kill_node(i);
  }
}

void Engine::handle_recover_tick() {
  const auto interval = static_cast<std::int64_t>(cfg_.recover_tick_s * 1000.0);
  if (clock_ + interval < cfg_.duration_ms()) {
    push_event({clock_ + interval, 0, EvKind::RecoverTick, kNoNode, 0, 0, 0, {}, nullptr});
  }
  for (NodeId i = 0; i < node_count(); ++i) {
    if (!nodes_[i].alive && rng_.bernoulli(nodes_[i].profile.spec.p_recover)) revive_node(i);
  }
}

void Engine::kill_node(NodeId id) {
  NodeRuntime& n = nodes_[id];
  n.alive = false;
  ++n.epoch;
  ++stats_.failures;

  for (const Task& t : n.queue.entries()) {
    finish_task(t.task_id, TaskFate::Lost);
    offloaded_.erase(t.task_id);
  }
  n.queue.clear();
  n.serving = false;

  for (NodeId nb : graph_.isolate(id)) {
    nodes_[nb].neighbor_profiles.erase(id);
    nodes_[nb].sa_suppressed.erase(id);
    if (nodes_[nb].sa_pending_peer == id) nodes_[nb].sa_pending_peer = kNoNode;
    strategy_->on_disconnected(*this, nb, id);
  }
  n.neighbor_profiles.clear();
  n.sa_suppressed.clear();
  n.sa_pending_peer = kNoNode;
  strategy_->on_node_cleared(*this, id);

  // Requests this node originated can no longer conclude.
  for (auto& [req, state] : requests_) {
    if (state.origin == id && state.phase == RequestPhase::Searching) {
      state.phase = RequestPhase::Lost;
      ++stats_.misses;
      ledger_.request_lost(clock_, static_cast<std::int64_t>(req));
    }
  }
}

void Engine::revive_node(NodeId id) {
  NodeRuntime& n = nodes_[id];
  n.alive = true;
  ++n.epoch;
  ++stats_.recoveries;
  n.queue = QueueState(n.profile.spec.queue_limit);
  n.serving = false;
  rewire(id);  // fresh handshakes reinitialize strategy state
}

// --- topology maintenance -------------------------------------------------

topo::HandshakeOutcome Engine::handshake_with_hooks(NodeId a, NodeId b) {
  auto out = graph_.handshake(a, b, clock_);
  if (out != topo::HandshakeOutcome::Accepted) return out;
  ++stats_.handshakes;
  nodes_[a].neighbor_profiles[b] = nodes_[b].profile;
  nodes_[b].neighbor_profiles[a] = nodes_[a].profile;
  strategy_->on_connected(*this, a, b);
  strategy_->on_connected(*this, b, a);
  log_handshake_pair(a, b);
  return out;
}

void Engine::log_handshake_pair(NodeId a, NodeId b) {
  for (auto [from, to] : {std::pair{a, b}, std::pair{b, a}}) {
    MessageEnvelope env;
    env.msg_id = ++msg_counter_;
    env.sender = from;
    env.receiver = to;
    env.sent_at_ms = clock_;
    env.payload = HandshakePayload{nodes_[from].profile};
    ++stats_.control_messages;
    if (cfg_.count_control_messages) ledger_.message_sent(clock_, -1);
    if (sink_) sink_(env);
  }
}

void Engine::drop_edge_state(NodeId a, NodeId b) {
  graph_.remove_edge(a, b);
  for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
    nodes_[x].neighbor_profiles.erase(y);
    nodes_[x].sa_suppressed.erase(y);
    strategy_->on_disconnected(*this, x, y);
  }
}

void Engine::rewire(NodeId id) {
  NodeRuntime& n = nodes_[id];
  if (!n.alive) return;
  int guard = 4 * node_count();
  while (graph_.degree(id) < cfg_.target_degree && guard-- > 0) {
    std::vector<NodeId> candidates;
    for (NodeId c = 0; c < node_count(); ++c) {
      if (c == id || !nodes_[c].alive) continue;
      if (graph_.has_edge(id, c)) continue;
      if (graph_.blocked(id, c, clock_) || graph_.blocked(c, id, clock_)) continue;
      if (graph_.degree(c) >= graph_.max_connections(c)) continue;
      candidates.push_back(c);
    }
    if (candidates.empty()) return;
    NodeId pick = candidates[rng_.uniform_index(candidates.size())];
    handshake_with_hooks(id, pick);
  }
}

void Engine::handle_sa_tick(const Ev& ev) {
  const auto interval = static_cast<std::int64_t>(cfg_.sa_interval_s * 1000.0);
  if (clock_ + interval < cfg_.duration_ms()) {
    push_event({clock_ + interval, 0, EvKind::SATick, ev.node, 0, 0, 0, {}, nullptr});
  }
  NodeRuntime& n = nodes_[ev.node];
  if (!n.alive || n.sa_pending_peer != kNoNode) return;
  if (graph_.degree(ev.node) <= cfg_.min_connections) return;
  auto view = strategy_->attractiveness(*this, ev.node);
  if (!view) return;
  auto weakest = topo::weakest_links(*view, 1);
  if (weakest.empty()) return;
  const NodeId peer = weakest.front();
  // Phase 1: the peer is told to stop offloading here before the link drops.
  send(ev.node, peer, SANoticePayload{}, -1, /*control=*/true);
  ++stats_.sa_notices;
  n.sa_pending_peer = peer;
  schedule_timer(clock_ + static_cast<std::int64_t>(cfg_.sa_notice_grace_s * 1000.0),
                 ev.node, 0, static_cast<std::uint64_t>(peer), TimerTag::SaPhase2);
}

void Engine::sa_phase2(NodeId id, NodeId peer) {
  NodeRuntime& n = nodes_[id];
  n.sa_pending_peer = kNoNode;
  if (!graph_.has_edge(id, peer)) return;  // peer failed in the meantime
  send(id, peer, DisconnectPayload{}, -1, /*control=*/true);
  drop_edge_state(id, peer);
  const auto until =
      clock_ + static_cast<std::int64_t>(cfg_.sa_block_duration_s * 1000.0);
  graph_.block(id, peer, until);
  graph_.block(peer, id, until);
  ++stats_.sa_disconnects;
  // Both ends search for replacements; the block keeps them apart.
  rewire(id);
  rewire(peer);
}

// --- fixtures, queries, finalization ---------------------------------------

void Engine::prefill_queue(NodeId id, TaskType type, int count) {
  prefills_.push_back({id, type, count});
}

void Engine::inject_request(NodeId origin, TaskType type, std::int64_t at_ms) {
  injections_.push_back({origin, type, at_ms});
}

void Engine::set_message_sink(std::function<void(const MessageEnvelope&)> sink) {
  sink_ = std::move(sink);
}

std::vector<NodeId> Engine::strategy_candidates(NodeId id) const {
  std::vector<NodeId> out;
  const NodeRuntime& n = nodes_[id];
  for (NodeId nb : graph_.neighbors(id)) {
    if (n.sa_suppressed.count(nb) == 0) out.push_back(nb);
  }
  return out;
}

bool Engine::accepts(NodeId id, TaskType t) const {
  const NodeRuntime& n = nodes_[id];
  return n.alive && supports(n.profile.spec, t) && n.queue.has_headroom();
}

std::vector<std::tuple<NodeId, TaskType, double>> Engine::pheromone_rows(NodeId id) const {
  return nodes_[id].pheromones.rows();
}

void Engine::finalize(RunResult& out) {
  for (const auto& [id, fate] : task_fates_) {
    if (fate == TaskFate::Live) ++stats_.live_end;
  }
  for (const auto& [req, state] : requests_) {
    if (state.phase == RequestPhase::Searching) ++stats_.unresolved_end;
  }
  out.summary = metrics::compute_summary(ledger_);
  out.stats = stats_;
  out.topology_snapshots = snapshots_;
}

}  // namespace swarmsim::sim
