#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "swarmsim/aco.hpp"
#include "swarmsim/config.hpp"
#include "swarmsim/message.hpp"
#include "swarmsim/metrics.hpp"
#include "swarmsim/rng.hpp"
#include "swarmsim/topology.hpp"
#include "swarmsim/types.hpp"

namespace swarmsim::sim {

enum class TimerTag : std::uint8_t { GossipDeadline, GossipAttempt, SaPhase2, InjectRequest };

enum class RequestPhase : std::uint8_t { Searching, Found, Lost };

struct RequestState {
  NodeId origin = kNoNode;
  TaskType type = TaskType::T1;
  std::int64_t created_ms = 0;
  RequestPhase phase = RequestPhase::Searching;
  bool returned = false;
};

enum class TaskFate : std::uint8_t { Live, DoneLocal, DoneRemote, Lost };

struct GossipCandidate {
  NodeId target = kNoNode;
  std::vector<NodeId> route;  // full node sequence, origin first, target last
  int hops = 0;
  double score = 0.0;
};

/// Origin-side bookkeeping for one gossip offload request: collected
/// responses during discovery, then the ranked targets being attempted.
struct GossipPending {
  Task task;
  std::int64_t discovery_deadline_ms = 0;
  std::int64_t ttl_deadline_ms = 0;
  std::vector<GossipResponsePayload> responses;
  std::vector<GossipCandidate> ranked;
  std::size_t next_candidate = 0;
  std::uint64_t attempt_seq = 0;
  bool offloading = false;
};

/// Context pinned to a task when a node accepts it from elsewhere; consumed
/// at completion to route the result (and, for ants, the pheromone trail).
struct AcceptedOffload {
  std::uint64_t request = 0;
  double quality = 0.0;        // Q computed at acceptance (ant strategy)
  std::vector<NodeId> path;    // forward path / offload route, origin first
  int hops = 0;
};

struct NodeRuntime {
  NodeProfile profile;
  bool alive = true;
  int epoch = 0;  // bumped on every failure and recovery; stales old events
  QueueState queue;
  bool serving = false;
  std::uint64_t serving_task = 0;

  std::map<NodeId, NodeProfile> neighbor_profiles;  // node-discovery snapshots
  std::set<NodeId> sa_suppressed;  // peers whose SA notice we received
  NodeId sa_pending_peer = kNoNode;

  aco::PheromoneTable pheromones;

  std::map<std::uint64_t, std::int64_t> gossip_seen;  // gossip id -> expiry
  std::map<NodeId, std::array<std::int64_t, kTaskTypeCount>> gossip_traffic;
  std::map<std::uint64_t, GossipPending> gossip_pending;
};

struct EngineStats {
  std::int64_t tasks_emitted = 0;
  std::int64_t done_local = 0;
  std::int64_t done_remote = 0;
  std::int64_t tasks_lost = 0;
  std::int64_t live_end = 0;
  std::int64_t requests = 0;
  std::int64_t hits = 0;
  std::int64_t misses = 0;
  std::int64_t returned = 0;
  std::int64_t unresolved_end = 0;
  std::int64_t strategy_messages = 0;
  std::int64_t control_messages = 0;
  std::int64_t dropped_dead = 0;
  std::int64_t forward_ants = 0;
  std::int64_t backward_ants = 0;
  std::int64_t gossip_dup_drops = 0;
  std::int64_t handshakes = 0;
  std::int64_t sa_notices = 0;
  std::int64_t sa_disconnects = 0;
  std::int64_t failures = 0;
  std::int64_t recoveries = 0;
};

struct RunResult {
  metrics::Summary summary;
  EngineStats stats;
  std::vector<std::pair<std::int64_t, std::string>> topology_snapshots;
};

class Engine;

/// Coordination strategy plugged into the engine. One instance drives every
/// node; per-node state lives in NodeRuntime and messages are the only
/// channel between nodes.
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual const char* name() const = 0;
  virtual bool wants_evaporation() const { return false; }

  /// A node just went overloaded and hands over a task to place.
  virtual void on_request(Engine& e, std::uint64_t req, const Task& task) = 0;
  virtual void on_message(Engine& e, const MessageEnvelope& env) = 0;
  /// An offloaded task finished on `node`; return the result to its origin.
  virtual void on_offloaded_task_done(Engine& e, NodeId node, const Task& task,
                                      const AcceptedOffload& info) = 0;

  virtual void on_connected(Engine&, NodeId, NodeId) {}
  virtual void on_disconnected(Engine&, NodeId, NodeId) {}
  virtual void on_evaporate(Engine&, NodeId) {}
  virtual void on_timer(Engine&, NodeId, std::uint64_t, std::uint64_t, TimerTag) {}
  /// Node failed: drop whatever volatile state the strategy keeps there.
  virtual void on_node_cleared(Engine&, NodeId) {}
  /// Link scores for self-actualization; nullopt opts the strategy out.
  virtual std::optional<topo::AttractivenessView> attractiveness(Engine&, NodeId) {
    return std::nullopt;
  }
};

std::unique_ptr<Strategy> make_strategy(const std::string& name);

/// Deterministic discrete-event simulator. Events execute in (time, seq)
/// order off a single queue; identical config and seed give identical
/// ledgers byte for byte.
class Engine {
 public:
  explicit Engine(const ScenarioConfig& cfg);  // throws ConfigError
  ~Engine();

  RunResult run();

  // --- observation ---
  std::int64_t now_ms() const { return clock_; }
  const ScenarioConfig& cfg() const { return cfg_; }
  Rng& rng() { return rng_; }
  const topo::SwarmGraph& graph() const { return graph_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  NodeRuntime& node(NodeId id) { return nodes_[id]; }
  const NodeRuntime& node(NodeId id) const { return nodes_[id]; }
  EngineStats& stats() { return stats_; }
  const metrics::Ledger& ledger() const { return ledger_; }
  const std::map<std::uint64_t, RequestState>& requests() const { return requests_; }

  /// Neighbors this node may contact for offloading: current links minus
  /// peers that announced their disconnect. Ascending order.
  std::vector<NodeId> strategy_candidates(NodeId id) const;

  /// True when the node can take the task right now: alive, supports the
  /// type, and instantaneous occupation below the limit.
  bool accepts(NodeId id, TaskType t) const;

  // --- actions (strategy side) ---
  void send(NodeId from, NodeId to, Payload payload, std::int64_t attributed_request,
            bool control = false);
  void schedule_timer(std::int64_t at_ms, NodeId node, std::uint64_t req, std::uint64_t aux,
                      TimerTag tag);

  void request_found(std::uint64_t req, int hops);
  void request_lost(std::uint64_t req);
  void request_returned(std::uint64_t req);

  /// Books the task into the node's queue with offload context; records the
  /// hit and starts service if idle.
  void accept_offload(NodeId id, const Task& task, AcceptedOffload info);

  /// Unconditional enqueue (local emission underload, or a task coming back
  /// unplaced; occupation may exceed the limit).
  void enqueue_task(NodeId id, const Task& task);

  void task_lost(std::uint64_t task_id);

  // --- scripting hooks for fixtures and the acceptance suite ---
  void prefill_queue(NodeId id, TaskType type, int count);
  void inject_request(NodeId origin, TaskType type, std::int64_t at_ms);
  void set_message_sink(std::function<void(const MessageEnvelope&)> sink);

  /// Pheromone rows of a node, for CSV dumps after a run.
  std::vector<std::tuple<NodeId, TaskType, double>> pheromone_rows(NodeId id) const;

 private:
  enum class EvKind : std::uint8_t {
    Deliver, Emit, ProcessDone, Evaporate, SATick, FailTick, RecoverTick,
    MetricsSample, Timer, End,
  };

  struct Ev {
    std::int64_t at = 0;
    std::uint64_t seq = 0;
    EvKind kind{};
    NodeId node = kNoNode;
    int epoch = 0;
    std::uint64_t a = 0;  // task id / request id
    std::uint64_t b = 0;  // aux
    TimerTag tag{};
    std::shared_ptr<MessageEnvelope> msg;
  };
  struct EvLater {
    bool operator()(const Ev& x, const Ev& y) const {
      return x.at != y.at ? x.at > y.at : x.seq > y.seq;
    }
  };

  void push_event(Ev ev);
  void setup();
  void apply_fixture_ops();
  void schedule_recurring();
  void dispatch(const Ev& ev);
  void finalize(RunResult& out);

  // handlers
  void handle_deliver(const Ev& ev);
  void handle_emit(const Ev& ev);
  void handle_process_done(const Ev& ev);
  void handle_metrics_sample();
  void handle_fail_tick();
  void handle_recover_tick();
  void handle_sa_tick(const Ev& ev);
  void handle_timer(const Ev& ev);

  // lifecycle helpers
  std::uint64_t create_request(const Task& task);
  Task make_task(NodeId origin, TaskType type);
  void emit_one(NodeId id);
  void maybe_start_service(NodeId id);
  std::int64_t processing_ms(const NodeRuntime& n, const Task& t) const;
  void finish_task(std::uint64_t task_id, TaskFate fate);
  void kill_node(NodeId id);
  void revive_node(NodeId id);
  void drop_edge_state(NodeId a, NodeId b);
  topo::HandshakeOutcome handshake_with_hooks(NodeId a, NodeId b);
  void rewire(NodeId id);
  void sa_phase2(NodeId id, NodeId peer);
  void log_handshake_pair(NodeId a, NodeId b);
  void snapshot_topology();
  TaskType draw_task_type();
  std::int64_t next_emit_at();

  ScenarioConfig cfg_;
  Rng rng_;
  topo::SwarmGraph graph_;
  std::vector<NodeRuntime> nodes_;
  std::unique_ptr<Strategy> strategy_;
  metrics::Ledger ledger_;
  EngineStats stats_;

  std::priority_queue<Ev, std::vector<Ev>, EvLater> queue_;
  std::int64_t clock_ = 0;
  std::uint64_t seq_counter_ = 0;
  std::uint64_t msg_counter_ = 0;
  std::uint64_t task_counter_ = 0;
  std::uint64_t req_counter_ = 0;

  std::map<std::uint64_t, RequestState> requests_;
  std::map<std::uint64_t, TaskFate> task_fates_;
  std::map<std::uint64_t, AcceptedOffload> offloaded_;

  std::vector<double> emit_weights_;
  double emit_rate_total_ = 0.0;  // combined tasks per second per node

  std::function<void(const MessageEnvelope&)> sink_;
  std::vector<std::pair<std::int64_t, std::string>> snapshots_;

  struct Prefill {
    NodeId node;
    TaskType type;
    int count;
  };
  struct Injection {
    NodeId origin;
    TaskType type;
    std::int64_t at_ms;
  };
  std::vector<Prefill> prefills_;
  std::vector<Injection> injections_;
  bool ran_ = false;
};

}  // namespace swarmsim::sim
