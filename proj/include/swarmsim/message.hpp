#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "swarmsim/types.hpp"

namespace swarmsim {

// One wire unit. Every coordination and control exchange in the swarm is an
// envelope; the log format is one JSON document per line with fields
// msg_id, kind, sender, receiver, sent_at_ms, payload.

enum class MsgKind : std::uint8_t {
  Handshake,
  ForwardAnt,
  BackwardAnt,
  GossipDiscovery,
  GossipResponse,
  Offload,
  Result,
  SANotice,
  Disconnect,
};

const char* to_string(MsgKind k);
std::optional<MsgKind> msg_kind_from_string(std::string_view s);

struct HandshakePayload {
  NodeProfile profile;  // sender's profile as exchanged during node discovery
};

/// Task-carrying search agent. The ant strategy walks it with the full
/// visited path; the random strategy uses the path tail only (last hop).
struct ForwardAntPayload {
  std::uint64_t request = 0;
  Task task;
  std::int64_t ttl_remaining_ms = 0;
  std::vector<NodeId> path;  // origin first, current holder last
  bool fallback_used = false;
};

struct BackwardAntPayload {
  std::uint64_t request = 0;
  std::uint64_t task_id = 0;
  TaskType type = TaskType::T1;
  double quality = 0.0;            // Q computed at acceptance
  std::vector<NodeId> path;        // the forward path, origin first
  std::int32_t cursor = 0;         // index of the node currently holding the ant
};

struct GossipDiscoveryPayload {
  std::uint64_t gossip_id = 0;  // equals the offload request id
  std::uint64_t request = 0;
  TaskType type = TaskType::T1;
  NodeId origin = kNoNode;
  std::vector<NodeId> path;  // visited nodes, origin first, sender last
  std::int64_t deadline_ms = 0;
};

struct GossipResponsePayload {
  std::uint64_t gossip_id = 0;
  std::uint64_t request = 0;
  TaskType type = TaskType::T1;
  NodeId responder = kNoNode;
  std::int32_t queue_occupation = 0;
  std::int32_t queue_limit = 0;
  std::int32_t c_comm = 0;
  std::int32_t c_comp = 0;
  std::int32_t c_storage = 0;
  std::vector<NodeId> route;   // hop sequence back to the origin, origin last
  std::int32_t route_cursor = 0;
};

/// Task hand-off. The gossip strategy routes it along a discovered path;
/// the random strategy hops it to one uniformly drawn neighbor at a time.
struct OffloadPayload {
  std::uint64_t request = 0;
  Task task;
  std::int64_t ttl_remaining_ms = 0;
  std::int32_t hops = 0;
  std::vector<NodeId> route;  // gossip only: next hops toward the target
  std::int32_t route_cursor = 0;
  NodeId via = kNoNode;  // random only: previous holder, damped from re-pick
};

enum class ResultStatus : std::uint8_t { Accepted, Rejected, Completed, Returned };
const char* to_string(ResultStatus s);
std::optional<ResultStatus> result_status_from_string(std::string_view s);

struct ResultPayload {
  std::uint64_t request = 0;
  std::uint64_t task_id = 0;
  ResultStatus status = ResultStatus::Completed;
  std::vector<NodeId> route;  // gossip completion path back to origin
  std::int32_t route_cursor = 0;
  std::optional<Task> task;  // present when the task itself travels back
};

struct SANoticePayload {};    // sender will drop this link; stop contacting it
struct DisconnectPayload {};  // link teardown notice

using Payload =
    std::variant<HandshakePayload, ForwardAntPayload, BackwardAntPayload,
                 GossipDiscoveryPayload, GossipResponsePayload, OffloadPayload,
                 ResultPayload, SANoticePayload, DisconnectPayload>;

MsgKind kind_of(const Payload& p);

struct MessageEnvelope {
  std::uint64_t msg_id = 0;
  NodeId sender = kNoNode;
  NodeId receiver = kNoNode;
  std::int64_t sent_at_ms = 0;
  Payload payload;

  MsgKind kind() const { return kind_of(payload); }
};

/// Wire encoding, one JSON document (no trailing newline).
std::string to_wire(const MessageEnvelope& env);

/// Parse a wire document; throws std::runtime_error on malformed input.
MessageEnvelope from_wire(const std::string& line);

}  // namespace swarmsim
