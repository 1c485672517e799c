#include "swarmsim/message.hpp"

#include <stdexcept>

#include "json.hpp"

namespace swarmsim {

using json = nlohmann::json;

const char* to_string(MsgKind k) {
  switch (k) {
    case MsgKind::Handshake: return "handshake";
    case MsgKind::ForwardAnt: return "forward_ant";
    case MsgKind::BackwardAnt: return "backward_ant";
    case MsgKind::GossipDiscovery: return "gossip_discovery";
    case MsgKind::GossipResponse: return "gossip_response";
    case MsgKind::Offload: return "offload";
    case MsgKind::Result: return "result";
    case MsgKind::SANotice: return "sa_notice";
    case MsgKind::Disconnect: return "disconnect";
  }
  return "?";
}

std::optional<MsgKind> msg_kind_from_string(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(MsgKind::Disconnect); ++i) {
    MsgKind k = static_cast<MsgKind>(i);
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

const char* to_string(ResultStatus s) {
  switch (s) {
    case ResultStatus::Accepted: return "accepted";
    case ResultStatus::Rejected: return "rejected";
    case ResultStatus::Completed: return "completed";
    case ResultStatus::Returned: return "returned";
  }
  return "?";
}

std::optional<ResultStatus> result_status_from_string(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(ResultStatus::Returned); ++i) {
    ResultStatus r = static_cast<ResultStatus>(i);
    if (s == to_string(r)) return r;
  }
  return std::nullopt;
}

MsgKind kind_of(const Payload& p) {
  return static_cast<MsgKind>(p.index());
}

namespace {

json nodes_to_json(const std::vector<NodeId>& v) {
  json a = json::array();
  for (NodeId n : v) a.push_back(node_name(n));
  return a;
}

std::vector<NodeId> nodes_from_json(const json& a) {
  std::vector<NodeId> v;
  for (const auto& e : a) {
    auto id = node_id_from_name(e.get<std::string>());
    if (!id) throw std::runtime_error("bad node name in message");
    v.push_back(*id);
  }
  return v;
}

json task_to_json(const Task& t) {
  return json{{"task_id", t.task_id},
              {"type", to_string(t.type)},
              {"origin", node_name(t.origin)},
              {"emitted_at_ms", t.emitted_at_ms},
              {"ttl_ms", t.ttl_ms},
              {"base_processing_ms", t.base_processing_ms}};
}

Task task_from_json(const json& j) {
  Task t;
  t.task_id = j.at("task_id").get<std::uint64_t>();
  auto type = task_type_from_string(j.at("type").get<std::string>());
  auto origin = node_id_from_name(j.at("origin").get<std::string>());
  if (!type || !origin) throw std::runtime_error("bad task fields");
  t.type = *type;
  t.origin = *origin;
  t.emitted_at_ms = j.at("emitted_at_ms").get<std::int64_t>();
  t.ttl_ms = j.at("ttl_ms").get<std::int64_t>();
  t.base_processing_ms = j.at("base_processing_ms").get<std::int64_t>();
  return t;
}

json profile_to_json(const NodeProfile& p) {
  json types = json::array();
  for (TaskType t : all_task_types()) {
    if (supports(p.spec, t)) types.push_back(to_string(t));
  }
  return json{{"node_id", node_name(p.node_id)},
              {"device_type", p.spec.type_id},
              {"supported_types", types},
              {"queue_limit", p.spec.queue_limit},
              {"c_comm", p.spec.c_comm},
              {"c_comp", p.spec.c_comp},
              {"c_storage", p.spec.c_storage},
              {"listen_address", p.listen_address},
              {"max_connections", p.max_connections}};
}

NodeProfile profile_from_json(const json& j) {
  NodeProfile p;
  auto id = node_id_from_name(j.at("node_id").get<std::string>());
  if (!id) throw std::runtime_error("bad profile node_id");
  p.node_id = *id;
  const DeviceSpec* spec = find_spec(j.at("device_type").get<std::string>());
  if (spec) {
    p.spec = *spec;
  } else {
    p.spec.type_id = j.at("device_type").get<std::string>();
  }
  p.spec.queue_limit = j.at("queue_limit").get<int>();
  p.spec.c_comm = j.at("c_comm").get<int>();
  p.spec.c_comp = j.at("c_comp").get<int>();
  p.spec.c_storage = j.at("c_storage").get<int>();
  for (auto& b : p.spec.supported) b = false;
  for (const auto& e : j.at("supported_types")) {
    auto t = task_type_from_string(e.get<std::string>());
    if (!t) throw std::runtime_error("bad supported type");
    p.spec.supported[static_cast<std::size_t>(*t)] = true;
  }
  p.listen_address = j.at("listen_address").get<std::string>();
  p.max_connections = j.at("max_connections").get<int>();
  return p;
}

json payload_to_json(const Payload& p) {
  json j;
  switch (kind_of(p)) {
    case MsgKind::Handshake: {
      const auto& b = std::get<HandshakePayload>(p);
      j["profile"] = profile_to_json(b.profile);
      break;
    }
    case MsgKind::ForwardAnt: {
      const auto& b = std::get<ForwardAntPayload>(p);
      j["request"] = b.request;
      j["task"] = task_to_json(b.task);
      j["ttl_remaining_ms"] = b.ttl_remaining_ms;
      j["path"] = nodes_to_json(b.path);
      j["fallback_used"] = b.fallback_used;
      break;
    }
    case MsgKind::BackwardAnt: {
      const auto& b = std::get<BackwardAntPayload>(p);
      j["request"] = b.request;
      j["task_id"] = b.task_id;
      j["type"] = to_string(b.type);
      j["quality"] = b.quality;
      j["path"] = nodes_to_json(b.path);
      j["cursor"] = b.cursor;
      break;
    }
    case MsgKind::GossipDiscovery: {
      const auto& b = std::get<GossipDiscoveryPayload>(p);
      j["gossip_id"] = b.gossip_id;
      j["request"] = b.request;
      j["type"] = to_string(b.type);
      j["origin"] = node_name(b.origin);
      j["path"] = nodes_to_json(b.path);
      j["deadline_ms"] = b.deadline_ms;
      break;
    }
    case MsgKind::GossipResponse: {
      const auto& b = std::get<GossipResponsePayload>(p);
      j["gossip_id"] = b.gossip_id;
      j["request"] = b.request;
      j["type"] = to_string(b.type);
      j["responder"] = node_name(b.responder);
      j["queue_occupation"] = b.queue_occupation;
      j["queue_limit"] = b.queue_limit;
      j["c_comm"] = b.c_comm;
      j["c_comp"] = b.c_comp;
      j["c_storage"] = b.c_storage;
      j["route"] = nodes_to_json(b.route);
      j["route_cursor"] = b.route_cursor;
      break;
    }
    case MsgKind::Offload: {
      const auto& b = std::get<OffloadPayload>(p);
      j["request"] = b.request;
      j["task"] = task_to_json(b.task);
      j["ttl_remaining_ms"] = b.ttl_remaining_ms;
      j["hops"] = b.hops;
      j["route"] = nodes_to_json(b.route);
      j["route_cursor"] = b.route_cursor;
      j["via"] = b.via == kNoNode ? "" : node_name(b.via);
      break;
    }
    case MsgKind::Result: {
      const auto& b = std::get<ResultPayload>(p);
      j["request"] = b.request;
      j["task_id"] = b.task_id;
      j["status"] = to_string(b.status);
      j["route"] = nodes_to_json(b.route);
      j["route_cursor"] = b.route_cursor;
      if (b.task) j["task"] = task_to_json(*b.task);
      break;
    }
    case MsgKind::SANotice:
    case MsgKind::Disconnect:
      j = json::object();
      break;
  }
  return j;
}

Payload payload_from_json(MsgKind kind, const json& j) {
  switch (kind) {
    case MsgKind::Handshake: {
      HandshakePayload b;
      b.profile = profile_from_json(j.at("profile"));
      return b;
    }
    case MsgKind::ForwardAnt: {
      ForwardAntPayload b;
      b.request = j.at("request").get<std::uint64_t>();
      b.task = task_from_json(j.at("task"));
      b.ttl_remaining_ms = j.at("ttl_remaining_ms").get<std::int64_t>();
      b.path = nodes_from_json(j.at("path"));
      b.fallback_used = j.at("fallback_used").get<bool>();
      return b;
    }
    case MsgKind::BackwardAnt: {
      BackwardAntPayload b;
      b.request = j.at("request").get<std::uint64_t>();
      b.task_id = j.at("task_id").get<std::uint64_t>();
      b.type = *task_type_from_string(j.at("type").get<std::string>());
      b.quality = j.at("quality").get<double>();
      b.path = nodes_from_json(j.at("path"));
      b.cursor = j.at("cursor").get<std::int32_t>();
      return b;
    }
    case MsgKind::GossipDiscovery: {
      GossipDiscoveryPayload b;
      b.gossip_id = j.at("gossip_id").get<std::uint64_t>();
      b.request = j.at("request").get<std::uint64_t>();
      b.type = *task_type_from_string(j.at("type").get<std::string>());
      b.origin = *node_id_from_name(j.at("origin").get<std::string>());
      b.path = nodes_from_json(j.at("path"));
      b.deadline_ms = j.at("deadline_ms").get<std::int64_t>();
      return b;
    }
    case MsgKind::GossipResponse: {
      GossipResponsePayload b;
      b.gossip_id = j.at("gossip_id").get<std::uint64_t>();
      b.request = j.at("request").get<std::uint64_t>();
      b.type = *task_type_from_string(j.at("type").get<std::string>());
      b.responder = *node_id_from_name(j.at("responder").get<std::string>());
      b.queue_occupation = j.at("queue_occupation").get<std::int32_t>();
      b.queue_limit = j.at("queue_limit").get<std::int32_t>();
      b.c_comm = j.at("c_comm").get<std::int32_t>();
      b.c_comp = j.at("c_comp").get<std::int32_t>();
      b.c_storage = j.at("c_storage").get<std::int32_t>();
      b.route = nodes_from_json(j.at("route"));
      b.route_cursor = j.at("route_cursor").get<std::int32_t>();
      return b;
    }
    case MsgKind::Offload: {
      OffloadPayload b;
      b.request = j.at("request").get<std::uint64_t>();
      b.task = task_from_json(j.at("task"));
      b.ttl_remaining_ms = j.at("ttl_remaining_ms").get<std::int64_t>();
      b.hops = j.at("hops").get<std::int32_t>();
      b.route = nodes_from_json(j.at("route"));
      b.route_cursor = j.at("route_cursor").get<std::int32_t>();
      std::string via = j.at("via").get<std::string>();
      b.via = via.empty() ? kNoNode : *node_id_from_name(via);
      return b;
    }
    case MsgKind::Result: {
      ResultPayload b;
      b.request = j.at("request").get<std::uint64_t>();
      b.task_id = j.at("task_id").get<std::uint64_t>();
      b.status = *result_status_from_string(j.at("status").get<std::string>());
      b.route = nodes_from_json(j.at("route"));
      b.route_cursor = j.at("route_cursor").get<std::int32_t>();
      if (j.contains("task")) b.task = task_from_json(j.at("task"));
      return b;
    }
    case MsgKind::SANotice:
      return SANoticePayload{};
    case MsgKind::Disconnect:
      return DisconnectPayload{};
  }
  throw std::runtime_error("unknown message kind");
}

}  // namespace

std::string to_wire(const MessageEnvelope& env) {
  json j{{"msg_id", "m" + std::to_string(env.msg_id)},
         {"kind", to_string(env.kind())},
         {"sender", node_name(env.sender)},
         {"receiver", node_name(env.receiver)},
         {"sent_at_ms", env.sent_at_ms},
         {"payload", payload_to_json(env.payload)}};
  return j.dump();
}

MessageEnvelope from_wire(const std::string& line) {
  json j = json::parse(line);
  MessageEnvelope env;
  std::string mid = j.at("msg_id").get<std::string>();
  if (mid.empty() || mid[0] != 'm') throw std::runtime_error("bad msg_id");
  env.msg_id = std::stoull(mid.substr(1));
  auto kind = msg_kind_from_string(j.at("kind").get<std::string>());
  auto sender = node_id_from_name(j.at("sender").get<std::string>());
  auto receiver = node_id_from_name(j.at("receiver").get<std::string>());
  if (!kind || !sender || !receiver) throw std::runtime_error("bad envelope fields");
  env.sender = *sender;
  env.receiver = *receiver;
  env.sent_at_ms = j.at("sent_at_ms").get<std::int64_t>();
  env.payload = payload_from_json(*kind, j.at("payload"));
  return env;
}

}  // namespace swarmsim
