#include "swarmsim/types.hpp"

#include <cstdio>
#include <stdexcept>

namespace swarmsim {

const char* to_string(TaskType t) {
  switch (t) {
    case TaskType::T1: return "T1";
    case TaskType::T2: return "T2";
    case TaskType::T3: return "T3";
    case TaskType::T4: return "T4";
    case TaskType::T5: return "T5";
  }
  return "?";
}

std::optional<TaskType> task_type_from_string(std::string_view s) {
  for (TaskType t : all_task_types()) {
    if (s == to_string(t)) return t;
  }
  return std::nullopt;
}

double capacity_factor(const DeviceSpec& spec) {
  return (spec.c_comm + spec.c_comp + spec.c_storage) / 3.0;
}

bool supports(const DeviceSpec& spec, TaskType t) {
  return spec.supported[static_cast<std::size_t>(t)];
}

namespace {

DeviceSpec make_spec(const char* id, std::initializer_list<TaskType> types,
                     int queue, int comm, int comp, int storage, double p_fail,
                     double p_recover) {
  DeviceSpec s;
  s.type_id = id;
  for (TaskType t : types) s.supported[static_cast<std::size_t>(t)] = true;
  s.queue_limit = queue;
  s.c_comm = comm;
  s.c_comp = comp;
  s.c_storage = storage;
  s.p_fail = p_fail;
  s.p_recover = p_recover;
  return s;
}

}  // namespace

const std::array<DeviceSpec, 10>& catalog() {
  using T = TaskType;
  static const std::array<DeviceSpec, 10> table = {
      make_spec("s1", {T::T1, T::T2}, 10, 1, 1, 1, 0.1, 0.4),
      make_spec("s2", {T::T3, T::T4, T::T5}, 15, 1, 2, 1, 0.1, 0.4),
      make_spec("m1", {T::T1, T::T4}, 10, 1, 2, 2, 0.2, 0.3),
      make_spec("m2", {T::T5}, 5, 2, 2, 2, 0.2, 0.3),
      make_spec("m3", {T::T2, T::T3}, 10, 2, 2, 3, 0.2, 0.3),
      make_spec("w1", {T::T1}, 5, 3, 3, 3, 0.3, 0.2),
      make_spec("w2", {T::T2}, 5, 3, 2, 3, 0.3, 0.2),
      make_spec("w3", {T::T3}, 5, 3, 3, 3, 0.3, 0.2),
      make_spec("w4", {T::T4}, 5, 3, 3, 3, 0.3, 0.2),
      make_spec("w5", {T::T5}, 5, 2, 3, 3, 0.3, 0.2),
  };
  return table;
}

const DeviceSpec* find_spec(std::string_view type_id) {
  for (const DeviceSpec& s : catalog()) {
    if (s.type_id == type_id) return &s;
  }
  return nullptr;
}

std::string node_name(NodeId id) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "n%03d", static_cast<int>(id));
  return buf;
}

std::optional<NodeId> node_id_from_name(std::string_view name) {
  if (name.size() < 2 || name[0] != 'n') return std::nullopt;
  NodeId id = 0;
  for (std::size_t i = 1; i < name.size(); ++i) {
    if (name[i] < '0' || name[i] > '9') return std::nullopt;
    id = id * 10 + (name[i] - '0');
  }
  return id;
}

}  // namespace swarmsim
