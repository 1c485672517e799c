#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>

namespace swarmsim {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

// ---------------------------------------------------------------------------
// Task types

enum class TaskType : std::uint8_t { T1 = 0, T2, T3, T4, T5 };
inline constexpr int kTaskTypeCount = 5;

constexpr std::array<TaskType, kTaskTypeCount> all_task_types() {
  return {TaskType::T1, TaskType::T2, TaskType::T3, TaskType::T4, TaskType::T5};
}

const char* to_string(TaskType t);
std::optional<TaskType> task_type_from_string(std::string_view s);

// ---------------------------------------------------------------------------
// Device catalog

/// Hardware profile of one device class. Capacity values run 1..3; lower is
/// a better-equipped device, and they scale task processing time directly.
struct DeviceSpec {
  std::string type_id;                                 // s1, s2, m1..m3, w1..w5
  std::array<bool, kTaskTypeCount> supported{};        // task types it can run
  int queue_limit = 0;                                 // offload threshold
  int c_comm = 0;
  int c_comp = 0;
  int c_storage = 0;
  double p_fail = 0.0;
  double p_recover = 0.0;
};

/// Mean of the three capacity values. 1.0 for the strongest devices, 3.0 for
/// the weakest; multiplies base processing time and divides target quality.
double capacity_factor(const DeviceSpec& spec);

bool supports(const DeviceSpec& spec, TaskType t);

/// The fixed ten-entry device catalog. Same content on every call.
const std::array<DeviceSpec, 10>& catalog();

/// Catalog lookup by type id; nullptr when absent.
const DeviceSpec* find_spec(std::string_view type_id);

// ---------------------------------------------------------------------------
// Nodes and tasks

struct NodeProfile {
  NodeId node_id = kNoNode;
  DeviceSpec spec;
  std::string listen_address;
  int max_connections = 8;
};

struct Task {
  std::uint64_t task_id = 0;
  TaskType type = TaskType::T1;
  NodeId origin = kNoNode;
  std::int64_t emitted_at_ms = 0;
  std::int64_t ttl_ms = 0;
  std::int64_t base_processing_ms = 0;
};

/// FIFO task queue plus the running occupation average used for quality
/// scoring. Occupation may exceed the limit: tasks that come back unplaced
/// are enqueued regardless, the device is then overloaded.
class QueueState {
 public:
  QueueState() = default;
  explicit QueueState(int limit) : limit_(limit) {}

  int occupation() const { return static_cast<int>(entries_.size()); }
  int limit() const { return limit_; }
  bool has_headroom() const { return occupation() < limit_; }
  bool empty() const { return entries_.empty(); }

  void push(const Task& t) { entries_.push_back(t); }
  const Task& front() const { return entries_.front(); }
  Task pop_front() {
    Task t = entries_.front();
    entries_.pop_front();
    return t;
  }
  const std::deque<Task>& entries() const { return entries_; }
  void clear() { entries_.clear(); }

  void record_sample() {
    sample_sum_ += occupation();
    ++sample_count_;
  }
  /// Mean occupation over recorded samples; falls back to the instantaneous
  /// occupation before the first sample lands.
  double l_avg() const {
    return sample_count_ > 0 ? sample_sum_ / static_cast<double>(sample_count_)
                             : static_cast<double>(occupation());
  }

 private:
  std::deque<Task> entries_;
  int limit_ = 0;
  double sample_sum_ = 0.0;
  std::int64_t sample_count_ = 0;
};

// ---------------------------------------------------------------------------
// Naming helpers (wire ids are strings, zero-padded so lexicographic order
// matches numeric order)

std::string node_name(NodeId id);
std::optional<NodeId> node_id_from_name(std::string_view name);

}  // namespace swarmsim
