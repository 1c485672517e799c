#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmsim/types.hpp"

namespace swarmsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Everything a run needs. Defaults describe the reference scenario; every
/// field can be set from a config file (key = value lines or a JSON object)
/// and the run manifest echoes the resolved values back in the same schema.
struct ScenarioConfig {
  std::string strategy = "aco";       // random | aco | gossips
  int node_count = 25;
  int queue_capacity = 0;             // 0 = per-device catalog value
  std::string environment = "static"; // static | dynamic
  double duration_s = 900.0;
  std::uint64_t seed = 1;

  std::int64_t latency_ms = 1000;     // per-hop message latency
  double ttl_s = 60.0;                // offload request time-to-live

  // Mean inter-arrival seconds per task type (T1..T5), per node. Zero
  // disables a type (programmatic fixtures only; file input requires > 0).
  std::array<double, kTaskTypeCount> emit_interval_s = {30.0, 60.0, 30.0, 180.0, 180.0};

  // Base processing seconds per task type on a capacity-factor-1 device.
  std::array<double, kTaskTypeCount> base_time_s = {2.0, 4.0, 3.0, 10.0, 12.0};

  // Device-type mix weights in catalog order (s1,s2,m1,m2,m3,w1..w5).
  std::array<double, 10> mix_weights = {1, 1, 1, 1, 1, 1, 1, 1, 1, 1};

  int target_degree = 4;
  int max_connections = 8;
  int min_connections = 2;

  bool sa_enabled = true;
  double sa_interval_s = 300.0;
  double sa_notice_grace_s = 30.0;
  double sa_block_duration_s = 600.0;

  double evaporation_interval_s = 60.0;
  double aco_alpha = 2.0;
  double aco_beta = 1.0;
  double aco_rho = 0.3;
  double aco_tau0 = 50.0;
  double aco_tau0_plus = 100.0;

  double gossip_discovery_fraction = 0.5;  // share of TTL spent discovering

  double metrics_sample_interval_s = 10.0;
  double fail_tick_s = 900.0;
  double recover_tick_s = 60.0;

  bool count_control_messages = false;
  double topology_snapshot_interval_s = 0.0;  // 0 = off

  // Fixture hook: explicit edge list "0-1;1-2;..." instead of random wiring.
  std::string topology;

  // Programmatic-only switch for scripted fixtures; not a file key.
  bool emitters_enabled = true;

  std::int64_t duration_ms() const { return static_cast<std::int64_t>(duration_s * 1000.0 + 0.5); }
  std::int64_t ttl_ms() const { return static_cast<std::int64_t>(ttl_s * 1000.0 + 0.5); }

  /// Field-by-field check; each message names the offending field.
  std::vector<std::string> validate() const;

  /// Manifest form: a JSON object covering every file-settable key.
  std::string to_manifest_json() const;
};

/// Parses either format by sniffing the first non-space byte ('{' selects
/// JSON). Unknown keys and malformed values raise ConfigError naming the key.
ScenarioConfig parse_config_text(const std::string& text);

/// Reads and parses a config file; ConfigError on I/O failure.
ScenarioConfig load_config_file(const std::string& path);

}  // namespace swarmsim
