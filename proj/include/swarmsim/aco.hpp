#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "swarmsim/types.hpp"

namespace swarmsim::aco {

struct AcoParams {
  double alpha = 2.0;      // a posteriori (pheromone) exponent
  double beta = 1.0;       // a priori (heuristic) exponent
  double rho = 0.3;        // evaporation fraction per round
  double tau0 = 50.0;      // base pheromone
  double tau0_plus = 100.0;  // boosted pheromone for supported task types
  std::int64_t evaporation_interval_ms = 60'000;

  bool valid() const {
    return tau0_plus > tau0 && tau0 > 0.0 && rho > 0.0 && rho < 1.0 &&
           alpha >= 0.0 && beta >= 0.0 && evaporation_interval_ms > 0;
  }
};

/// Per-node pheromone state: one row per connected neighbor, one level per
/// task type. Levels never go negative. Rows appear at handshake time and
/// unseen task types materialize lazily at tau0 on first update.
class PheromoneTable {
 public:
  bool has_neighbor(NodeId nb) const { return rows_.count(nb) > 0; }
  std::size_t neighbor_count() const { return rows_.size(); }

  /// Handshake hook: tau0_plus for task types the neighbor supports, tau0
  /// otherwise. Re-running it (reconnection) resets the row.
  void init_neighbor(NodeId nb, const DeviceSpec& spec, const AcoParams& params);

  void erase_neighbor(NodeId nb) { rows_.erase(nb); }
  void clear() { rows_.clear(); }

  /// Level for (neighbor, type); tau0_default for unheard-of entries.
  double level(NodeId nb, TaskType t, double tau0_default) const;

  /// tau += delta, creating the row at tau0_default first when missing.
  void add(NodeId nb, TaskType t, double delta, double tau0_default);

  /// One evaporation round: every entry scaled by (1 - rho).
  void evaporate(double rho);

  /// Rows in (neighbor, type) order as (neighbor, type, tau) tuples.
  std::vector<std::tuple<NodeId, TaskType, double>> rows() const;

  const std::map<NodeId, std::array<double, kTaskTypeCount>>& raw() const { return rows_; }

 private:
  std::map<NodeId, std::array<double, kTaskTypeCount>> rows_;
};

/// A priori desirability of a neighbor for a task type, from the profile
/// snapshot exchanged during node discovery.
double heuristic_eta(const DeviceSpec& neighbor_spec, TaskType t, const AcoParams& params);

struct TransitionCandidate {
  NodeId id = kNoNode;
  double tau = 0.0;
  double eta = 0.0;
};

/// Ant-system transition rule: p(j) = tau_j^alpha * eta_j^beta, normalized
/// over the candidate set. Candidates must be nonempty.
std::vector<double> transition_probabilities(std::span<const TransitionCandidate> candidates,
                                             const AcoParams& params);

/// Queue quality: 1 - l_avg / l_limit, floored at zero.
double queue_quality(double l_avg, int l_limit);

/// Quality pheromones at a target: queue quality scaled by the inverse
/// capacity factor, so stronger hardware scores higher.
double quality_pheromones(double q_l, const DeviceSpec& spec);

/// Backward-ant deposit: q * (1 / hops_to_origin) * 100. Rejects hops < 1.
double delta_pheromone(double q, int hops_to_origin);

}  // namespace swarmsim::aco
