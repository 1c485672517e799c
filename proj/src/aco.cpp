#include "swarmsim/aco.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace swarmsim::aco {

void PheromoneTable::init_neighbor(NodeId nb, const DeviceSpec& spec,
                                   const AcoParams& params) {
  auto& row = rows_[nb];
  for (TaskType t : all_task_types()) {
    row[static_cast<std::size_t>(t)] = supports(spec, t) ? params.tau0_plus : params.tau0;
  }
}

double PheromoneTable::level(NodeId nb, TaskType t, double tau0_default) const {
  auto it = rows_.find(nb);
  if (it == rows_.end()) return tau0_default;
  return it->second[static_cast<std::size_t>(t)];
}

void PheromoneTable::add(NodeId nb, TaskType t, double delta, double tau0_default) {
  auto it = rows_.find(nb);
  if (it == rows_.end()) {
    auto& row = rows_[nb];
    row.fill(tau0_default);
    it = rows_.find(nb);
  }
  double& tau = it->second[static_cast<std::size_t>(t)];
  tau += delta;
  assert(tau >= 0.0);
}

void PheromoneTable::evaporate(double rho) {
  const double keep = 1.0 - rho;
  for (auto& [nb, row] : rows_) {
    for (double& tau : row) tau *= keep;
  }
}

std::vector<std::tuple<NodeId, TaskType, double>> PheromoneTable::rows() const {
  std::vector<std::tuple<NodeId, TaskType, double>> out;
  out.reserve(rows_.size() * kTaskTypeCount);
  for (const auto& [nb, row] : rows_) {
    for (TaskType t : all_task_types()) {
      out.emplace_back(nb, t, row[static_cast<std::size_t>(t)]);
    }
  }
  return out;
}

double heuristic_eta(const DeviceSpec& neighbor_spec, TaskType t, const AcoParams& params) {
  return supports(neighbor_spec, t) ? params.tau0_plus : params.tau0;
}

std::vector<double> transition_probabilities(std::span<const TransitionCandidate> candidates,
                                             const AcoParams& params) {
  if (candidates.empty()) throw std::invalid_argument("no transition candidates");
  std::vector<double> p(candidates.size());
  double total = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    p[i] = std::pow(candidates[i].tau, params.alpha) *
           std::pow(candidates[i].eta, params.beta);
    total += p[i];
  }
  if (total <= 0.0) {
    // Degenerate weights (all-zero pheromone with alpha > 0): fall back to
    // uniform rather than dividing by zero.
    const double u = 1.0 / static_cast<double>(candidates.size());
    for (double& v : p) v = u;
    return p;
  }
  double sum = 0.0;
  for (double& v : p) {
    v /= total;
    sum += v;
  }
  assert(std::fabs(sum - 1.0) <= 1e-9);
  return p;
}

double queue_quality(double l_avg, int l_limit) {
  assert(l_limit > 0 && l_avg >= 0.0);
  const double v = 1.0 - l_avg / static_cast<double>(l_limit);
  return v <= 0.0 ? 0.0 : v;
}

double quality_pheromones(double q_l, const DeviceSpec& spec) {
  return q_l * (1.0 / capacity_factor(spec));
}

double delta_pheromone(double q, int hops_to_origin) {
  if (hops_to_origin < 1) throw std::invalid_argument("hops_to_origin must be >= 1");
  return q * (1.0 / static_cast<double>(hops_to_origin)) * 100.0;
}

}  // namespace swarmsim::aco
