#pragma once

#include <vector>

#include "swarmsim/engine.hpp"

namespace swarmsim::baselines {

/// Ranks gossip discovery responses: queue quality times inverse capacity
/// factor, discounted by hop distance; descending, ties toward the smaller
/// responder id. Deterministic for a fixed response multiset.
std::vector<sim::GossipCandidate> gossip_rank(
    const std::vector<GossipResponsePayload>& responses);

}  // namespace swarmsim::baselines
