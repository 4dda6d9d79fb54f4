#pragma once

#include <cstddef>
#include <cstdint>

#include "netmeasure/access.hpp"
#include "netmeasure/rng.hpp"
#include "netmeasure/trace.hpp"

namespace netmeasure {

enum class SinkPolicy {
    restart,   ///< jump back to the start node
    terminate  ///< end the walk (trace flagged truncated)
};

struct RwParams {
    std::size_t length = 100;  ///< nodes to visit, counting the start
    SinkPolicy on_sink = SinkPolicy::restart;
};

/// Classic directed random walk through uniformly chosen out-links. Every
/// visit is one trace entry weighted by max(d_out, 1), so the inverse-weighted
/// estimate is the usual degree re-weighting (unbiased only on the reciprocal
/// part of a graph).
SampleTrace rw_sample(GraphAccess& access, NodeId start, const RwParams& params,
                      std::uint64_t seed);

/// Uniform node draws from the full universe. Only DURW receives one.
class UniformNodeOracle {
public:
    explicit UniformNodeOracle(std::size_t num_nodes) : num_nodes_(num_nodes) {}
    NodeId operator()(Rng& rng) const {
        return static_cast<NodeId>(uniform_index(rng, num_nodes_));
    }

private:
    std::size_t num_nodes_;
};

struct DurwParams {
    double jump_weight = 10.0;  ///< w > 0
    double jump_cost = 1.0;     ///< c >= 1 budget units per jump
    double budget = 100.0;      ///< total budget units; walk steps cost 1
};

/// Directed unbiased random walk. Visiting a node for the first time reveals
/// its out-links; each link to a not-yet-visited node becomes an undirected
/// edge of an auxiliary graph the walker can traverse both ways. From x the
/// walker jumps to a uniform node with probability w / (w + deg_aux(x)) at
/// cost c, otherwise it moves to a uniform auxiliary neighbor at cost 1. The
/// start node is free. Each visit is a trace entry weighted by deg_aux(x) + w.
SampleTrace durw_sample(GraphAccess& access, const UniformNodeOracle& oracle,
                        const DurwParams& params, std::uint64_t seed);

}  // namespace netmeasure
