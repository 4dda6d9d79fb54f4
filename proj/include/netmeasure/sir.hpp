#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "netmeasure/graph.hpp"
#include "netmeasure/labels.hpp"

namespace netmeasure {

enum class SirState : std::uint8_t { susceptible, infected, recovered };

/// What the infection-ratio label counts.
enum class InfectionCount : std::uint8_t {
    ever_infected,      ///< I or R
    currently_infected  ///< I only
};

struct SirParams {
    double theta1 = 0.2;  ///< per-step, per-infected-in-neighbor infection probability
    double theta2 = 0.05; ///< per-step recovery probability
    double target_ratio = 0.2;
    /// Explicit seeds; when empty, `initial_count` uniformly random nodes are infected.
    std::vector<NodeId> initial_infected;
    std::size_t initial_count = 1;
    InfectionCount count = InfectionCount::ever_infected;
    /// When the last step would overshoot the target count, accept a uniformly
    /// random subset of that step's new infections so the count lands on
    /// ceil(target_ratio * n).
    bool exact_stop = true;
    std::size_t max_steps = 100000;
};

struct SirOutcome {
    std::vector<SirState> states;
    LabelFunction labels;  ///< 1 for counted nodes, else 0
    double true_ratio = 0.0;
    std::size_t steps_run = 0;
    bool reached_target = false;
    /// No infected nodes remained before the target was reached.
    bool extinct = false;
};

/// Synchronous discrete-time SIR spreading along out-links. A susceptible node
/// with j infected in-neighbors is infected with probability 1 - (1 - theta1)^j;
/// every node infected at the start of a step recovers with probability theta2.
/// Stops the first step the counted fraction reaches target_ratio or when no
/// infected node remains. Requires a weakly connected graph.
SirOutcome run_sir(const DirectedGraph& g, const SirParams& params, std::uint64_t seed);

}  // namespace netmeasure
