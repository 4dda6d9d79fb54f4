#include "netmeasure/sir.hpp"

#include <algorithm>
#include <cmath>

#include "netmeasure/errors.hpp"
#include "netmeasure/rng.hpp"

namespace netmeasure {

namespace {

void validate(const DirectedGraph& g, const SirParams& p) {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(p.theta1) || !unit(p.theta2) || !unit(p.target_ratio)) {
        throw ParameterError("SIR rates and target ratio must lie in [0, 1]");
    }
    if (g.num_nodes() == 0) {
        throw ParameterError("SIR on an empty graph");
    }
    if (p.initial_infected.empty() && (p.initial_count == 0 || p.initial_count > g.num_nodes())) {
        throw ParameterError("SIR needs between 1 and n initial infected nodes");
    }
    for (NodeId x : p.initial_infected) {
        if (x >= g.num_nodes()) {
            throw ParameterError("initial infected node outside the graph");
        }
    }
    if (!is_weakly_connected(g)) {
        throw ParameterError("SIR requires a weakly connected graph");
    }
}

/// Keeps a uniformly random subset of `items` of size `keep`.
void subsample(std::vector<NodeId>& items, std::size_t keep, Rng& rng) {
    for (std::size_t i = 0; i < keep; ++i) {
        std::swap(items[i], items[i + uniform_index(rng, items.size() - i)]);
    }
    items.resize(keep);
}

}  // namespace

SirOutcome run_sir(const DirectedGraph& g, const SirParams& params, std::uint64_t seed) {
    validate(g, params);
    Rng rng(seed);
    const std::size_t n = g.num_nodes();
    const auto target_count = static_cast<std::size_t>(
        std::ceil(params.target_ratio * static_cast<double>(n) - 1e-9));

    SirOutcome out;
    out.states.assign(n, SirState::susceptible);
    std::vector<NodeId> infected;
    std::size_t ever = 0;

    if (!params.initial_infected.empty()) {
        for (NodeId x : params.initial_infected) {
            if (out.states[x] == SirState::susceptible) {
                out.states[x] = SirState::infected;
                infected.push_back(x);
                ++ever;
            }
        }
    } else {
        while (infected.size() < params.initial_count) {
            const auto x = static_cast<NodeId>(uniform_index(rng, n));
            if (out.states[x] == SirState::susceptible) {
                out.states[x] = SirState::infected;
                infected.push_back(x);
                ++ever;
            }
        }
    }

    const bool count_ever = params.count == InfectionCount::ever_infected;
    auto counted = [&] { return count_ever ? ever : infected.size(); };

    std::vector<std::uint32_t> exposures(n, 0);
    std::vector<NodeId> touched;
    std::vector<NodeId> newly_infected;
    std::vector<NodeId> still_infected;
    while (true) {
        if (counted() >= target_count) {
            out.reached_target = true;
            break;
        }
        if (infected.empty()) {
            out.extinct = true;
            break;
        }
        if (out.steps_run >= params.max_steps) {
            break;
        }

        touched.clear();
        for (NodeId x : infected) {
            for (NodeId y : g.out_neighbors(x)) {
                if (out.states[y] == SirState::susceptible) {
                    if (exposures[y]++ == 0) {
                        touched.push_back(y);
                    }
                }
            }
        }
        newly_infected.clear();
        for (NodeId y : touched) {
            const double p = 1.0 - std::pow(1.0 - params.theta1, exposures[y]);
            exposures[y] = 0;
            if (bernoulli(rng, p)) {
                newly_infected.push_back(y);
            }
        }
        still_infected.clear();
        std::size_t recovered_now = 0;
        for (NodeId x : infected) {
            if (bernoulli(rng, params.theta2)) {
                out.states[x] = SirState::recovered;
                ++recovered_now;
            } else {
                still_infected.push_back(x);
            }
        }

        if (params.exact_stop) {
            const std::size_t base = count_ever ? ever : infected.size() - recovered_now;
            if (base + newly_infected.size() > target_count) {
                subsample(newly_infected, target_count > base ? target_count - base : 0, rng);
            }
        }
        for (NodeId y : newly_infected) {
            out.states[y] = SirState::infected;
            still_infected.push_back(y);
        }
        ever += newly_infected.size();
        infected.swap(still_infected);
        ++out.steps_run;
    }

    std::vector<double> labels(n, 0.0);
    std::size_t positives = 0;
    for (std::size_t x = 0; x < n; ++x) {
        const bool hit = count_ever ? out.states[x] != SirState::susceptible
                                    : out.states[x] == SirState::infected;
        if (hit) {
            labels[x] = 1.0;
            ++positives;
        }
    }
    out.labels = LabelFunction(std::move(labels));
    out.true_ratio = static_cast<double>(positives) / static_cast<double>(n);
    return out;
}

}  // namespace netmeasure
