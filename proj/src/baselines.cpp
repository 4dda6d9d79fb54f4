#include "netmeasure/baselines.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>
#include <vector>

#include "netmeasure/errors.hpp"

namespace netmeasure {

SampleTrace rw_sample(GraphAccess& access, NodeId start, const RwParams& params,
                      std::uint64_t seed) {
    if (params.length < 1) {
        throw ParameterError("walk length must be at least 1");
    }
    if (!access.contains(start)) {
        throw ParameterError("start node " + std::to_string(start) + " is not in the graph");
    }
    Rng rng(seed);
    std::unordered_map<NodeId, std::span<const NodeId>> revealed;
    auto links_of = [&](NodeId x) {
        auto it = revealed.find(x);
        if (it == revealed.end()) {
            it = revealed.emplace(x, access.out_links(x)).first;
        }
        return it->second;
    };

    SampleTrace trace;
    NodeId x = start;
    access.visit(x);
    for (std::size_t step = 0;; ++step) {
        const auto out = links_of(x);
        trace.entries.push_back(
            {x, static_cast<double>(std::max<std::size_t>(out.size(), 1)), step});
        if (trace.entries.size() == params.length) {
            break;
        }
        if (out.empty()) {
            if (params.on_sink == SinkPolicy::terminate) {
                trace.truncated = true;
                break;
            }
            x = start;
        } else {
            x = out[uniform_index(rng, out.size())];
            access.visit(x);
        }
    }
    trace.query_count = access.query_count();
    trace.sampling_rate =
        static_cast<double>(access.num_visited()) / static_cast<double>(access.universe_size());
    trace.iterations = trace.entries.size();
    return trace;
}

SampleTrace durw_sample(GraphAccess& access, const UniformNodeOracle& oracle,
                        const DurwParams& params, std::uint64_t seed) {
    if (!(params.jump_weight > 0.0)) {
        throw ParameterError("jump weight must be positive");
    }
    if (!(params.jump_cost >= 1.0)) {
        throw ParameterError("jump cost must be at least 1");
    }
    if (!(params.budget >= params.jump_cost)) {
        throw ParameterError("budget must cover at least one jump");
    }
    Rng rng(seed);
    std::unordered_map<NodeId, std::vector<NodeId>> aux;
    const double w = params.jump_weight;

    SampleTrace trace;
    double remaining = params.budget;
    NodeId x = oracle(rng);
    for (std::size_t step = 0;; ++step) {
        if (!access.visited(x)) {
            access.visit(x);
            for (NodeId y : access.out_links(x)) {
                if (!access.visited(y)) {
                    aux[x].push_back(y);
                    aux[y].push_back(x);
                }
            }
        }
        const auto& nbrs = aux[x];
        const auto degree = static_cast<double>(nbrs.size());
        trace.entries.push_back({x, degree + w, step});

        if (bernoulli(rng, w / (w + degree))) {
            if (remaining < params.jump_cost) {
                break;
            }
            remaining -= params.jump_cost;
            x = oracle(rng);
        } else {
            if (remaining < 1.0) {
                break;
            }
            remaining -= 1.0;
            x = nbrs[uniform_index(rng, nbrs.size())];
        }
    }
    trace.query_count = access.query_count();
    trace.sampling_rate =
        static_cast<double>(access.num_visited()) / static_cast<double>(access.universe_size());
    trace.iterations = trace.entries.size();
    return trace;
}

}  // namespace netmeasure
