#include "netmeasure/generators.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <vector>

#include "netmeasure/errors.hpp"
#include "netmeasure/rng.hpp"
#include "netmeasure/text.hpp"

namespace netmeasure {

namespace {

enum class PairState : std::uint8_t { both, forward_only, backward_only };

}  // namespace

DirectedGraph gen_der(const DerParams& params, std::uint64_t seed) {
    const auto [n, p0, target] = params;
    if (n < 2) {
        throw ParameterError("DER needs n >= 2");
    }
    if (!(p0 > 0.0 && p0 < 1.0)) {
        throw ParameterError("DER needs p0 in (0, 1)");
    }
    if (!(target > 0.0 && target <= 1.0)) {
        throw ParameterError("DER needs reciprocity in (0, 1]");
    }
    Rng rng(seed);

    std::vector<Edge> pairs;
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = i + 1; j < n; ++j) {
            if (bernoulli(rng, p0)) {
                pairs.push_back({i, j});
            }
        }
    }
    if (pairs.empty()) {
        throw ParameterError("DER base graph has no links; reciprocity cannot be reduced");
    }

    // x converted pairs out of U leave 2(U - x) reciprocal links among 2U - x.
    std::vector<PairState> state(pairs.size(), PairState::both);
    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    const auto total_pairs = static_cast<double>(pairs.size());
    std::size_t converted = 0;
    auto current = [&] {
        const auto x = static_cast<double>(converted);
        return 2.0 * (total_pairs - x) / (2.0 * total_pairs - x);
    };
    while (current() > target) {
        if (converted == pairs.size()) {
            throw ParameterError("target reciprocity unreachable by pair conversion");
        }
        // Partial Fisher-Yates: the next converted pair is uniform among the rest.
        const auto pick = converted + uniform_index(rng, pairs.size() - converted);
        std::swap(order[converted], order[pick]);
        state[order[converted]] = bernoulli(rng, 0.5) ? PairState::forward_only
                                                       : PairState::backward_only;
        ++converted;
    }

    std::vector<Edge> edges;
    edges.reserve(2 * pairs.size() - converted);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto [a, b] = pairs[i];
        if (state[i] != PairState::backward_only) {
            edges.push_back({a, b});
        }
        if (state[i] != PairState::forward_only) {
            edges.push_back({b, a});
        }
    }
    return DirectedGraph::from_edges(n, edges);
}

DirectedGraph gen_dws(const DwsParams& params, std::uint64_t seed) {
    const auto [n, k, p0] = params;
    if (k < 1 || k >= n) {
        throw ParameterError("DWS needs 1 <= k < n");
    }
    if (!(p0 >= 0.0 && p0 <= 1.0)) {
        throw ParameterError("DWS needs p0 in [0, 1]");
    }
    Rng rng(seed);
    const auto key = [n](NodeId a, NodeId b) { return static_cast<std::uint64_t>(a) * n + b; };

    std::vector<Edge> edges;
    edges.reserve(n * k);
    for (NodeId i = 0; i < n; ++i) {
        for (std::size_t step = 1; step <= k; ++step) {
            edges.push_back({i, static_cast<NodeId>((i + step) % n)});
        }
    }
    std::unordered_set<std::uint64_t> present;
    present.reserve(edges.size() * 2);
    for (const Edge& e : edges) {
        present.insert(key(e.src, e.dst));
    }
    if (edges.size() >= n * (n - 1)) {
        return DirectedGraph::from_edges(n, edges);  // complete graph: nothing to rewire into
    }
    for (Edge& e : edges) {
        if (!bernoulli(rng, p0)) {
            continue;
        }
        present.erase(key(e.src, e.dst));
        NodeId a = 0;
        NodeId b = 0;
        do {
            a = static_cast<NodeId>(uniform_index(rng, n));
            b = static_cast<NodeId>(uniform_index(rng, n));
        } while (a == b || present.count(key(a, b)) != 0);
        e = {a, b};
        present.insert(key(a, b));
    }
    return DirectedGraph::from_edges(n, edges);
}

DirectedGraph gen_dsf(const DsfParams& params, std::uint64_t seed) {
    const auto& [n, m0, p0_init, m, beta1, beta2, beta3] = params;
    if (beta1 < 0.0 || beta2 < 0.0 || beta3 < 0.0 ||
        std::abs(beta1 + beta2 + beta3 - 1.0) > 1e-9) {
        throw ParameterError("DSF attachment weights must be non-negative and sum to 1");
    }
    if (m0 < 2 || m0 > n) {
        throw ParameterError("DSF needs 2 <= m0 <= n");
    }
    if (m < 1) {
        throw ParameterError("DSF needs m >= 1");
    }
    if (!(p0_init >= 0.0 && p0_init <= 1.0)) {
        throw ParameterError("DSF needs p0_init in [0, 1]");
    }
    Rng rng(seed);

    std::vector<Edge> edges;
    std::vector<std::size_t> in_deg(n, 0);
    std::vector<std::size_t> out_deg(n, 0);
    auto add = [&](NodeId a, NodeId b) {
        edges.push_back({a, b});
        ++out_deg[a];
        ++in_deg[b];
    };
    for (NodeId i = 0; i < m0; ++i) {
        for (NodeId j = 0; j < m0; ++j) {
            if (i != j && bernoulli(rng, p0_init)) {
                add(i, j);
            }
        }
    }
    if (edges.empty()) {
        throw ParameterError("DSF seed graph has no links; attachment probability undefined");
    }

    // Drawing from the mixture (in-degree via a uniform edge head, out-degree via
    // a uniform edge tail, or uniform node) and rejecting repeats is exactly a
    // sequential without-replacement draw from p1.
    std::vector<NodeId> targets;
    std::vector<bool> chosen(n, false);
    for (auto t = static_cast<NodeId>(m0); t < n; ++t) {
        targets.clear();
        if (m >= t) {
            for (NodeId x = 0; x < t; ++x) {
                targets.push_back(x);
            }
        } else {
            const std::size_t num_edges = edges.size();
            std::size_t wanted = m;
            if (beta3 == 0.0) {
                // Only nodes with positive p1 can be drawn.
                std::size_t eligible = 0;
                for (NodeId x = 0; x < t; ++x) {
                    if ((beta1 > 0.0 && in_deg[x] > 0) || (beta2 > 0.0 && out_deg[x] > 0)) {
                        ++eligible;
                    }
                }
                wanted = std::min(wanted, eligible);
            }
            while (targets.size() < wanted) {
                const double u = uniform01(rng);
                NodeId x = 0;
                if (u < beta1) {
                    x = edges[uniform_index(rng, num_edges)].dst;
                } else if (u < beta1 + beta2) {
                    x = edges[uniform_index(rng, num_edges)].src;
                } else {
                    x = static_cast<NodeId>(uniform_index(rng, t));
                }
                if (!chosen[x]) {
                    chosen[x] = true;
                    targets.push_back(x);
                }
            }
            for (NodeId x : targets) {
                chosen[x] = false;
            }
        }
        for (NodeId x : targets) {
            add(t, x);
        }
    }
    return DirectedGraph::from_edges(n, edges);
}

DirectedGraph generate(const GeneratorParams& params, std::uint64_t seed) {
    return std::visit(
        [seed](const auto& p) -> DirectedGraph {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, DerParams>) {
                return gen_der(p, seed);
            } else if constexpr (std::is_same_v<T, DwsParams>) {
                return gen_dws(p, seed);
            } else {
                return gen_dsf(p, seed);
            }
        },
        params);
}

std::string describe(const GeneratorParams& params) {
    return std::visit(
        [](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, DerParams>) {
                return "DER(n=" + std::to_string(p.n) + ",p0=" + format_number(p.p0) +
                       ",r=" + format_number(p.reciprocity) + ")";
            } else if constexpr (std::is_same_v<T, DwsParams>) {
                return "DWS(n=" + std::to_string(p.n) + ",k=" + std::to_string(p.k) +
                       ",p0=" + format_number(p.p0) + ")";
            } else {
                return "DSF(n=" + std::to_string(p.n) + ",m0=" + std::to_string(p.m0) +
                       ",p0=" + format_number(p.p0_init) + ",m=" + std::to_string(p.m) +
                       ",beta=" + format_number(p.beta1) + "/" + format_number(p.beta2) + "/" +
                       format_number(p.beta3) + ")";
            }
        },
        params);
}

}  // namespace netmeasure
