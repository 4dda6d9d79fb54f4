#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>

#include "netmeasure/graph.hpp"

namespace netmeasure {

/// Directed Erdos-Renyi with reciprocity reduced to a target.
struct DerParams {
    std::size_t n = 2000;
    double p0 = 0.1;
    double reciprocity = 0.6;
};

/// Directed Watts-Strogatz: clockwise k-nearest ring with random rewiring.
struct DwsParams {
    std::size_t n = 2000;
    std::size_t k = 20;
    double p0 = 0.1;
};

/// Directed scale-free growth with mixed in/out/uniform attachment.
struct DsfParams {
    std::size_t n = 1000;
    std::size_t m0 = 2;
    double p0_init = 1.0;
    std::size_t m = 25;
    double beta1 = 0.7;
    double beta2 = 0.2;
    double beta3 = 0.1;
};

using GeneratorParams = std::variant<DerParams, DwsParams, DsfParams>;

/// Every unordered pair is linked in both directions with probability p0; then
/// random reciprocal pairs lose one uniformly chosen direction until
/// reciprocity(g) <= target.
DirectedGraph gen_der(const DerParams& params, std::uint64_t seed);

/// Ring lattice i -> i+1..i+k (mod n); each link is rewired with probability p0
/// to a link between two uniformly drawn nodes (self-loops and duplicates redrawn).
DirectedGraph gen_dws(const DwsParams& params, std::uint64_t seed);

/// Directed Erdos-Renyi seed on m0 nodes, then each new node links out to m
/// distinct existing nodes drawn by
///   p1(x) = beta1 d_in(x)/|E| + beta2 d_out(x)/|E| + beta3/|V|.
/// While fewer than m nodes exist the new node links to all of them.
DirectedGraph gen_dsf(const DsfParams& params, std::uint64_t seed);

DirectedGraph generate(const GeneratorParams& params, std::uint64_t seed);

std::string describe(const GeneratorParams& params);

}  // namespace netmeasure
