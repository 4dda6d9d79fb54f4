#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "netmeasure/graph.hpp"

namespace netmeasure {

/// One sampled node. `weight` is the sampler's visiting-probability proxy:
/// the converged approximate PageRank for DNM, the out-degree for a classic
/// walk, and auxiliary degree + jump weight for DURW.
struct TraceEntry {
    NodeId node = 0;
    double weight = 0.0;
    /// Iteration (DNM) or walk step (RW, DURW) at which the node entered the sample.
    std::size_t step = 0;

    friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct SampleTrace {
    std::vector<TraceEntry> entries;
    std::size_t query_count = 0;
    /// |S| / n when the universe size is known.
    std::optional<double> sampling_rate;
    std::size_t iterations = 0;
    bool converged = true;
    bool budget_reached = false;
    /// Sample collapsed to the seed alone.
    bool degenerate = false;
    /// Walk ended before collecting the requested number of nodes.
    bool truncated = false;

    [[nodiscard]] std::size_t size() const noexcept { return entries.size(); }
    [[nodiscard]] bool empty() const noexcept { return entries.empty(); }

    friend bool operator==(const SampleTrace&, const SampleTrace&) = default;
};

/// "node weight step" lines (weights with 17 significant digits).
void write_trace(std::ostream& out, const SampleTrace& trace);
SampleTrace read_trace(std::istream& in);

}  // namespace netmeasure
