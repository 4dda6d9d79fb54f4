#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "netmeasure/graph.hpp"

namespace netmeasure {

/// Crawl session over a graph: out-links are revealed only for nodes the
/// crawler has visited. Single-owner; create one per sampling run.
class GraphAccess {
public:
    explicit GraphAccess(const DirectedGraph& graph);

    void visit(NodeId x);
    [[nodiscard]] bool visited(NodeId x) const;
    [[nodiscard]] std::size_t num_visited() const noexcept { return num_visited_; }

    /// Reveals the out-neighbors of a visited node and counts one query.
    /// Throws AccessViolation if `x` has not been visited.
    std::span<const NodeId> out_links(NodeId x);

    [[nodiscard]] std::size_t query_count() const noexcept { return reveal_log_.size(); }
    /// Node whose links were revealed, one entry per query.
    [[nodiscard]] const std::vector<NodeId>& reveal_log() const noexcept { return reveal_log_; }

    /// Size of the underlying universe. Samplers use it only to validate ids and
    /// to report realized sampling rates, never to pick nodes.
    [[nodiscard]] std::size_t universe_size() const noexcept { return graph_->num_nodes(); }
    [[nodiscard]] bool contains(NodeId x) const noexcept { return x < graph_->num_nodes(); }

private:
    const DirectedGraph* graph_;
    std::vector<bool> visited_;
    std::size_t num_visited_ = 0;
    std::vector<NodeId> reveal_log_;
};

}  // namespace netmeasure
