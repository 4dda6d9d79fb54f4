#include "netmeasure/access.hpp"

#include <string>

#include "netmeasure/errors.hpp"

namespace netmeasure {

GraphAccess::GraphAccess(const DirectedGraph& graph)
    : graph_(&graph), visited_(graph.num_nodes(), false) {}

void GraphAccess::visit(NodeId x) {
    if (!contains(x)) {
        throw ParameterError("node " + std::to_string(x) + " is not in the graph");
    }
    if (!visited_[x]) {
        visited_[x] = true;
        ++num_visited_;
    }
}

bool GraphAccess::visited(NodeId x) const {
    return contains(x) && visited_[x];
}

std::span<const NodeId> GraphAccess::out_links(NodeId x) {
    if (!visited(x)) {
        throw AccessViolation("out-links of unvisited node " + std::to_string(x) + " requested");
    }
    reveal_log_.push_back(x);
    return graph_->out_neighbors(x);
}

}  // namespace netmeasure
