#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace netmeasure {

using NodeId = std::uint32_t;

struct Edge {
    NodeId src;
    NodeId dst;

    friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

/// Counts of edges discarded while building a graph.
struct BuildStats {
    std::size_t duplicates = 0;
    std::size_t self_loops = 0;
};

/// Immutable directed graph over dense ids [0, n), stored as sorted CSR.
/// No duplicate edges, no self-loops.
class DirectedGraph {
public:
    DirectedGraph() = default;

    /// Duplicate edges and self-loops in `edges` are dropped and counted in `stats`.
    static DirectedGraph from_edges(std::size_t num_nodes, std::span<const Edge> edges,
                                    BuildStats* stats = nullptr);

    [[nodiscard]] std::size_t num_nodes() const noexcept { return in_degree_.size(); }
    [[nodiscard]] std::size_t num_edges() const noexcept { return targets_.size(); }

    /// Sorted ascending.
    [[nodiscard]] std::span<const NodeId> out_neighbors(NodeId x) const noexcept {
        return {targets_.data() + offsets_[x], targets_.data() + offsets_[x + 1]};
    }
    [[nodiscard]] std::size_t out_degree(NodeId x) const noexcept {
        return offsets_[x + 1] - offsets_[x];
    }
    [[nodiscard]] std::size_t in_degree(NodeId x) const noexcept { return in_degree_[x]; }
    [[nodiscard]] bool has_edge(NodeId src, NodeId dst) const noexcept;

    /// All edges sorted by (src, dst).
    [[nodiscard]] std::vector<Edge> edges() const;

    /// Reverse index: the graph with every edge flipped.
    [[nodiscard]] DirectedGraph transpose() const;

private:
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeId> targets_;
    std::vector<std::size_t> in_degree_;
};

struct EdgeListLoad {
    DirectedGraph graph;
    /// original_ids[i] is the id used in the file for dense node i.
    std::vector<std::uint64_t> original_ids;
    BuildStats dropped;
    std::size_t edge_lines = 0;
};

/// Parses "src dst" lines; '#' lines and blank lines are skipped. Ids are
/// compacted to [0, n) in ascending order of the original ids.
EdgeListLoad load_edge_list(std::istream& in);
EdgeListLoad load_edge_list(const std::filesystem::path& path);

/// Writes one "src dst" line per edge sorted by (src, dst).
void write_edge_list(std::ostream& out, const DirectedGraph& g);
void write_edge_list(const std::filesystem::path& path, const DirectedGraph& g);

/// Fraction of directed links whose reverse link also exists.
/// Throws UndefinedValueError on an edgeless graph.
double reciprocity(const DirectedGraph& g);

/// Component label for every node of the undirected projection; labels are
/// numbered in order of each component's lowest node id.
std::vector<std::size_t> weak_component_labels(const DirectedGraph& g);

bool is_weakly_connected(const DirectedGraph& g);

struct Subgraph {
    DirectedGraph graph;
    /// original[i] is the id in the parent graph of node i.
    std::vector<NodeId> original;
};

/// Largest weakly connected component (ties go to the one holding the lowest id).
Subgraph largest_weak_component(const DirectedGraph& g);

/// Induced subgraph on `nodes`, relabelled in the given order.
Subgraph induced_subgraph(const DirectedGraph& g, std::span<const NodeId> nodes);

}  // namespace netmeasure
