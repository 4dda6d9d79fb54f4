#include "netmeasure/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "netmeasure/errors.hpp"

namespace netmeasure {

DirectedGraph DirectedGraph::from_edges(std::size_t num_nodes, std::span<const Edge> edges,
                                        BuildStats* stats) {
    std::vector<Edge> sorted;
    sorted.reserve(edges.size());
    BuildStats local;
    for (const Edge& e : edges) {
        if (e.src >= num_nodes || e.dst >= num_nodes) {
            throw ParameterError("edge endpoint outside node range");
        }
        if (e.src == e.dst) {
            ++local.self_loops;
            continue;
        }
        sorted.push_back(e);
    }
    std::sort(sorted.begin(), sorted.end());
    const auto last = std::unique(sorted.begin(), sorted.end());
    local.duplicates = static_cast<std::size_t>(sorted.end() - last);
    sorted.erase(last, sorted.end());

    DirectedGraph g;
    g.offsets_.assign(num_nodes + 1, 0);
    g.in_degree_.assign(num_nodes, 0);
    g.targets_.reserve(sorted.size());
    for (const Edge& e : sorted) {
        ++g.offsets_[e.src + 1];
        ++g.in_degree_[e.dst];
        g.targets_.push_back(e.dst);
    }
    std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
    if (stats != nullptr) {
        *stats = local;
    }
    return g;
}

bool DirectedGraph::has_edge(NodeId src, NodeId dst) const noexcept {
    if (src >= num_nodes()) {
        return false;
    }
    const auto nbrs = out_neighbors(src);
    return std::binary_search(nbrs.begin(), nbrs.end(), dst);
}

std::vector<Edge> DirectedGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges());
    for (NodeId x = 0; x < num_nodes(); ++x) {
        for (NodeId y : out_neighbors(x)) {
            out.push_back({x, y});
        }
    }
    return out;
}

DirectedGraph DirectedGraph::transpose() const {
    std::vector<Edge> flipped;
    flipped.reserve(num_edges());
    for (NodeId x = 0; x < num_nodes(); ++x) {
        for (NodeId y : out_neighbors(x)) {
            flipped.push_back({y, x});
        }
    }
    return from_edges(num_nodes(), flipped);
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool next_token(std::string_view& rest, std::string_view& token) {
    const auto first = rest.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return false;
    }
    rest.remove_prefix(first);
    const auto end = rest.find_first_of(" \t\r");
    token = rest.substr(0, end);
    rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
    return true;
}

std::uint64_t parse_id(std::string_view token, std::size_t line_no) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw ParseError(line_no, "expected non-negative integer node id, got '" +
                                      std::string(token) + "'");
    }
    return value;
}

}  // namespace

EdgeListLoad load_edge_list(std::istream& in) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view rest = trim(line);
        if (rest.empty() || rest.front() == '#') {
            continue;
        }
        std::string_view a, b, extra;
        if (!next_token(rest, a) || !next_token(rest, b)) {
            throw ParseError(line_no, "expected 'src dst'");
        }
        if (next_token(rest, extra)) {
            throw ParseError(line_no, "unexpected trailing token '" + std::string(extra) + "'");
        }
        raw.emplace_back(parse_id(a, line_no), parse_id(b, line_no));
    }

    EdgeListLoad result;
    result.edge_lines = raw.size();
    auto& ids = result.original_ids;
    ids.reserve(raw.size() * 2);
    for (const auto& [s, d] : raw) {
        ids.push_back(s);
        ids.push_back(d);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.size() > std::numeric_limits<NodeId>::max()) {
        throw ParseError(line_no, "too many distinct node ids");
    }
    auto dense = [&ids](std::uint64_t id) {
        return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
    };
    std::vector<Edge> edges;
    edges.reserve(raw.size());
    for (const auto& [s, d] : raw) {
        edges.push_back({dense(s), dense(d)});
    }
    result.graph = DirectedGraph::from_edges(ids.size(), edges, &result.dropped);
    return result;
}

EdgeListLoad load_edge_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open edge list " + path.string());
    }
    return load_edge_list(in);
}

void write_edge_list(std::ostream& out, const DirectedGraph& g) {
    std::string buffer;
    for (NodeId x = 0; x < g.num_nodes(); ++x) {
        for (NodeId y : g.out_neighbors(x)) {
            buffer.clear();
            buffer += std::to_string(x);
            buffer += ' ';
            buffer += std::to_string(y);
            buffer += '\n';
            out << buffer;
        }
    }
}

void write_edge_list(const std::filesystem::path& path, const DirectedGraph& g) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write edge list " + path.string());
    }
    write_edge_list(out, g);
}

double reciprocity(const DirectedGraph& g) {
    if (g.num_edges() == 0) {
        throw UndefinedValueError("reciprocity of a graph without edges");
    }
    std::size_t reciprocal = 0;
    for (NodeId x = 0; x < g.num_nodes(); ++x) {
        for (NodeId y : g.out_neighbors(x)) {
            if (g.has_edge(y, x)) {
                ++reciprocal;
            }
        }
    }
    return static_cast<double>(reciprocal) / static_cast<double>(g.num_edges());
}

namespace {

struct DisjointSets {
    std::vector<NodeId> parent;

    explicit DisjointSets(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), NodeId{0});
    }

    NodeId find(NodeId x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    void unite(NodeId a, NodeId b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return;
        }
        // Lower id becomes the root.
        if (b < a) {
            std::swap(a, b);
        }
        parent[b] = a;
    }
};

}  // namespace

std::vector<std::size_t> weak_component_labels(const DirectedGraph& g) {
    const std::size_t n = g.num_nodes();
    DisjointSets sets(n);
    for (NodeId x = 0; x < n; ++x) {
        for (NodeId y : g.out_neighbors(x)) {
            sets.unite(x, y);
        }
    }
    constexpr auto unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> label_of_root(n, unset);
    std::vector<std::size_t> labels(n);
    std::size_t next = 0;
    for (NodeId x = 0; x < n; ++x) {
        const NodeId root = sets.find(x);
        if (label_of_root[root] == unset) {
            label_of_root[root] = next++;
        }
        labels[x] = label_of_root[root];
    }
    return labels;
}

bool is_weakly_connected(const DirectedGraph& g) {
    const auto labels = weak_component_labels(g);
    return std::all_of(labels.begin(), labels.end(), [](std::size_t l) { return l == 0; });
}

Subgraph induced_subgraph(const DirectedGraph& g, std::span<const NodeId> nodes) {
    constexpr auto absent = static_cast<NodeId>(-1);
    std::vector<NodeId> local(g.num_nodes(), absent);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        local[nodes[i]] = static_cast<NodeId>(i);
    }
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (NodeId y : g.out_neighbors(nodes[i])) {
            if (local[y] != absent) {
                edges.push_back({static_cast<NodeId>(i), local[y]});
            }
        }
    }
    Subgraph sub;
    sub.graph = DirectedGraph::from_edges(nodes.size(), edges);
    sub.original.assign(nodes.begin(), nodes.end());
    return sub;
}

Subgraph largest_weak_component(const DirectedGraph& g) {
    const auto labels = weak_component_labels(g);
    if (labels.empty()) {
        return {};
    }
    std::vector<std::size_t> sizes(*std::max_element(labels.begin(), labels.end()) + 1, 0);
    for (std::size_t l : labels) {
        ++sizes[l];
    }
    const auto best =
        static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    std::vector<NodeId> keep;
    keep.reserve(sizes[best]);
    for (NodeId x = 0; x < g.num_nodes(); ++x) {
        if (labels[x] == best) {
            keep.push_back(x);
        }
    }
    return induced_subgraph(g, keep);
}

}  // namespace netmeasure
