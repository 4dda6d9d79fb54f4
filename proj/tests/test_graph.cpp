#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "netmeasure/access.hpp"
#include "netmeasure/errors.hpp"
#include "netmeasure/generators.hpp"
#include "netmeasure/graph.hpp"
#include "netmeasure/labels.hpp"
#include "netmeasure/rng.hpp"

using namespace netmeasure;

namespace {

DirectedGraph parse(const std::string& text) {
    std::istringstream in(text);
    return load_edge_list(in).graph;
}

}  // namespace

TEST_CASE("edge list load: triangle") {
    std::istringstream in("1 2\n2 3\n3 1\n");
    const auto load = load_edge_list(in);
    CHECK(load.graph.num_nodes() == 3);
    CHECK(load.graph.num_edges() == 3);
    CHECK(load.original_ids == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(load.graph.has_edge(0, 1));
    CHECK(load.graph.has_edge(2, 0));
    CHECK_FALSE(load.graph.has_edge(1, 0));
}

TEST_CASE("edge list load: comments, duplicates and self-loops") {
    std::istringstream in("# Directed graph\n# Nodes: 3 Edges: 4\n\n10 20\n10 20\n20 20\n20 30\n");
    const auto load = load_edge_list(in);
    CHECK(load.graph.num_nodes() == 3);
    CHECK(load.graph.num_edges() == 2);
    CHECK(load.dropped.duplicates == 1);
    CHECK(load.dropped.self_loops == 1);
    CHECK(load.edge_lines == 4);
}

TEST_CASE("edge list load: malformed line reports its number") {
    std::istringstream in("1 2\n3 x\n");
    try {
        (void)load_edge_list(in);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    std::istringstream negative("1 2\n-3 4\n");
    CHECK_THROWS_AS(load_edge_list(negative), ParseError);
}

TEST_CASE("reciprocity examples") {
    CHECK(reciprocity(parse("1 2\n2 3\n3 1\n")) == 0.0);
    CHECK(reciprocity(parse("1 2\n2 1\n")) == 1.0);
    CHECK(reciprocity(parse("1 2\n2 1\n2 3\n3 4\n")) == 0.5);
    CHECK_THROWS_AS(reciprocity(DirectedGraph::from_edges(3, {})), UndefinedValueError);
}

TEST_CASE("weak connectivity") {
    CHECK(is_weakly_connected(parse("1 2\n3 2\n")));
    CHECK_FALSE(is_weakly_connected(parse("1 2\n3 4\n")));
    const std::vector<Edge> edges{{0, 1}, {2, 3}, {3, 4}, {4, 2}};
    const auto g = DirectedGraph::from_edges(6, edges);
    const auto labels = weak_component_labels(g);
    CHECK(labels == std::vector<std::size_t>{0, 0, 1, 1, 1, 2});
    const auto big = largest_weak_component(g);
    CHECK(big.graph.num_nodes() == 3);
    CHECK(big.graph.num_edges() == 3);
    CHECK(big.original == std::vector<NodeId>{2, 3, 4});
    CHECK(is_weakly_connected(big.graph));
}

TEST_CASE("out-links are revealed only for visited nodes") {
    const auto g = parse("1 2\n2 3\n3 1\n");
    GraphAccess access(g);
    CHECK_THROWS_AS(access.out_links(0), AccessViolation);
    CHECK(access.query_count() == 0);
    access.visit(0);
    const auto out = access.out_links(0);
    CHECK(std::vector<NodeId>(out.begin(), out.end()) == std::vector<NodeId>{1});
    CHECK(access.query_count() == 1);
    CHECK(access.reveal_log() == std::vector<NodeId>{0});
    CHECK(access.num_visited() == 1);
    access.visit(0);
    CHECK(access.num_visited() == 1);
}

TEST_CASE("write then load reproduces the edge set") {
    const auto g = gen_der({200, 0.05, 0.6}, 3);
    std::stringstream buf;
    write_edge_list(buf, g);
    const auto back = load_edge_list(buf).graph;
    CHECK(back.num_nodes() == g.num_nodes());
    CHECK(back.edges() == g.edges());
}

TEST_CASE("degree sums and transpose") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto g = gen_dsf({300, 2, 1.0, 5, 0.5, 0.3, 0.2}, seed);
        std::size_t out_sum = 0;
        std::size_t in_sum = 0;
        for (NodeId x = 0; x < g.num_nodes(); ++x) {
            out_sum += g.out_degree(x);
            in_sum += g.in_degree(x);
            const auto out = g.out_neighbors(x);
            CHECK(std::is_sorted(out.begin(), out.end()));
            CHECK(std::adjacent_find(out.begin(), out.end()) == out.end());
            CHECK(std::find(out.begin(), out.end(), x) == out.end());
        }
        CHECK(out_sum == g.num_edges());
        CHECK(in_sum == g.num_edges());
        const auto t = g.transpose();
        for (NodeId x = 0; x < g.num_nodes(); ++x) {
            CHECK(t.out_degree(x) == g.in_degree(x));
        }
        CHECK(t.transpose().edges() == g.edges());
        CHECK(reciprocity(t) == doctest::Approx(reciprocity(g)).epsilon(1e-15));
    }
}

TEST_CASE("reciprocity is invariant under node relabelling") {
    const auto g = gen_der({150, 0.08, 0.7}, 11);
    std::vector<NodeId> perm(g.num_nodes());
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(5);
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
        std::swap(perm[i], perm[uniform_index(rng, i + 1)]);
    }
    std::vector<Edge> relabelled;
    for (const Edge& e : g.edges()) {
        relabelled.push_back({perm[e.src], perm[e.dst]});
    }
    const auto h = DirectedGraph::from_edges(g.num_nodes(), relabelled);
    CHECK(h.num_edges() == g.num_edges());
    CHECK(reciprocity(h) == reciprocity(g));
}

TEST_CASE("label files round trip and reject gaps") {
    const LabelFunction f({0.0, 1.0, 0.25});
    std::stringstream buf;
    write_labels(buf, f);
    const auto back = read_labels(buf);
    CHECK(back.size() == 3);
    CHECK(back(2) == 0.25);
    CHECK(f.average() == doctest::Approx(1.25 / 3.0));
    std::istringstream gap("0 1\n2 1\n");
    CHECK_THROWS_AS(read_labels(gap), ParseError);
}

TEST_CASE("outdegree indicator") {
    const auto g = parse("1 2\n1 3\n2 3\n");
    const auto f = outdegree_indicator(g, 1);
    CHECK(f(0) == 0.0);
    CHECK(f(1) == 1.0);
    CHECK(f(2) == 0.0);
}
