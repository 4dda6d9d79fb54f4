#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "netmeasure/access.hpp"
#include "netmeasure/baselines.hpp"
#include "netmeasure/errors.hpp"
#include "netmeasure/estimators.hpp"
#include "netmeasure/generators.hpp"
#include "netmeasure/graph.hpp"
#include "netmeasure/labels.hpp"

using namespace netmeasure;

namespace {

std::vector<NodeId> nodes_of(const SampleTrace& t) {
    std::vector<NodeId> out;
    for (const auto& e : t.entries) {
        out.push_back(e.node);
    }
    return out;
}

DirectedGraph out_star(std::size_t leaves) {
    std::vector<Edge> edges;
    for (NodeId leaf = 1; leaf <= leaves; ++leaf) {
        edges.push_back({0, leaf});
    }
    return DirectedGraph::from_edges(leaves + 1, edges);
}

}  // namespace

TEST_CASE("walk on a two-cycle alternates") {
    const std::vector<Edge> edges{{0, 1}, {1, 0}};
    const auto g = DirectedGraph::from_edges(2, edges);
    GraphAccess access(g);
    const auto t = rw_sample(access, 0, {4, SinkPolicy::restart}, 1);
    CHECK(nodes_of(t) == std::vector<NodeId>{0, 1, 0, 1});
    CHECK(t.entries[3].step == 3);
    CHECK(t.entries[0].weight == 1.0);
    CHECK(t.query_count == 2);
}

TEST_CASE("walk stops or restarts at a sink") {
    const auto g = out_star(5);
    {
        GraphAccess access(g);
        const auto t = rw_sample(access, 0, {10, SinkPolicy::terminate}, 3);
        CHECK(t.size() == 2);
        CHECK(t.truncated);
        CHECK(t.entries[1].weight == 1.0);  // sink counted as degree 1
    }
    {
        GraphAccess access(g);
        const auto t = rw_sample(access, 0, {10, SinkPolicy::restart}, 3);
        CHECK(t.size() == 10);
        CHECK_FALSE(t.truncated);
        for (std::size_t i = 0; i < t.size(); ++i) {
            CHECK((t.entries[i].node == 0) == (i % 2 == 0));
        }
    }
}

TEST_CASE("walk on a regular graph weights every visit equally") {
    const auto g = gen_dws({300, 5, 0.0}, 1);
    GraphAccess access(g);
    const auto t = rw_sample(access, 7, {500, SinkPolicy::restart}, 2);
    std::vector<double> values(300);
    for (NodeId x = 0; x < 300; ++x) {
        values[x] = std::sin(static_cast<double>(x));
    }
    const LabelFunction f(values);
    double plain = 0.0;
    for (const auto& e : t.entries) {
        CHECK(e.weight == 5.0);
        plain += f(e.node);
    }
    plain /= static_cast<double>(t.size());
    CHECK(e_dir_value(t.entries, f, WeightingMode::inverse) == doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("walk reveals only visited nodes") {
    const auto g = gen_der({400, 0.02, 0.6}, 3);
    GraphAccess access(g);
    const auto t = rw_sample(access, 0, {300, SinkPolicy::restart}, 4);
    const auto visited = nodes_of(t);
    const std::set<NodeId> seen(visited.begin(), visited.end());
    for (NodeId x : access.reveal_log()) {
        CHECK(seen.count(x) == 1);
    }
    CHECK(access.reveal_log().size() == seen.size());
}

TEST_CASE("DURW with a huge jump weight draws uniform nodes") {
    const auto g = gen_der({50, 0.1, 0.6}, 1);
    GraphAccess access(g);
    const UniformNodeOracle oracle(50);
    const auto t = durw_sample(access, oracle, {1e12, 1.0, 50000.0}, 5);
    CHECK(t.size() == 50001);
    std::vector<double> counts(50, 0.0);
    for (const auto& e : t.entries) {
        counts[e.node] += 1.0;
    }
    const double expected = static_cast<double>(t.size()) / 50.0;
    for (double c : counts) {
        CHECK(std::abs(c - expected) < 5.0 * std::sqrt(expected));
    }
    std::vector<double> values(50);
    for (NodeId x = 0; x < 50; ++x) {
        values[x] = static_cast<double>(x % 7);
    }
    const LabelFunction f(values);
    double plain = 0.0;
    for (const auto& e : t.entries) {
        plain += f(e.node);
    }
    plain /= static_cast<double>(t.size());
    CHECK(e_dir_value(t.entries, f, WeightingMode::inverse) == doctest::Approx(plain).epsilon(1e-9));
}

TEST_CASE("DURW always jumps from a node without auxiliary edges") {
    const auto g = DirectedGraph::from_edges(20, {});
    GraphAccess access(g);
    const auto t = durw_sample(access, UniformNodeOracle(20), {10.0, 1.0, 30.0}, 2);
    CHECK(t.size() == 31);  // free start plus 30 unit jumps
    for (const auto& e : t.entries) {
        CHECK(e.weight == 10.0);
    }
}

TEST_CASE("DURW visits fewer nodes as jumps get dearer") {
    const auto g = gen_der({1000, 0.01, 0.6}, 6);
    std::vector<double> mean_distinct;
    for (double cost : {1.0, 10.0, 50.0}) {
        double total = 0.0;
        for (std::uint64_t seed = 1; seed <= 30; ++seed) {
            GraphAccess access(g);
            (void)durw_sample(access, UniformNodeOracle(1000), {10.0, cost, 200.0}, seed);
            total += static_cast<double>(access.num_visited());
        }
        mean_distinct.push_back(total / 30.0);
    }
    CHECK(mean_distinct[0] >= mean_distinct[1]);
    CHECK(mean_distinct[1] >= mean_distinct[2]);
}

TEST_CASE("DURW visit frequencies follow auxiliary degree") {
    // With jumps nearly switched off the walk is a simple random walk on the
    // auxiliary graph, whose time-average occupancy is proportional to degree.
    const auto g = gen_der({100, 0.08, 1.0}, 7);
    REQUIRE(is_weakly_connected(g));
    GraphAccess access(g);
    const double w = 1e-6;
    const auto t = durw_sample(access, UniformNodeOracle(100), {w, 1.0, 1e6}, 8);
    REQUIRE(access.num_visited() == 100);

    std::vector<double> degree(100, 0.0);
    for (const auto& e : t.entries) {
        degree[e.node] = std::max(degree[e.node], e.weight - w);
    }
    const std::size_t burn = t.size() / 2;
    std::vector<double> freq(100, 0.0);
    for (std::size_t i = burn; i < t.size(); ++i) {
        freq[t.entries[i].node] += 1.0;
    }
    double degree_total = 0.0;
    for (double d : degree) {
        degree_total += d;
    }
    double tv = 0.0;
    for (NodeId x = 0; x < 100; ++x) {
        tv += std::abs(freq[x] / static_cast<double>(t.size() - burn) - degree[x] / degree_total);
    }
    tv *= 0.5;
    MESSAGE("total variation " << tv);
    CHECK(tv < 0.02);
}

TEST_CASE("baseline parameter checks") {
    const auto g = out_star(3);
    GraphAccess access(g);
    CHECK_THROWS_AS(rw_sample(access, 0, {0, SinkPolicy::restart}, 1), ParameterError);
    CHECK_THROWS_AS(rw_sample(access, 9, {5, SinkPolicy::restart}, 1), ParameterError);
    const UniformNodeOracle oracle(4);
    CHECK_THROWS_AS(durw_sample(access, oracle, {0.0, 1.0, 10.0}, 1), ParameterError);
    CHECK_THROWS_AS(durw_sample(access, oracle, {1.0, 0.5, 10.0}, 1), ParameterError);
    CHECK_THROWS_AS(durw_sample(access, oracle, {1.0, 20.0, 10.0}, 1), ParameterError);
}
