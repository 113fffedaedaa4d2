#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "memnet/error.hpp"
#include "memnet/topology.hpp"

using namespace memnet;

namespace {

bool all_off(const Network& net) {
    return std::all_of(net.edges().begin(), net.edges().end(), [&](const Edge& e) {
        return e.unit.a.x == net.params().r_off && e.unit.b.x == net.params().r_off;
    });
}

}  // namespace

TEST_SUITE("topology") {

TEST_CASE("grid sizes") {
    struct Case {
        int rows, cols;
        std::size_t nodes, edges;
    };
    for (const Case c : {Case{2, 2, 4, 4}, Case{11, 11, 121, 220}, Case{3, 2, 6, 7}}) {
        const Network g = generate_grid(c.rows, c.cols);
        CHECK(g.node_count() == c.nodes);
        CHECK(g.edge_count() == c.edges);
        CHECK(g.edge_count() ==
              static_cast<std::size_t>(c.rows * (c.cols - 1) + c.cols * (c.rows - 1)));
        CHECK(all_off(g));
    }
    CHECK_THROWS_AS(generate_grid(1, 5), InvalidArgument);
}

TEST_CASE("grid layout") {
    const Network g = generate_grid(11, 11);
    CHECK(g.node(55).position == Point{0, 5});
    CHECK(g.node(65).position == Point{10, 5});
    for (const Edge& e : g.edges()) {
        CHECK(e.length == 1.0);
        CHECK(distance(g.node(e.from).position, g.node(e.to).position) == 1.0);
    }
    CHECK(g.grid() == GridShape{11, 11});
    // Each interior node has 4 incident units.
    CHECK(g.incident(60).size() == 4);
    CHECK(g.incident(0).size() == 2);
}

TEST_CASE("random network constraints") {
    for (std::uint64_t seed : {1u, 2u, 3u, 17u}) {
        const Network n = generate_random(12, seed);
        const auto nodes = n.nodes();
        CHECK(n.node_count() == static_cast<std::size_t>(std::lround(0.8 * 144)));
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            CHECK(nodes[i].position.x >= 0.0);
            CHECK(nodes[i].position.x <= 12.0);
            for (std::size_t j = i + 1; j < nodes.size(); ++j) {
                const double d = distance(nodes[i].position, nodes[j].position);
                CHECK(d >= 0.9);
                CHECK((d < 1.5) == n.find_edge(nodes[i].id, nodes[j].id).has_value());
            }
        }
        for (const Edge& e : n.edges()) {
            CHECK(e.length < 1.5);
            CHECK(e.length == distance(n.node(e.from).position, n.node(e.to).position));
        }
        CHECK(all_off(n));
    }
}

TEST_CASE("random network determinism") {
    const Network a = generate_random(20, 5), b = generate_random(20, 5), c = generate_random(20, 6);
    REQUIRE(a.node_count() == b.node_count());
    REQUIRE(a.edge_count() == b.edge_count());
    for (std::size_t k = 0; k < a.node_count(); ++k) CHECK(a.nodes()[k].position == b.nodes()[k].position);
    for (std::size_t k = 0; k < a.edge_count(); ++k) {
        CHECK(a.edges()[k].from == b.edges()[k].from);
        CHECK(a.edges()[k].to == b.edges()[k].to);
    }
    CHECK_FALSE(a.nodes()[0].position == c.nodes()[0].position);
}

TEST_CASE("random network sampling failure") {
    RandomNetworkOptions o;
    o.density = 2.0;  // far beyond any packing at 0.9 spacing
    o.max_consecutive_rejections = 200;
    CHECK_THROWS_AS(generate_random(5, 1, {}, o), SamplingFailure);
    CHECK_THROWS_AS(generate_random(1, 1), InvalidArgument);
}

TEST_CASE("remove edges") {
    const Network g = generate_grid(11, 11);
    const Network same = remove_edges(g, std::vector<EdgeId>{});
    CHECK(same.edge_count() == 220);
    const std::vector<EdgeId> cut{45, 55, 65};
    const Network d = remove_edges(g, cut);
    CHECK(d.edge_count() == 217);
    CHECK(d.node_count() == 121);
    for (EdgeId e : cut) CHECK_FALSE(d.has_edge(e));
    CHECK(d.has_edge(56));
    CHECK(d.edge(56).from == g.edge(56).from);
    CHECK_THROWS_AS(remove_edges(g, std::vector<EdgeId>{3, 3}), InvalidArgument);
    CHECK_THROWS_AS(remove_edges(g, std::vector<EdgeId>{999}), InvalidArgument);
}

TEST_CASE("remove edges keeps device states") {
    Network g = generate_grid(3, 3);
    g.edge(1).unit.b.x = 42.0;
    const Network d = remove_edges(g, std::vector<EdgeId>{0});
    CHECK(d.edge(1).unit.b.x == 42.0);
}

TEST_CASE("reduced network") {
    Network g = generate_grid(4, 4);
    g.edge(0).unit.b.x = 10.0;
    std::vector<EdgeId> all;
    for (const Edge& e : g.edges()) all.push_back(e.id);
    const Network r = reduced_network(g, all);
    CHECK(r.edge_count() == g.edge_count());
    CHECK(r.node_count() == g.node_count());
    CHECK(all_off(r));

    // Path 0-1-2-3 along the bottom row: edges 0, 1, 2.
    const std::vector<EdgeId> path{0, 1, 2};
    const Network p = reduced_network(g, path);
    CHECK(p.edge_count() == 3);
    CHECK(p.node_count() == 4);
    CHECK(p.has_node(3));
    const Network pp = reduced_network(p, path);
    CHECK(pp.edge_count() == p.edge_count());
    CHECK(pp.node_count() == p.node_count());
    CHECK_THROWS_AS(reduced_network(g, std::vector<EdgeId>{}), InvalidArgument);
}

TEST_CASE("connectivity") {
    Network n;
    const NodeId a = n.add_node({0, 0}), b = n.add_node({5, 5});
    CHECK(connected(n, a, a));
    CHECK_FALSE(connected(n, a, b));
    CHECK_THROWS_AS(connected(n, a, 77), InvalidArgument);
    const Network g = generate_grid(11, 11);
    for (NodeId x : {0u, 17u, 60u, 120u}) CHECK(connected(g, 55, x));
    const std::vector<int> labels = component_labels(n);
    CHECK(labels[0] != labels[1]);
}

TEST_CASE("edge insertion rules") {
    Network n;
    const NodeId a = n.add_node({0, 0}), b = n.add_node({1, 0});
    n.add_edge(a, b);
    CHECK_THROWS_AS(n.add_edge(b, a), InvalidArgument);
    CHECK_THROWS_AS(n.add_edge(a, a), InvalidArgument);
    const NodeId c = n.add_node({1, 0});
    CHECK_THROWS_AS(n.add_edge(b, c), InvalidArgument);  // zero length
}

TEST_CASE("nearest node") {
    const Network g = generate_grid(5, 5);
    CHECK(nearest_node(g, {2.2, 3.1}) == 17);
    CHECK(nearest_node(g, {0.5, 0.0}) == 0);  // tie goes to the smaller id
}

}
