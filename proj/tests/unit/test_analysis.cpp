#include <doctest.h>

#include <cmath>
#include <vector>

#include "memnet/analysis.hpp"
#include "memnet/error.hpp"
#include "memnet/oracle.hpp"
#include "memnet/topology.hpp"

using namespace memnet;

namespace {

// Independent entropy of a current vector.
double plain_entropy(const std::vector<double>& i) {
    double sum = 0.0;
    for (double v : i) sum += std::abs(v);
    double h = 0.0;
    for (double v : i)
        if (v != 0.0) {
            const double p = std::abs(v) / sum;
            h -= p * std::log(p);
        }
    return h;
}

Network chain(int n) {
    Network net;
    for (int k = 0; k < n; ++k) net.add_node({double(k), 0.0});
    for (NodeId k = 0; k + 1 < NodeId(n); ++k) net.add_edge(k, k + 1);
    return net;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("entropy limits") {
    CHECK(current_entropy(std::vector<double>(11, 0.3)) == doctest::Approx(std::log(11.0)).epsilon(1e-14));
    CHECK(std::log(11.0) == doctest::Approx(2.3979).epsilon(1e-4));
    CHECK(current_entropy(std::vector<double>{0, 0, 1.5, 0}) == 0.0);
    CHECK_THROWS_AS(current_entropy(std::vector<double>{0, 0}), ZeroCurrent);
}

TEST_CASE("entropy is scale invariant and uses magnitudes") {
    const std::vector<double> a{0.1, -0.4, 0.25, 0.0, 0.05};
    std::vector<double> b;
    for (double v : a) b.push_back(-7.5 * v);
    CHECK(current_entropy(a) == doctest::Approx(current_entropy(b)).epsilon(1e-12));
    CHECK(current_entropy(a) == doctest::Approx(plain_entropy(a)).epsilon(1e-14));
    CHECK(current_entropy(a) < std::log(5.0));
    CHECK(current_entropy(a) > 0.0);
}

TEST_CASE("grid cross sections") {
    const Network net = generate_grid(11, 11);
    const CrossSection s = grid_cross_section(net, 6, 55, 65);
    CHECK(s.edges.size() == 11);
    for (std::size_t k = 0; k < s.edges.size(); ++k) {
        const Edge& e = net.edge(s.edges[k]);
        CHECK(net.node(e.from).position.x + net.node(e.to).position.x == doctest::Approx(11.0));
        CHECK(std::abs(s.orientation[k]) == 1);
    }
    CHECK(grid_cross_section(generate_grid(2, 2), 1, 0, 1).edges.size() == 2);
    CHECK_THROWS_AS(grid_cross_section(net, 11, 55, 65), InvalidArgument);
    CHECK_THROWS_AS(grid_cross_section(net, 0, 55, 65), InvalidArgument);
}

TEST_CASE("all-OFF middle-row cross section") {
    const Network net = generate_grid(11, 11);
    const CrossSection s = grid_cross_section(net, 6, 55, 65);
    const SolveResult sparse = solve_dc(net, SourceSpec::pair(55, 65, 6.0));
    const SolveResult dense = oracle::dense_solve(net, SourceSpec::pair(55, 65, 6.0));
    std::vector<double> cut;
    for (EdgeId e : s.edges) cut.push_back(dense.edge_currents[net.edge_index(e)]);
    const double h = cross_section_entropy(net, sparse, s);
    CHECK(h == doctest::Approx(plain_entropy(cut)).epsilon(1e-12));
    CHECK(h > 0.0);
    CHECK(h < std::log(11.0));
    CHECK(h == doctest::Approx(2.3884030541985157).epsilon(1e-12));
    // mirror rows carry equal currents
    for (int row = 0; row < 5; ++row)
        CHECK(std::abs(cut[row]) == doctest::Approx(std::abs(cut[10 - row])).epsilon(1e-9));
}

TEST_CASE("full-network entropy") {
    Network one;
    one.add_edge(one.add_node({0, 0}), one.add_node({1, 0}));
    CHECK(full_network_entropy(solve_dc(one, SourceSpec::pair(0, 1, 1.0))) == doctest::Approx(0.0));
    const Network line = chain(6);
    CHECK(full_network_entropy(solve_dc(line, SourceSpec::pair(0, 5, 1.0))) ==
          doctest::Approx(std::log(5.0)).epsilon(1e-12));
}

TEST_CASE("entropy trace of the middle-row pulse") {
    const Network net = generate_grid(11, 11);
    const PulseOutcome r = apply_pulse(net, PulseSpec{55, 65, 6.0, std::nullopt}, SimConfig{});
    const CrossSection s = grid_cross_section(net, 6, 55, 65);
    const EntropyTrace cut = entropy_trace(r.trajectory, s);
    const EntropyTrace full = entropy_trace(r.trajectory, std::nullopt);
    REQUIRE(cut.values.size() == r.trajectory.sample_count());
    CHECK(cut.variant == EntropyTrace::Variant::cross_section);
    CHECK(full.variant == EntropyTrace::Variant::full_network);
    CHECK(cut.values.back() < cut.values.front());
    CHECK(full.values.back() < full.values.front());
    for (double v : cut.values) {
        CHECK(v >= 0.0);
        CHECK(v <= std::log(11.0) + 1e-12);
    }
}

TEST_CASE("single-path end state has zero entropy") {
    const Network line = chain(5);
    const PulseOutcome r = apply_pulse(line, PulseSpec{0, 4, 6.0, std::nullopt}, SimConfig{});
    const EntropyTrace t = entropy_trace(r.trajectory, CrossSection{{line.edges()[2].id}, {1}});
    CHECK(t.values.back() == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("switching rates and crossing times") {
    Trajectory tr;
    tr.edge_ids = {4, 9};
    tr.times = {0.0, 1.0, 3.0};
    tr.resistances = {{100.0, 100.0}, {80.0, 100.0}, {20.0, 100.0}};
    const auto rates = switching_rate_trace(tr, std::vector<EdgeId>{4, 9});
    REQUIRE(rates.size() == 2);
    CHECK(rates[0] == std::vector<double>{-20.0, -30.0});
    CHECK(rates[1] == std::vector<double>{0.0, 0.0});
    const auto first = first_crossing_times(tr, std::vector<EdgeId>{9, 4}, 30.0);
    CHECK_FALSE(first[0].has_value());
    CHECK(first[1] == 3.0);
    CHECK_THROWS_AS(switching_rate_trace(tr, std::vector<EdgeId>{5}), InvalidArgument);
}

}  // TEST_SUITE
