#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "memnet/algorithms.hpp"
#include "memnet/analysis.hpp"
#include "memnet/dynamics.hpp"
#include "memnet/error.hpp"
#include "memnet/oracle.hpp"
#include "memnet/topology.hpp"

using namespace memnet;

namespace {

Network single_unit() {
    Network net;
    net.add_edge(net.add_node({0.0, 0.0}), net.add_node({1.0, 0.0}));
    return net;
}

// Time for the switching device of a lone unit to travel r_off -> r_on at
// constant voltage v, every device driven by the full unit current.
// RK4 on dx/dt = -gamma * (v * (1/x + 1/r_off) - I_t).
double lone_unit_switch_time(const DeviceParams& p, double v) {
    auto f = [&](double x) { return -p.gamma * (v * (1.0 / x + 1.0 / p.r_off) - p.i_threshold); };
    double x = p.r_off, t = 0.0;
    const double h = 1e-8;
    while (true) {
        const double k1 = f(x), k2 = f(x + 0.5 * h * k1), k3 = f(x + 0.5 * h * k2), k4 = f(x + h * k3);
        const double next = x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        if (next <= p.r_on) return t + h * (x - p.r_on) / (x - next);
        x = next;
        t += h;
    }
}

std::vector<double> unit_resistances(const Network& net) {
    std::vector<double> r;
    for (const Edge& e : net.edges()) r.push_back(e.unit.resistance());
    return r;
}

PulseOutcome fig2_pulse(double fraction, std::size_t stride = 1) {
    SimConfig cfg;
    cfg.max_change_fraction = fraction;
    cfg.record_stride = stride;
    return apply_pulse(generate_grid(11, 11), PulseSpec{55, 65, 6.0, std::nullopt}, cfg);
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("zero amplitude is steady after one step") {
    const Network net = generate_grid(3, 3);
    const PulseOutcome r = apply_pulse(net, PulseSpec{0, 8, 0.0, std::nullopt}, SimConfig{});
    CHECK(r.trajectory.reached_steady);
    CHECK(r.trajectory.status == PulseStatus::steady);
    CHECK(r.trajectory.steps_taken == 1);
    CHECK(unit_resistances(r.network) == unit_resistances(net));
}

TEST_CASE("lone unit switches ON at 6 V") {
    const Network net = single_unit();
    const DeviceParams& p = net.params();
    const PulseOutcome r = apply_pulse(net, PulseSpec{0, 1, 6.0, std::nullopt}, SimConfig{});
    REQUIRE(r.trajectory.reached_steady);
    const BasicUnit& u = r.network.edges()[0].unit;
    CHECK(std::min(u.a.x, u.b.x) == doctest::Approx(p.r_on));
    CHECK(std::max(u.a.x, u.b.x) == doctest::Approx(p.r_off));
    CHECK(u.resistance() == doctest::Approx(200.0 / 21.0).epsilon(1e-12));

    // First sample at the ON value against the integrated ODE.
    const Trajectory& tr = r.trajectory;
    double t_on = -1.0;
    for (std::size_t s = 0; s < tr.sample_count(); ++s)
        if (tr.resistances[s][0] <= p.unit_on_resistance() * (1 + 1e-12)) {
            t_on = tr.times[s];
            break;
        }
    REQUIRE(t_on > 0.0);
    CHECK(t_on == doctest::Approx(lone_unit_switch_time(p, 6.0)).epsilon(0.03));
}

TEST_CASE("sub-threshold pulse leaves a lone unit OFF") {
    // 0.9 V gives 9 mA through the OFF unit, under I_t.
    const PulseOutcome r = apply_pulse(single_unit(), PulseSpec{0, 1, 0.9, std::nullopt}, SimConfig{});
    CHECK(r.trajectory.steps_taken == 1);
    CHECK(r.network.edges()[0].unit.resistance() == doctest::Approx(100.0));
}

TEST_CASE("steady state is permanent") {
    const PulseOutcome r = fig2_pulse(0.01);
    REQUIRE(r.trajectory.reached_steady);
    const PulseOutcome again = apply_pulse(r.network, PulseSpec{55, 65, 6.0, std::nullopt}, SimConfig{});
    CHECK(again.trajectory.steps_taken == 1);
    CHECK(unit_resistances(again.network) == unit_resistances(r.network));
}

TEST_CASE("middle-row pulse settles on a straight ON chain") {
    const PulseOutcome r = fig2_pulse(0.01);
    REQUIRE(r.trajectory.reached_steady);
    std::vector<EdgeId> on = classify_on(r.network);
    std::vector<EdgeId> straight;
    for (EdgeId e : oracle::dijkstra(r.network, 55, 65, oracle::Metric::hop_count).edges) straight.push_back(e);
    std::sort(on.begin(), on.end());
    std::sort(straight.begin(), straight.end());
    CHECK(on == straight);
    CHECK(r.trajectory.max_relative_residual <= 1e-9);
}

TEST_CASE("sample count follows the record stride") {
    for (std::size_t stride : {1u, 7u, 50u}) {
        const PulseOutcome r = fig2_pulse(0.01, stride);
        CHECK(r.trajectory.sample_count() == r.trajectory.steps_taken / stride + 1);
        CHECK(r.trajectory.times.front() == 0.0);
        CHECK(std::is_sorted(r.trajectory.times.begin(), r.trajectory.times.end()));
    }
}

TEST_CASE("halving the step changes middle-row final states by < 1% of the range") {
    const Network a = fig2_pulse(0.01).network;
    const Network b = fig2_pulse(0.005).network;
    const double range = a.params().r_off - a.params().r_on;
    double worst = 0.0;
    for (std::size_t k = 0; k < a.edge_count(); ++k) {
        worst = std::max(worst, std::abs(a.edges()[k].unit.a.x - b.edges()[k].unit.a.x));
        worst = std::max(worst, std::abs(a.edges()[k].unit.b.x - b.edges()[k].unit.b.x));
    }
    CHECK(worst < 0.01 * range);
}

TEST_CASE("minimum resistance along the solution path never increases") {
    const PulseOutcome r = fig2_pulse(0.01);
    const auto path = oracle::dijkstra(r.network, 55, 65, oracle::Metric::hop_count).edges;
    std::vector<std::size_t> cols;
    for (EdgeId e : path)
        cols.push_back(static_cast<std::size_t>(
            std::find(r.trajectory.edge_ids.begin(), r.trajectory.edge_ids.end(), e) - r.trajectory.edge_ids.begin()));
    double prev = INFINITY;
    bool monotone = true;
    for (const auto& row : r.trajectory.resistances) {
        double m = INFINITY;
        for (std::size_t c : cols) m = std::min(m, row[c]);
        monotone = monotone && m <= prev;
        prev = m;
    }
    CHECK(monotone);
}

TEST_CASE("path switches from both ends toward the interior") {
    const PulseOutcome r = fig2_pulse(0.01);
    const auto path = oracle::dijkstra(r.network, 55, 65, oracle::Metric::hop_count).edges;
    const auto times = first_crossing_times(r.trajectory, path, r.network.params().unit_on_threshold());
    std::vector<double> t;
    for (const auto& x : times) {
        REQUIRE(x.has_value());
        t.push_back(*x);
    }
    const auto last = std::max_element(t.begin(), t.end()) - t.begin();
    CHECK(last > 0);
    CHECK(last < static_cast<std::ptrdiff_t>(t.size()) - 1);
}

TEST_CASE("disconnected terminals and bad pulses throw") {
    Network net = generate_grid(2, 2);
    net.insert_node(Node{99, {5.0, 5.0}});
    CHECK_THROWS_AS(apply_pulse(net, PulseSpec{0, 99, 1.0, std::nullopt}, SimConfig{}), DisconnectedTerminals);
    CHECK_THROWS_AS(apply_pulse(net, PulseSpec{0, 0, 1.0, std::nullopt}, SimConfig{}), InvalidArgument);
    CHECK_THROWS_AS(apply_pulse(net, PulseSpec{0, 3, NAN, std::nullopt}, SimConfig{}), InvalidArgument);
    SimConfig bad;
    bad.max_steps = 0;
    CHECK_THROWS_AS(apply_pulse(net, PulseSpec{0, 3, 1.0, std::nullopt}, bad), InvalidArgument);
}

TEST_CASE("step budget exhaustion is reported with the partial state") {
    SimConfig cfg;
    cfg.max_steps = 5;
    const PulseOutcome r = apply_pulse(generate_grid(11, 11), PulseSpec{55, 65, 6.0, std::nullopt}, cfg);
    CHECK(r.trajectory.status == PulseStatus::max_steps_exhausted);
    CHECK_FALSE(r.trajectory.reached_steady);
    CHECK(r.trajectory.steps_taken == 5);
}

TEST_CASE("fixed duration stops at the duration") {
    const double full = lone_unit_switch_time(DeviceParams{}, 6.0);
    const PulseOutcome r = apply_pulse(single_unit(), PulseSpec{0, 1, 6.0, 0.5 * full}, SimConfig{});
    CHECK(r.trajectory.status == PulseStatus::duration_elapsed);
    CHECK(r.trajectory.elapsed == doctest::Approx(0.5 * full));
    const double res = r.network.edges()[0].unit.resistance();
    CHECK(res < 100.0);
    CHECK(res > 200.0 / 21.0);
}

TEST_CASE("empty sequence leaves the network unchanged") {
    const Network net = generate_grid(4, 4);
    const SequenceOutcome r = run_pulse_sequence(net, {}, SimConfig{});
    CHECK(r.pulses.empty());
    CHECK(unit_resistances(r.network) == unit_resistances(net));
}

TEST_CASE("repeated pulse needs no more steps than the first") {
    const std::array<PulseSpec, 2> pulses{PulseSpec{55, 65, 6.0, std::nullopt}, PulseSpec{55, 65, 6.0, std::nullopt}};
    const SequenceOutcome r = run_pulse_sequence(generate_grid(11, 11), pulses, SimConfig{});
    REQUIRE(r.pulses.size() == 2);
    CHECK(r.pulses[0].status == PulseStatus::steady);
    CHECK(r.pulses[1].steps <= r.pulses[0].steps);
}

TEST_CASE("unipolar sequence never raises a unit resistance") {
    const Network net = generate_random(8, 3);
    std::vector<NodeId> cities;
    for (Point p : {Point{1, 1}, Point{7, 1}, Point{4, 7}}) cities.push_back(nearest_node(net, p));
    REQUIRE(connected(net, cities[0], cities[1]));
    REQUIRE(connected(net, cities[0], cities[2]));
    SimConfig cfg;
    cfg.mode = DynamicsMode::unipolar;
    Network cur = net;
    for (const PulseSpec& p : random_pulse_schedule(cities, 12, 4.0, 5, 2e-5)) {
        const std::array<PulseSpec, 1> one{p};
        Network next = run_pulse_sequence(cur, one, cfg).network;
        for (std::size_t k = 0; k < next.edge_count(); ++k) {
            CHECK(next.edges()[k].unit.a.x <= cur.edges()[k].unit.a.x);
            CHECK(next.edges()[k].unit.b.x <= cur.edges()[k].unit.b.x);
        }
        cur = std::move(next);
    }
}

TEST_CASE("two cities give the same pair with both polarities") {
    const std::vector<NodeId> cities{3, 9};
    const auto s = random_pulse_schedule(cities, 200, 2.5, 11);
    REQUIRE(s.size() == 200);
    int pos = 0;
    for (const PulseSpec& p : s) {
        CHECK(((p.input == 3 && p.output == 9) || (p.input == 9 && p.output == 3)));
        CHECK(std::abs(p.amplitude) == 2.5);
        pos += p.amplitude > 0;
    }
    CHECK(pos > 0);
    CHECK(pos < 200);
}

TEST_CASE("schedule is deterministic in the seed") {
    const std::vector<NodeId> cities{1, 2, 3, 4, 5};
    const auto a = random_pulse_schedule(cities, 50, 1.0, 42, 1e-4);
    const auto b = random_pulse_schedule(cities, 50, 1.0, 42, 1e-4);
    const auto c = random_pulse_schedule(cities, 50, 1.0, 43, 1e-4);
    auto same = [](const auto& x, const auto& y) {
        for (std::size_t k = 0; k < x.size(); ++k)
            if (x[k].input != y[k].input || x[k].output != y[k].output || x[k].amplitude != y[k].amplitude ||
                x[k].duration != y[k].duration)
                return false;
        return x.size() == y.size();
    };
    CHECK(same(a, b));
    CHECK_FALSE(same(a, c));
}

TEST_CASE("six-city pair frequencies are uniform") {
    const std::vector<NodeId> cities{10, 20, 30, 40, 50, 60};
    std::map<std::pair<NodeId, NodeId>, int> counts;
    int total = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed)
        for (const PulseSpec& p : random_pulse_schedule(cities, 100, 1.0, seed)) {
            CHECK(p.input != p.output);
            ++counts[{std::min(p.input, p.output), std::max(p.input, p.output)}];
            ++total;
        }
    REQUIRE(counts.size() == 15);
    const double expected = total / 15.0;
    double chi2 = 0.0;
    for (const auto& [pair, n] : counts) chi2 += (n - expected) * (n - expected) / expected;
    // 14 degrees of freedom, p = 0.001
    CHECK(chi2 < 36.12);
}

TEST_CASE("schedule needs two cities") {
    const std::vector<NodeId> one{1};
    CHECK_THROWS_AS(random_pulse_schedule(one, 5, 1.0, 1), InvalidArgument);
}

TEST_CASE("amplitude resolution scales the onset") {
    const Network net = generate_grid(5, 5);
    const double onset = switching_onset_amplitude(net, 10, 14);
    const SolveResult at = solve_dc(net, SourceSpec::pair(10, 14, onset));
    double imax = 0.0;
    for (double i : at.edge_currents) imax = std::max(imax, std::abs(i));
    CHECK(imax == doctest::Approx(net.params().i_threshold).epsilon(1e-9));
    CHECK(Amplitude::onset_multiple(2.0).resolve(net, 10, 14, ThresholdDrive::unit_current) ==
          doctest::Approx(2.0 * onset));
    CHECK(Amplitude::volts(3.0).resolve(net, 10, 14, ThresholdDrive::unit_current) == 3.0);
}

}  // TEST_SUITE
