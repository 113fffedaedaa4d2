#include "memnet/algorithms.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <string>

#include "memnet/error.hpp"
#include "memnet/oracle.hpp"

namespace memnet {

namespace {

// Adjacency of the ON subgraph, neighbours sorted by node id.
using OnGraph = std::map<NodeId, std::vector<std::pair<NodeId, EdgeId>>>;

OnGraph on_graph(const Network& net, std::span<const EdgeId> on_edges) {
    OnGraph g;
    for (EdgeId id : on_edges) {
        const Edge& e = net.edge(id);
        g[e.from].emplace_back(e.to, id);
        g[e.to].emplace_back(e.from, id);
    }
    for (auto& [n, nb] : g) std::sort(nb.begin(), nb.end());
    return g;
}

// Component label per ON node.
std::map<NodeId, int> on_components(const OnGraph& g) {
    std::map<NodeId, int> label;
    int next = 0;
    for (const auto& [start, nb] : g) {
        if (label.contains(start)) continue;
        std::queue<NodeId> q;
        q.push(start);
        label[start] = next;
        while (!q.empty()) {
            const NodeId u = q.front();
            q.pop();
            for (const auto& [v, e] : g.at(u))
                if (!label.contains(v)) {
                    label[v] = next;
                    q.push(v);
                }
        }
        ++next;
    }
    return label;
}

// Shortest input -> output distance inside the ON subgraph; infinity if none.
double on_distance(const Network& net, const OnGraph& g, NodeId src, NodeId dst, bool hops) {
    const double inf = std::numeric_limits<double>::infinity();
    if (!g.contains(src) || !g.contains(dst)) return inf;
    std::map<NodeId, double> dist;
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[src] = 0.0;
    heap.emplace(0.0, src);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        if (u == dst) return d;
        for (const auto& [v, e] : g.at(u)) {
            const double nd = d + (hops ? 1.0 : net.edge(e).length);
            auto it = dist.find(v);
            if (it == dist.end() || nd < it->second) {
                dist[v] = nd;
                heap.emplace(nd, v);
            }
        }
    }
    return inf;
}

bool edge_disjoint(const std::vector<EdgeId>& a, const std::vector<EdgeId>& b) {
    std::set<EdgeId> s(a.begin(), a.end());
    return std::none_of(b.begin(), b.end(), [&](EdgeId e) { return s.contains(e); });
}

}  // namespace

std::vector<EdgeId> classify_on(const Network& net) {
    const double cutoff = net.params().unit_on_threshold();
    std::vector<EdgeId> on;
    for (const Edge& e : net.edges())
        if (e.unit.resistance() <= cutoff) on.push_back(e.id);
    return on;
}

PathExtraction extract_paths(const Network& net, std::span<const EdgeId> on_edges, NodeId input, NodeId output,
                             std::size_t cap) {
    PathExtraction out;
    const OnGraph g = on_graph(net, on_edges);
    const std::map<NodeId, int> comp = on_components(g);

    for (const auto& [n, nb] : g)
        if (nb.size() == 1 && n != input && n != output) out.dead_ends.push_back(n);
    std::set<int> segments;
    for (const auto& [n, c] : comp) segments.insert(c);
    const auto in_comp = comp.find(input);
    out.disconnected_segments = segments.size() - (in_comp != comp.end() ? 1 : 0);

    if (!g.contains(input) || !g.contains(output)) return out;

    std::vector<NodeId> nodes{input};
    std::vector<EdgeId> edges;
    std::set<NodeId> on_path{input};
    // Descend only where the output is still reachable off the current path,
    // so every branch explored ends in a path and the cap bounds the work.
    auto reaches_output = [&](NodeId from) {
        std::set<NodeId> seen{from};
        std::vector<NodeId> stack{from};
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            if (u == output) return true;
            for (const auto& [v, e] : g.at(u))
                if (!on_path.contains(v) && seen.insert(v).second) stack.push_back(v);
        }
        return false;
    };
    std::function<void(NodeId)> walk = [&](NodeId u) {
        if (out.cap_hit) return;
        if (u == output) {
            if (out.paths.size() >= cap) {
                out.cap_hit = true;
                return;
            }
            out.paths.push_back(nodes);
            out.path_edges.push_back(edges);
            return;
        }
        for (const auto& [v, e] : g.at(u)) {
            if (out.cap_hit) return;
            if (on_path.contains(v)) continue;
            on_path.insert(v);
            if (!reaches_output(v)) {
                on_path.erase(v);
                continue;
            }
            nodes.push_back(v);
            edges.push_back(e);
            walk(v);
            nodes.pop_back();
            edges.pop_back();
            on_path.erase(v);
        }
    };
    walk(input);

    if (!out.path_edges.empty()) {
        std::size_t best = std::numeric_limits<std::size_t>::max();
        for (const auto& p : out.path_edges) best = std::min(best, p.size());
        std::vector<const std::vector<EdgeId>*> minimal;
        for (const auto& p : out.path_edges)
            if (p.size() == best) minimal.push_back(&p);
        for (std::size_t i = 0; i < minimal.size() && !out.degenerate; ++i)
            for (std::size_t j = i + 1; j < minimal.size(); ++j)
                if (edge_disjoint(*minimal[i], *minimal[j])) {
                    out.degenerate = true;
                    break;
                }
    }
    return out;
}

PathResult read_path_result(const Network& net, NodeId input, NodeId output, std::size_t cap) {
    PathResult r;
    r.on_edges = classify_on(net);
    PathExtraction x = extract_paths(net, r.on_edges, input, output, cap);
    r.paths = std::move(x.paths);
    r.path_edges = std::move(x.path_edges);
    r.degenerate = x.degenerate;
    r.cap_hit = x.cap_hit;
    r.dead_ends = std::move(x.dead_ends);
    r.disconnected_segments = x.disconnected_segments;
    for (const auto& p : r.path_edges) {
        double len = 0.0;
        for (EdgeId e : p) len += net.edge(e).length;
        r.hop_counts.push_back(p.size());
        r.lengths.push_back(len);
    }
    if (!r.paths.empty()) {
        const OnGraph g = on_graph(net, r.on_edges);
        r.hop_count = static_cast<std::size_t>(on_distance(net, g, input, output, true));
        r.geometric_length = on_distance(net, g, input, output, false);
    }
    return r;
}

namespace {

ShortestPathRun run_path_pulse(Network net, NodeId input, NodeId output, double amplitude, const SimConfig& cfg) {
    SimConfig c = cfg;
    c.mode = DynamicsMode::bipolar;
    PulseOutcome p = apply_pulse(std::move(net), PulseSpec{input, output, amplitude, std::nullopt}, c);
    PathResult r = read_path_result(p.network, input, output);
    if (r.paths.empty())
        throw NoSolution("no ON path joins nodes " + std::to_string(input) + " and " + std::to_string(output) +
                         " (" + std::to_string(r.on_edges.size()) + " edges ON, pulse " +
                         to_string(p.trajectory.status) + ")");
    return ShortestPathRun{std::move(p.network), std::move(p.trajectory), std::move(r)};
}

}  // namespace

ShortestPathRun solve_shortest_path(Network net, NodeId input, NodeId output, double amplitude,
                                    const SimConfig& cfg) {
    net.reset_states();
    return run_path_pulse(std::move(net), input, output, amplitude, cfg);
}

ShortestPathRun heal(Network net, NodeId input, NodeId output, double amplitude, const SimConfig& cfg) {
    return run_path_pulse(std::move(net), input, output, amplitude, cfg);
}

PostProcessRun post_process_path(const Network& net, std::span<const EdgeId> on_edges, NodeId input,
                                 NodeId output, const Amplitude& amplitude, const SimConfig& cfg,
                                 std::size_t passes) {
    if (on_edges.empty()) throw NoSolution("post_process: empty ON set");
    PostProcessRun out{net, std::vector<EdgeId>(on_edges.begin(), on_edges.end()), 0, {}, 0.0};
    std::sort(out.on_edges.begin(), out.on_edges.end());
    for (std::size_t pass = 0; pass < passes; ++pass) {
        Network reduced = reduced_network(out.network, out.on_edges);
        if (!reduced.has_node(input) || !reduced.has_node(output) || !connected(reduced, input, output))
            throw NoSolution("post_process: ON set does not join the terminals");
        const double volts = amplitude.resolve(reduced, input, output, cfg.drive);
        ShortestPathRun run = solve_shortest_path(std::move(reduced), input, output, volts, cfg);
        std::vector<EdgeId> next = run.result.on_edges;
        std::sort(next.begin(), next.end());
        ++out.passes_run;
        out.max_relative_residual = std::max(out.max_relative_residual, run.trajectory.max_relative_residual);
        out.network = std::move(run.network);
        out.result = std::move(run.result);
        const bool fixed_point = next == out.on_edges;
        out.on_edges = std::move(next);
        if (fixed_point) break;
    }
    if (out.passes_run == 0) out.result = read_path_result(out.network, input, output);
    return out;
}

std::pair<NodeId, NodeId> farthest_city_pair(const Network& net, std::span<const NodeId> cities) {
    if (cities.size() < 2) throw InvalidArgument("farthest_city_pair: need at least 2 cities");
    std::pair<NodeId, NodeId> best{cities[0], cities[1]};
    double best_d = -1.0;
    for (std::size_t i = 0; i < cities.size(); ++i)
        for (std::size_t j = i + 1; j < cities.size(); ++j) {
            const double d = distance(net.node(cities[i]).position, net.node(cities[j]).position);
            if (d > best_d) {
                best_d = d;
                best = {cities[i], cities[j]};
            }
        }
    return best;
}

double tsp_pulse_duration(const Network& net, std::span<const NodeId> cities, double amplitude,
                          const SimConfig& cfg, double fraction) {
    if (!(fraction > 0.0)) throw InvalidArgument("tsp_pulse_duration: fraction must be positive");
    const auto [a, b] = farthest_city_pair(net, cities);
    Network fresh = net;
    fresh.reset_states();
    SimConfig c = cfg;
    c.mode = DynamicsMode::unipolar;
    c.record_stride = c.max_steps;
    const PulseOutcome p = apply_pulse(std::move(fresh), PulseSpec{a, b, amplitude, std::nullopt}, c);
    return fraction * p.trajectory.elapsed;
}

TourExtraction extract_tour(const Network& net, std::span<const EdgeId> on_edges, std::span<const NodeId> cities) {
    TourExtraction out;
    const OnGraph g = on_graph(net, on_edges);
    const std::map<NodeId, int> comp = on_components(g);

    std::set<int> city_comps;
    for (NodeId c : cities) {
        auto it = comp.find(c);
        if (it != comp.end()) city_comps.insert(it->second);
    }
    std::set<int> all;
    for (const auto& [n, c] : comp) all.insert(c);
    out.stray_components = all.size() - city_comps.size();

    const bool all_cities_on =
        std::all_of(cities.begin(), cities.end(), [&](NodeId c) { return comp.contains(c); });
    if (!all_cities_on || city_comps.size() != 1) return out;
    const int cycle_comp = *city_comps.begin();
    for (const auto& [n, c] : comp)
        if (c == cycle_comp && g.at(n).size() != 2) return out;

    // Every node has degree 2 in a connected component: a single cycle.
    const NodeId start = cities.front();
    EdgeId via = g.at(start).front().second;
    NodeId cur = g.at(start).front().first;
    out.tour.push_back(start);
    out.tour_edges.push_back(via);
    while (cur != start) {
        out.tour.push_back(cur);
        const auto& nb = g.at(cur);
        const auto& step = nb[0].second == via ? nb[1] : nb[0];
        via = step.second;
        cur = step.first;
        out.tour_edges.push_back(via);
    }
    out.tour.push_back(start);
    for (EdgeId e : out.tour_edges) out.tour_length += net.edge(e).length;
    std::map<NodeId, std::size_t> city_index;
    for (std::size_t k = 0; k < cities.size(); ++k) city_index[cities[k]] = k;
    for (std::size_t i = 0; i + 1 < out.tour.size(); ++i)
        if (auto it = city_index.find(out.tour[i]); it != city_index.end()) out.order.push_back(it->second);
    out.valid = out.order.size() == cities.size();
    return out;
}

TourResult solve_tsp(const Network& net, std::span<const NodeId> cities, const TspSchedule& schedule,
                     const SimConfig& cfg, std::size_t passes) {
    if (cities.size() < 3) throw InvalidArgument("solve_tsp: need at least 3 cities");
    std::set<NodeId> unique(cities.begin(), cities.end());
    if (unique.size() != cities.size()) throw InvalidArgument("solve_tsp: duplicate city");
    for (NodeId c : cities)
        if (!connected(net, cities.front(), c))
            throw DisconnectedTerminals("solve_tsp: city " + std::to_string(c) + " is not connected");

    SimConfig c = cfg;
    c.mode = DynamicsMode::unipolar;

    TourResult out{{}, {}, {}, 0, {}, {}, 0, 0.0, net};

    auto run_stage = [&](Network stage) {
        stage.reset_states();
        const auto [a, b] = farthest_city_pair(stage, cities);
        const Amplitude& amp =
            out.stage_amplitudes.empty() ? schedule.amplitude : schedule.post_amplitude.value_or(schedule.amplitude);
        const double amplitude = amp.resolve(stage, a, b, c.drive);
        const double duration = schedule.duration
                                    ? *schedule.duration
                                    : tsp_pulse_duration(stage, cities, amplitude, c, schedule.duration_fraction);
        out.stage_amplitudes.push_back(amplitude);
        out.stage_durations.push_back(duration);
        const std::vector<PulseSpec> pulses =
            random_pulse_schedule(cities, schedule.n_pulses, amplitude, schedule.seed, duration);
        SequenceOutcome seq = run_pulse_sequence(std::move(stage), pulses, c);
        out.pulses_applied += seq.pulses.size();
        out.max_relative_residual = std::max(out.max_relative_residual, seq.max_relative_residual);
        return std::move(seq.network);
    };

    out.network = run_stage(net);
    out.on_edges = classify_on(out.network);
    std::sort(out.on_edges.begin(), out.on_edges.end());
    out.initial_on_edges = out.on_edges;

    for (std::size_t pass = 0; pass < passes && !out.on_edges.empty(); ++pass) {
        Network reduced = reduced_network(out.network, out.on_edges);
        const bool cities_joined = std::all_of(cities.begin(), cities.end(), [&](NodeId city) {
            return reduced.has_node(city) && connected(reduced, cities.front(), city);
        });
        if (!cities_joined) break;
        out.network = run_stage(std::move(reduced));
        std::vector<EdgeId> next = classify_on(out.network);
        std::sort(next.begin(), next.end());
        ++out.post_process_passes;
        const bool fixed_point = next == out.on_edges;
        out.on_edges = std::move(next);
        if (fixed_point) break;
    }
    out.tour = extract_tour(out.network, out.on_edges, cities);
    return out;
}

}  // namespace memnet
