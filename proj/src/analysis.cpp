#include "memnet/analysis.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "memnet/error.hpp"

namespace memnet {

namespace {

std::size_t column_of(const Trajectory& traj, EdgeId id) {
    for (std::size_t k = 0; k < traj.edge_ids.size(); ++k)
        if (traj.edge_ids[k] == id) return k;
    throw InvalidArgument("edge " + std::to_string(id) + " not recorded in trajectory");
}

// Input-side flags by node index with `cut` edges removed.
std::vector<char> input_side(const Network& net, NodeId input, const std::vector<char>& cut) {
    std::vector<char> side(net.node_count(), 0);
    std::queue<NodeId> q;
    q.push(input);
    side[net.node_index(input)] = 1;
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop();
        for (EdgeId eid : net.incident(u)) {
            if (cut[net.edge_index(eid)]) continue;
            const NodeId v = net.other_end(net.edge(eid), u);
            if (!side[net.node_index(v)]) {
                side[net.node_index(v)] = 1;
                q.push(v);
            }
        }
    }
    return side;
}

}  // namespace

CrossSection grid_cross_section(const Network& net, int column, NodeId input, NodeId output) {
    if (!net.grid()) throw InvalidArgument("grid_cross_section: network is not a grid");
    const GridShape g = *net.grid();
    const int cin = static_cast<int>(input) % g.cols;
    const int cout = static_cast<int>(output) % g.cols;
    const int lo = std::min(cin, cout), hi = std::max(cin, cout);
    if (column < 1 || column >= g.cols || column <= lo || column > hi)
        throw InvalidArgument("grid_cross_section: column " + std::to_string(column) +
                              " does not lie between the terminal columns");

    CrossSection cs;
    std::vector<char> cut(net.edge_count(), 0);
    for (int r = 0; r < g.rows; ++r) {
        const auto left = static_cast<NodeId>(r * g.cols + column - 1);
        if (auto e = net.find_edge(left, left + 1)) {
            cs.edges.push_back(*e);
            cut[net.edge_index(*e)] = 1;
        }
    }
    const std::vector<char> side = input_side(net, input, cut);
    if (side[net.node_index(output)])
        throw InvalidArgument("grid_cross_section: cut does not separate the terminals");
    for (EdgeId id : cs.edges)
        cs.orientation.push_back(side[net.node_index(net.edge(id).from)] ? 1 : -1);
    return cs;
}

double current_entropy(std::span<const double> currents) {
    double total = 0.0;
    for (double i : currents) total += std::abs(i);
    if (!(total > 0.0)) throw ZeroCurrent("entropy undefined: no current flows");
    double s = 0.0;
    for (double i : currents) {
        const double p = std::abs(i) / total;
        if (p > 0.0) s -= p * std::log(p);
    }
    return s;
}

double cross_section_entropy(const Network& net, const SolveResult& result, const CrossSection& section) {
    std::vector<double> i;
    i.reserve(section.edges.size());
    for (std::size_t k = 0; k < section.edges.size(); ++k)
        i.push_back(section.orientation[k] * result.current(net, section.edges[k]));
    return current_entropy(i);
}

double full_network_entropy(const SolveResult& result) { return current_entropy(result.edge_currents); }

EntropyTrace entropy_trace(const Trajectory& traj, const std::optional<CrossSection>& section) {
    EntropyTrace out;
    out.variant = section ? EntropyTrace::Variant::cross_section : EntropyTrace::Variant::full_network;
    std::vector<std::size_t> cols;
    if (section)
        for (EdgeId id : section->edges) cols.push_back(column_of(traj, id));
    std::vector<double> picked(cols.size());
    for (std::size_t s = 0; s < traj.sample_count(); ++s) {
        out.times.push_back(traj.times[s]);
        std::span<const double> values = traj.currents[s];
        if (section) {
            for (std::size_t k = 0; k < cols.size(); ++k) picked[k] = traj.currents[s][cols[k]];
            values = picked;
        }
        try {
            out.values.push_back(current_entropy(values));
        } catch (const ZeroCurrent&) {
            out.values.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    return out;
}

std::vector<std::vector<double>> switching_rate_trace(const Trajectory& traj, std::span<const EdgeId> edges) {
    std::vector<std::vector<double>> out;
    for (EdgeId id : edges) {
        const std::size_t c = column_of(traj, id);
        std::vector<double> rate;
        for (std::size_t s = 1; s < traj.sample_count(); ++s) {
            const double dt = traj.times[s] - traj.times[s - 1];
            rate.push_back(dt > 0.0 ? (traj.resistances[s][c] - traj.resistances[s - 1][c]) / dt : 0.0);
        }
        out.push_back(std::move(rate));
    }
    return out;
}

std::vector<std::optional<double>> first_crossing_times(const Trajectory& traj, std::span<const EdgeId> edges,
                                                        double threshold) {
    std::vector<std::optional<double>> out;
    for (EdgeId id : edges) {
        const std::size_t c = column_of(traj, id);
        std::optional<double> t;
        for (std::size_t s = 0; s < traj.sample_count() && !t; ++s)
            if (traj.resistances[s][c] <= threshold) t = traj.times[s];
        out.push_back(t);
    }
    return out;
}

}  // namespace memnet
