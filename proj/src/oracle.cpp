#include "memnet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <tuple>

#include "memnet/error.hpp"

namespace memnet::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_weight(double a, double b) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

struct SearchTree {
    std::vector<double> dist;
    std::vector<std::int64_t> pred_node;  // node index
    std::vector<EdgeId> pred_edge;
};

SearchTree run_dijkstra(const Network& net, NodeId src, Metric metric) {
    const std::size_t n = net.node_count();
    SearchTree t{std::vector<double>(n, kInf), std::vector<std::int64_t>(n, -1), std::vector<EdgeId>(n, 0)};
    using Item = std::tuple<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    std::vector<char> done(n, 0);
    t.dist[net.node_index(src)] = 0.0;
    heap.emplace(0.0, src);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        const std::size_t iu = net.node_index(u);
        if (done[iu]) continue;
        done[iu] = 1;
        for (EdgeId eid : net.incident(u)) {
            const Edge& e = net.edge(eid);
            const NodeId v = net.other_end(e, u);
            const std::size_t iv = net.node_index(v);
            if (done[iv]) continue;
            const double nd = d + edge_weight(e, metric);
            const bool better = nd < t.dist[iv] && !same_weight(nd, t.dist[iv]);
            const bool tie = same_weight(nd, t.dist[iv]) &&
                             u < net.nodes()[static_cast<std::size_t>(t.pred_node[iv])].id;
            if (better || tie) {
                if (better) t.dist[iv] = nd;
                t.pred_node[iv] = static_cast<std::int64_t>(iu);
                t.pred_edge[iv] = eid;
                if (better) heap.emplace(nd, v);
            }
        }
    }
    return t;
}

}  // namespace

double edge_weight(const Edge& e, Metric metric) {
    return metric == Metric::hop_count ? 1.0 : e.length;
}

std::vector<double> distances_from(const Network& net, NodeId src, Metric metric) {
    return run_dijkstra(net, src, metric).dist;
}

GraphPath dijkstra(const Network& net, NodeId src, NodeId dst, Metric metric) {
    const SearchTree t = run_dijkstra(net, src, metric);
    const std::size_t id = net.node_index(dst);
    if (t.dist[id] == kInf)
        throw DisconnectedTerminals("dijkstra: nodes " + std::to_string(src) + " and " +
                                    std::to_string(dst) + " are not connected");
    GraphPath p;
    p.weight = t.dist[id];
    std::size_t cur = id;
    p.nodes.push_back(dst);
    while (t.pred_node[cur] >= 0) {
        p.edges.push_back(t.pred_edge[cur]);
        cur = static_cast<std::size_t>(t.pred_node[cur]);
        p.nodes.push_back(net.nodes()[cur].id);
    }
    std::reverse(p.nodes.begin(), p.nodes.end());
    std::reverse(p.edges.begin(), p.edges.end());
    return p;
}

PathSet all_shortest_paths(const Network& net, NodeId src, NodeId dst, Metric metric,
                           std::size_t cap) {
    const std::vector<double> from_src = distances_from(net, src, metric);
    const std::vector<double> to_dst = distances_from(net, dst, metric);
    const double best = from_src[net.node_index(dst)];
    if (best == kInf) throw DisconnectedTerminals("all_shortest_paths: terminals not connected");

    PathSet out;
    out.weight = best;
    GraphPath cur;
    cur.nodes.push_back(src);
    // Depth-first walk over edges that stay on some shortest path; edges are
    // visited in incidence order, neighbours sorted by id for stable output.
    std::function<void(NodeId, double)> walk = [&](NodeId u, double w) {
        if (out.cap_hit) return;
        if (u == dst) {
            if (out.paths.size() >= cap) {
                out.cap_hit = true;
                return;
            }
            GraphPath p = cur;
            p.weight = w;
            out.paths.push_back(std::move(p));
            return;
        }
        std::vector<std::pair<NodeId, EdgeId>> next;
        for (EdgeId eid : net.incident(u)) {
            const Edge& e = net.edge(eid);
            const NodeId v = net.other_end(e, u);
            const double nw = w + edge_weight(e, metric);
            if (same_weight(nw, from_src[net.node_index(v)]) &&
                same_weight(nw + to_dst[net.node_index(v)], best))
                next.emplace_back(v, eid);
        }
        std::sort(next.begin(), next.end());
        for (const auto& [v, eid] : next) {
            cur.nodes.push_back(v);
            cur.edges.push_back(eid);
            walk(v, w + edge_weight(net.edge(eid), metric));
            cur.nodes.pop_back();
            cur.edges.pop_back();
        }
    };
    walk(src, 0.0);
    return out;
}

Tour brute_force_tsp(const std::vector<std::vector<double>>& d) {
    const std::size_t n = d.size();
    if (n < 3 || n > 15) throw InvalidArgument("brute_force_tsp: need 3..15 cities");
    for (const auto& row : d) {
        if (row.size() != n) throw InvalidArgument("brute_force_tsp: distance matrix not square");
        for (double v : row)
            if (!std::isfinite(v)) throw DisconnectedTerminals("brute_force_tsp: disconnected city pair");
    }
    // cost[mask][j]: shortest path from city 0 through `mask` (which always
    // contains 0 and j) ending at j.
    const std::size_t full = std::size_t{1} << n;
    std::vector<double> cost(full * n, kInf);
    std::vector<std::int8_t> parent(full * n, -1);
    cost[1 * n + 0] = 0.0;
    for (std::size_t mask = 1; mask < full; mask += 2) {
        for (std::size_t j = 0; j < n; ++j) {
            const double c = cost[mask * n + j];
            if (!(mask & (std::size_t{1} << j)) || c == kInf) continue;
            for (std::size_t k = 1; k < n; ++k) {
                if (mask & (std::size_t{1} << k)) continue;
                const std::size_t next = mask | (std::size_t{1} << k);
                const double nc = c + d[j][k];
                if (nc < cost[next * n + k]) {
                    cost[next * n + k] = nc;
                    parent[next * n + k] = static_cast<std::int8_t>(j);
                }
            }
        }
    }
    Tour t;
    t.length = kInf;
    std::size_t last = 0;
    for (std::size_t j = 1; j < n; ++j) {
        const double c = cost[(full - 1) * n + j] + d[j][0];
        if (c < t.length) {
            t.length = c;
            last = j;
        }
    }
    std::size_t mask = full - 1;
    std::size_t cur = last;
    while (cur != 0) {
        t.order.push_back(cur);
        const auto p = static_cast<std::size_t>(parent[mask * n + cur]);
        mask &= ~(std::size_t{1} << cur);
        cur = p;
    }
    t.order.push_back(0);
    std::reverse(t.order.begin(), t.order.end());
    return t;
}

std::vector<std::vector<double>> city_distances(const Network& net, std::span<const NodeId> cities,
                                                Metric metric) {
    std::vector<std::vector<double>> d(cities.size(), std::vector<double>(cities.size(), 0.0));
    for (std::size_t i = 0; i < cities.size(); ++i) {
        const std::vector<double> dist = distances_from(net, cities[i], metric);
        for (std::size_t j = 0; j < cities.size(); ++j) d[i][j] = dist[net.node_index(cities[j])];
    }
    return d;
}

SolveResult dense_solve(const Network& net, const SourceSpec& src) {
    const std::size_t n = net.node_count();
    if (n > 500) throw InvalidArgument("dense_solve: at most 500 nodes");
    if (src.fixed.empty()) throw InvalidArgument("dense_solve: no fixed node");

    SolveResult result;
    result.input = src.fixed.front().first;
    result.potentials.assign(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<char> fixed(n, 0);
    for (const auto& [id, v] : src.fixed) {
        fixed[net.node_index(id)] = 1;
        result.potentials[net.node_index(id)] = v;
    }
    std::vector<std::size_t> row_of(n, n);
    std::vector<std::size_t> free_nodes;
    for (std::size_t i = 0; i < n; ++i)
        if (!fixed[i]) {
            row_of[i] = free_nodes.size();
            free_nodes.push_back(i);
        }
    const std::size_t m = free_nodes.size();
    // Augmented matrix [G | b].
    std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
    for (const Edge& e : net.edges()) {
        const double g = 1.0 / e.unit.a.x + 1.0 / e.unit.b.x;
        const std::size_t p = net.node_index(e.from), q = net.node_index(e.to);
        const std::size_t rp = row_of[p], rq = row_of[q];
        if (rp < m) a[rp][rp] += g;
        if (rq < m) a[rq][rq] += g;
        if (rp < m && rq < m) {
            a[rp][rq] -= g;
            a[rq][rp] -= g;
        }
        if (rp < m && rq == n) a[rp][m] += g * result.potentials[q];
        if (rq < m && rp == n) a[rq][m] += g * result.potentials[p];
    }
    double scale = 0.0;
    for (const auto& row : a)
        for (std::size_t j = 0; j < m; ++j) scale = std::max(scale, std::abs(row[j]));
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) <= 1e-13 * scale)
            throw SingularSystem("dense_solve: singular system (floating component)");
        std::swap(a[piv], a[col]);
        for (std::size_t r = col + 1; r < m; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t j = col; j <= m; ++j) a[r][j] -= f * a[col][j];
        }
    }
    std::vector<double> x(m, 0.0);
    for (std::size_t r = m; r-- > 0;) {
        double s = a[r][m];
        for (std::size_t j = r + 1; j < m; ++j) s -= a[r][j] * x[j];
        x[r] = s / a[r][r];
    }
    for (std::size_t k = 0; k < m; ++k) result.potentials[free_nodes[k]] = x[k];
    // Currents and residual computed here rather than through the circuit
    // module so the oracle shares no code with the solver it checks.
    result.edge_currents.assign(net.edge_count(), 0.0);
    std::vector<double> outflow(n, 0.0);
    for (std::size_t k = 0; k < net.edge_count(); ++k) {
        const Edge& e = net.edges()[k];
        const std::size_t a = net.node_index(e.from), b = net.node_index(e.to);
        const double g = 1.0 / e.unit.a.x + 1.0 / e.unit.b.x;
        const double i = (result.potentials[a] - result.potentials[b]) * g;
        result.edge_currents[k] = i;
        outflow[a] += i;
        outflow[b] -= i;
    }
    result.source_current = outflow[net.node_index(result.input)];
    result.kcl_residual = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (!fixed[i]) result.kcl_residual = std::max(result.kcl_residual, std::abs(outflow[i]));
    return result;
}

}  // namespace memnet::oracle
