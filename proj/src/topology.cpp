#include "memnet/topology.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <string>
#include <unordered_set>

#include "memnet/error.hpp"

namespace memnet {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Network::Network(DeviceParams params) : params_(params) { params_.validate(); }

NodeId Network::add_node(Point position) {
    const auto id = static_cast<NodeId>(node_lookup_.size());
    insert_node(Node{id, position});
    return id;
}

EdgeId Network::add_edge(NodeId from, NodeId to) {
    if (!has_node(from) || !has_node(to)) throw InvalidArgument("add_edge: unknown endpoint");
    Edge e;
    e.id = static_cast<EdgeId>(edge_lookup_.size());
    e.from = from;
    e.to = to;
    e.unit = BasicUnit::off(params_);
    e.length = distance(node(from).position, node(to).position);
    insert_edge(e);
    return e.id;
}

void Network::insert_node(const Node& n) {
    if (!std::isfinite(n.position.x) || !std::isfinite(n.position.y))
        throw InvalidArgument("node position must be finite");
    if (has_node(n.id)) throw InvalidArgument("duplicate node id " + std::to_string(n.id));
    if (node_lookup_.size() <= n.id) node_lookup_.resize(n.id + 1, -1);
    node_lookup_[n.id] = static_cast<std::int64_t>(nodes_.size());
    nodes_.push_back(n);
    adjacency_.emplace_back();
}

void Network::insert_edge(const Edge& e) {
    if (has_edge(e.id)) throw InvalidArgument("duplicate edge id " + std::to_string(e.id));
    if (e.from == e.to) throw InvalidArgument("edge endpoints must be distinct");
    if (!has_node(e.from) || !has_node(e.to)) throw InvalidArgument("edge endpoint not in network");
    if (find_edge(e.from, e.to)) throw InvalidArgument("duplicate edge between node pair");
    if (!(e.length > 0.0)) throw InvalidArgument("edge length must be positive");
    if (edge_lookup_.size() <= e.id) edge_lookup_.resize(e.id + 1, -1);
    edge_lookup_[e.id] = static_cast<std::int64_t>(edges_.size());
    edges_.push_back(e);
    adjacency_[node_index(e.from)].push_back(e.id);
    adjacency_[node_index(e.to)].push_back(e.id);
}

bool Network::has_node(NodeId id) const {
    return id < node_lookup_.size() && node_lookup_[id] >= 0;
}

bool Network::has_edge(EdgeId id) const {
    return id < edge_lookup_.size() && edge_lookup_[id] >= 0;
}

std::size_t Network::node_index(NodeId id) const {
    if (!has_node(id)) throw InvalidArgument("unknown node id " + std::to_string(id));
    return static_cast<std::size_t>(node_lookup_[id]);
}

std::size_t Network::edge_index(EdgeId id) const {
    if (!has_edge(id)) throw InvalidArgument("unknown edge id " + std::to_string(id));
    return static_cast<std::size_t>(edge_lookup_[id]);
}

std::span<const EdgeId> Network::incident(NodeId id) const { return adjacency_[node_index(id)]; }

std::optional<EdgeId> Network::find_edge(NodeId a, NodeId b) const {
    if (!has_node(a) || !has_node(b)) return std::nullopt;
    for (EdgeId eid : incident(a)) {
        const Edge& e = edge(eid);
        if ((e.from == a && e.to == b) || (e.from == b && e.to == a)) return eid;
    }
    return std::nullopt;
}

void Network::set_params(const DeviceParams& params) {
    params.validate();
    params_ = params;
    reset_states();
}

void Network::reset_states() {
    for (Edge& e : edges_) e.unit = BasicUnit::off(params_);
}

Network generate_grid(int rows, int cols, const DeviceParams& params) {
    if (rows < 2 || cols < 2) throw InvalidArgument("grid needs rows >= 2 and cols >= 2");
    Network net(params);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) net.add_node(Point{double(c), double(r)});
    auto id = [cols](int r, int c) { return static_cast<NodeId>(r * cols + c); };
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c + 1 < cols; ++c) net.add_edge(id(r, c), id(r, c + 1));
    for (int r = 0; r + 1 < rows; ++r)
        for (int c = 0; c < cols; ++c) net.add_edge(id(r, c), id(r + 1, c));
    net.set_grid(GridShape{rows, cols});
    return net;
}

Network generate_random(int n_scale, std::uint64_t seed, const DeviceParams& params,
                        const RandomNetworkOptions& opt) {
    if (n_scale < 2) throw InvalidArgument("random network needs n_scale >= 2");
    if (!(opt.min_dist > 0.0) || !(opt.connect_radius > 0.0))
        throw InvalidArgument("random network distances must be positive");
    const double side = n_scale;
    const std::size_t target = opt.node_count != 0
                                   ? opt.node_count
                                   : static_cast<std::size_t>(std::lround(opt.density * side * side));

    // Cell list with cell size >= connect radius and min distance.
    const double cell = std::max(opt.min_dist, opt.connect_radius);
    const int ncell = std::max(1, static_cast<int>(std::ceil(side / cell)));
    std::vector<std::vector<std::size_t>> cells(static_cast<std::size_t>(ncell * ncell));
    auto cell_of = [&](double v) { return std::clamp(static_cast<int>(v / cell), 0, ncell - 1); };

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(0.0, side);
    std::vector<Point> points;
    points.reserve(target);
    std::size_t rejections = 0;
    while (points.size() < target) {
        const Point p{coord(rng), coord(rng)};
        const int cx = cell_of(p.x), cy = cell_of(p.y);
        bool ok = true;
        for (int dy = -1; dy <= 1 && ok; ++dy)
            for (int dx = -1; dx <= 1 && ok; ++dx) {
                const int x = cx + dx, y = cy + dy;
                if (x < 0 || y < 0 || x >= ncell || y >= ncell) continue;
                for (std::size_t k : cells[static_cast<std::size_t>(y * ncell + x)])
                    if (distance(points[k], p) < opt.min_dist) {
                        ok = false;
                        break;
                    }
            }
        if (!ok) {
            if (++rejections >= opt.max_consecutive_rejections)
                throw SamplingFailure("random network: placed " + std::to_string(points.size()) +
                                      " of " + std::to_string(target) + " nodes before " +
                                      std::to_string(rejections) + " consecutive rejections");
            continue;
        }
        rejections = 0;
        cells[static_cast<std::size_t>(cy * ncell + cx)].push_back(points.size());
        points.push_back(p);
    }

    Network net(params);
    for (const Point& p : points) net.add_node(p);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const int cx = cell_of(points[i].x), cy = cell_of(points[i].y);
        std::vector<std::size_t> near;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int x = cx + dx, y = cy + dy;
                if (x < 0 || y < 0 || x >= ncell || y >= ncell) continue;
                for (std::size_t k : cells[static_cast<std::size_t>(y * ncell + x)])
                    if (k > i && distance(points[i], points[k]) < opt.connect_radius) near.push_back(k);
            }
        std::sort(near.begin(), near.end());
        for (std::size_t k : near) net.add_edge(static_cast<NodeId>(i), static_cast<NodeId>(k));
    }
    return net;
}

Network remove_edges(const Network& net, std::span<const EdgeId> edge_ids) {
    std::unordered_set<EdgeId> drop;
    for (EdgeId id : edge_ids) {
        if (!net.has_edge(id)) throw InvalidArgument("remove_edges: unknown edge id " + std::to_string(id));
        if (!drop.insert(id).second)
            throw InvalidArgument("remove_edges: duplicate edge id " + std::to_string(id));
    }
    Network out(net.params());
    for (const Node& n : net.nodes()) out.insert_node(n);
    for (const Edge& e : net.edges())
        if (!drop.contains(e.id)) out.insert_edge(e);
    out.set_grid(net.grid());
    return out;
}

Network reduced_network(const Network& net, std::span<const EdgeId> on_edges) {
    if (on_edges.empty()) throw InvalidArgument("reduced_network: empty edge set");
    std::vector<EdgeId> keep(on_edges.begin(), on_edges.end());
    for (EdgeId id : keep)
        if (!net.has_edge(id)) throw InvalidArgument("reduced_network: unknown edge id " + std::to_string(id));
    std::sort(keep.begin(), keep.end(), [&](EdgeId a, EdgeId b) { return net.edge_index(a) < net.edge_index(b); });
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());

    std::vector<char> used(net.node_count(), 0);
    for (EdgeId id : keep) {
        const Edge& e = net.edge(id);
        used[net.node_index(e.from)] = 1;
        used[net.node_index(e.to)] = 1;
    }
    Network out(net.params());
    for (std::size_t i = 0; i < net.node_count(); ++i)
        if (used[i]) out.insert_node(net.nodes()[i]);
    for (EdgeId id : keep) {
        Edge e = net.edge(id);
        e.unit = BasicUnit::off(net.params());
        out.insert_edge(e);
    }
    return out;
}

std::vector<int> component_labels(const Network& net) {
    std::vector<int> label(net.node_count(), -1);
    int next = 0;
    for (std::size_t start = 0; start < net.node_count(); ++start) {
        if (label[start] >= 0) continue;
        std::queue<std::size_t> q;
        q.push(start);
        label[start] = next;
        while (!q.empty()) {
            const std::size_t i = q.front();
            q.pop();
            const NodeId id = net.nodes()[i].id;
            for (EdgeId eid : net.incident(id)) {
                const std::size_t j = net.node_index(net.other_end(net.edge(eid), id));
                if (label[j] < 0) {
                    label[j] = next;
                    q.push(j);
                }
            }
        }
        ++next;
    }
    return label;
}

bool connected(const Network& net, NodeId a, NodeId b) {
    const std::size_t ia = net.node_index(a);
    const std::size_t ib = net.node_index(b);
    if (ia == ib) return true;
    std::vector<char> seen(net.node_count(), 0);
    std::queue<NodeId> q;
    q.push(a);
    seen[ia] = 1;
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop();
        for (EdgeId eid : net.incident(u)) {
            const NodeId v = net.other_end(net.edge(eid), u);
            const std::size_t iv = net.node_index(v);
            if (iv == ib) return true;
            if (!seen[iv]) {
                seen[iv] = 1;
                q.push(v);
            }
        }
    }
    return false;
}

NodeId nearest_node(const Network& net, Point p) {
    if (net.node_count() == 0) throw InvalidArgument("nearest_node: empty network");
    const Node* best = &net.nodes()[0];
    double best_d = distance(best->position, p);
    for (const Node& n : net.nodes()) {
        const double d = distance(n.position, p);
        if (d < best_d || (d == best_d && n.id < best->id)) {
            best = &n;
            best_d = d;
        }
    }
    return best->id;
}

}  // namespace memnet
