#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "memnet/device.hpp"

namespace memnet {

// Stable identifiers. Ids survive damage and reduction; they are not
// positions in the node/edge arrays (use Network::node_index/edge_index).
using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

double distance(Point a, Point b);

struct Node {
    NodeId id = 0;
    Point position;
};

struct Edge {
    EdgeId id = 0;
    NodeId from = 0;  // reference direction is from -> to
    NodeId to = 0;
    BasicUnit unit;
    double length = 0.0;
};

struct GridShape {
    int rows = 0;
    int cols = 0;
    bool operator==(const GridShape&) const = default;
};

class Network {
public:
    explicit Network(DeviceParams params = {});

    /// Appends a node with the next free id.
    NodeId add_node(Point position);
    /// Appends an OFF edge with the next free id. Rejects self-loops, unknown
    /// endpoints and duplicate node pairs.
    EdgeId add_edge(NodeId from, NodeId to);

    // Insertion with explicit ids, used when copying subsets or loading.
    void insert_node(const Node& node);
    void insert_edge(const Edge& edge);

    std::span<const Node> nodes() const { return nodes_; }
    std::span<const Edge> edges() const { return edges_; }
    std::span<Edge> edges() { return edges_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    bool has_node(NodeId id) const;
    bool has_edge(EdgeId id) const;
    std::size_t node_index(NodeId id) const;  // throws InvalidArgument
    std::size_t edge_index(EdgeId id) const;  // throws InvalidArgument
    const Node& node(NodeId id) const { return nodes_[node_index(id)]; }
    const Edge& edge(EdgeId id) const { return edges_[edge_index(id)]; }
    Edge& edge(EdgeId id) { return edges_[edge_index(id)]; }

    /// Edge ids incident to a node, in insertion order.
    std::span<const EdgeId> incident(NodeId id) const;
    std::optional<EdgeId> find_edge(NodeId a, NodeId b) const;
    NodeId other_end(const Edge& e, NodeId id) const { return e.from == id ? e.to : e.from; }

    const DeviceParams& params() const { return params_; }
    /// Replaces the device parameters everywhere and resets all devices OFF.
    void set_params(const DeviceParams& params);
    /// Initialization stage: every device back to r_off.
    void reset_states();

    const std::optional<GridShape>& grid() const { return grid_; }
    void set_grid(std::optional<GridShape> shape) { grid_ = shape; }

private:
    DeviceParams params_;
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeId>> adjacency_;  // by node index
    std::vector<std::int64_t> node_lookup_;       // id -> index or -1
    std::vector<std::int64_t> edge_lookup_;
    std::optional<GridShape> grid_;
};

/// rows x cols lattice with unit spacing; node id = row * cols + col,
/// position (col, row). All devices OFF.
Network generate_grid(int rows, int cols, const DeviceParams& params = {});

struct RandomNetworkOptions {
    double min_dist = 0.9;
    double connect_radius = 1.5;
    // Target node count; 0 selects round(density * n_scale^2).
    std::size_t node_count = 0;
    double density = 0.8;
    std::size_t max_consecutive_rejections = 10000;
};

/// Uniform rejection sampling in an n_scale x n_scale square with a strict
/// minimum pairwise distance, then every pair closer than connect_radius is
/// joined. Deterministic in `seed`.
Network generate_random(int n_scale, std::uint64_t seed, const DeviceParams& params = {},
                        const RandomNetworkOptions& options = {});

Network remove_edges(const Network& net, std::span<const EdgeId> edge_ids);

/// Network made of exactly `on_edges` and their endpoints, ids preserved,
/// every device reset OFF.
Network reduced_network(const Network& net, std::span<const EdgeId> on_edges);

bool connected(const Network& net, NodeId a, NodeId b);

/// Component label per node index (labels are dense, starting at 0).
std::vector<int> component_labels(const Network& net);

/// Node nearest to a point; ties go to the smaller id.
NodeId nearest_node(const Network& net, Point p);

}  // namespace memnet
