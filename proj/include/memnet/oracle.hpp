#pragma once

#include <span>
#include <vector>

#include "memnet/circuit.hpp"
#include "memnet/topology.hpp"

// Classical reference implementations. Nothing here depends on the
// memristive dynamics or on the sparse circuit solver.
namespace memnet::oracle {

enum class Metric { hop_count, geometric_length };

double edge_weight(const Edge& e, Metric metric);

struct GraphPath {
    std::vector<NodeId> nodes;  // src ... dst; a single node when src == dst
    std::vector<EdgeId> edges;  // empty when src == dst
    double weight = 0.0;
};

/// Minimum-weight path. Among equal-weight predecessors the smallest node id
/// wins, so results are reproducible. Throws DisconnectedTerminals.
GraphPath dijkstra(const Network& net, NodeId src, NodeId dst, Metric metric);

/// Single-source distances by node index (infinity when unreachable).
std::vector<double> distances_from(const Network& net, NodeId src, Metric metric);

struct PathSet {
    std::vector<GraphPath> paths;
    double weight = 0.0;
    bool cap_hit = false;
};

/// Every minimum-weight path (weights equal within 1e-9 relative), up to `cap`.
PathSet all_shortest_paths(const Network& net, NodeId src, NodeId dst, Metric metric,
                           std::size_t cap = 64);

struct Tour {
    std::vector<std::size_t> order;  // indices into the city list, starting at 0
    double length = 0.0;
};

/// Exact Held-Karp over subsets, 3..15 cities. `distances` is a full
/// symmetric matrix indexed like the city list.
Tour brute_force_tsp(const std::vector<std::vector<double>>& distances);

/// Pairwise graph shortest-path lengths between cities.
std::vector<std::vector<double>> city_distances(const Network& net, std::span<const NodeId> cities,
                                                Metric metric);

/// Full-matrix Gaussian elimination with partial pivoting; same contract as
/// solve_dc (floating components are an error). Up to 500 nodes.
SolveResult dense_solve(const Network& net, const SourceSpec& src);

}  // namespace memnet::oracle
