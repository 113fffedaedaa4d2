#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "memnet/dynamics.hpp"
#include "memnet/topology.hpp"

namespace memnet {

/// Edges whose unit resistance is at or below the log-midpoint of the unit
/// ON and OFF resistances.
std::vector<EdgeId> classify_on(const Network& net);

struct PathExtraction {
    std::vector<std::vector<NodeId>> paths;  // simple input -> output paths, ON edges only
    std::vector<std::vector<EdgeId>> path_edges;
    bool cap_hit = false;
    std::vector<NodeId> dead_ends;         // degree-1 ON nodes other than the terminals
    std::size_t disconnected_segments = 0;  // ON components not touching the input
    bool degenerate = false;                // two edge-disjoint paths of minimal hop count
};

PathExtraction extract_paths(const Network& net, std::span<const EdgeId> on_edges, NodeId input, NodeId output,
                             std::size_t cap = 16);

struct PathResult {
    std::vector<EdgeId> on_edges;
    std::vector<std::vector<NodeId>> paths;
    std::vector<std::vector<EdgeId>> path_edges;
    std::vector<std::size_t> hop_counts;  // per path
    std::vector<double> lengths;          // geometric, per path
    // Shortest input -> output distances inside the ON subgraph (exact, not
    // limited by the enumeration cap); 0 when no ON path exists.
    std::size_t hop_count = 0;
    double geometric_length = 0.0;
    bool degenerate = false;
    bool cap_hit = false;
    std::vector<NodeId> dead_ends;
    std::size_t disconnected_segments = 0;
};

PathResult read_path_result(const Network& net, NodeId input, NodeId output, std::size_t cap = 16);

struct ShortestPathRun {
    Network network;  // final device states
    Trajectory trajectory;
    PathResult result;
};

/// Initialization (all OFF), one bipolar pulse to steady state, reading.
/// Throws DisconnectedTerminals, or NoSolution when no ON path joins the
/// terminals.
ShortestPathRun solve_shortest_path(Network net, NodeId input, NodeId output, double amplitude,
                                    const SimConfig& cfg);

/// One pulse on a damaged solved network without re-initialization.
ShortestPathRun heal(Network net, NodeId input, NodeId output, double amplitude, const SimConfig& cfg);

struct PostProcessRun {
    Network network;  // last reduced network with its final states
    std::vector<EdgeId> on_edges;
    std::size_t passes_run = 0;
    PathResult result;
    double max_relative_residual = 0.0;
};

/// Re-solves on the reduced network of the ON set, up to `passes` times or
/// until the ON set stops changing. Throws NoSolution if a pass switches
/// nothing or loses the terminals.
PostProcessRun post_process_path(const Network& net, std::span<const EdgeId> on_edges, NodeId input,
                                 NodeId output, const Amplitude& amplitude, const SimConfig& cfg,
                                 std::size_t passes);

struct TspSchedule {
    std::size_t n_pulses = 200;
    // Resolved per stage between the farthest city pair.
    Amplitude amplitude = Amplitude::onset_multiple(1.3);
    // Amplitude of the reduced-network reruns; nullopt reuses `amplitude`.
    std::optional<Amplitude> post_amplitude;
    std::uint64_t seed = 1;
    // Per-pulse duration in seconds; nullopt derives it per stage with tsp_pulse_duration().
    std::optional<double> duration;
    double duration_fraction = 0.1;
};

/// Geometrically farthest pair of cities (first such pair in input order).
std::pair<NodeId, NodeId> farthest_city_pair(const Network& net, std::span<const NodeId> cities);

/// duration_fraction times the single-pulse time-to-steady between the
/// farthest (geometric) city pair, measured on an all-OFF copy of `net` in
/// unipolar mode.
double tsp_pulse_duration(const Network& net, std::span<const NodeId> cities, double amplitude,
                          const SimConfig& cfg, double fraction);

struct TourExtraction {
    bool valid = false;
    std::vector<NodeId> tour;        // closed node walk, first == last
    std::vector<std::size_t> order;  // city indices in visiting order
    std::vector<EdgeId> tour_edges;
    double tour_length = 0.0;
    std::size_t stray_components = 0;  // ON components without any city
};

/// Valid iff the ON components that contain cities form one simple cycle
/// through every city (every node on it has ON degree 2).
TourExtraction extract_tour(const Network& net, std::span<const EdgeId> on_edges, std::span<const NodeId> cities);

struct TourResult {
    std::vector<EdgeId> initial_on_edges;
    std::vector<EdgeId> on_edges;
    TourExtraction tour;
    std::size_t post_process_passes = 0;
    std::vector<double> stage_amplitudes;  // volts, main stage first
    std::vector<double> stage_durations;
    std::size_t pulses_applied = 0;
    double max_relative_residual = 0.0;
    Network network;  // final (possibly reduced) network
};

/// Initialization, unipolar random-pulse calculation stage, reading, then up
/// to `passes` reruns of the same schedule on the reduced ON network.
TourResult solve_tsp(const Network& net, std::span<const NodeId> cities, const TspSchedule& schedule,
                     const SimConfig& cfg, std::size_t passes = 2);

}  // namespace memnet
