#pragma once

#include <optional>
#include <span>
#include <vector>

#include "memnet/circuit.hpp"
#include "memnet/dynamics.hpp"
#include "memnet/topology.hpp"

namespace memnet {

/// Edges cut by a line separating input from output. orientation[k] maps the
/// edge reference direction onto the input-to-output crossing direction.
struct CrossSection {
    std::vector<EdgeId> edges;
    std::vector<int> orientation;
};

/// Horizontal edges between node columns column-1 and column of a grid,
/// i.e. the vertical line through the column-th unit of every row (1-based).
/// Edges missing from a damaged grid are skipped.
CrossSection grid_cross_section(const Network& net, int column, NodeId input, NodeId output);

/// -sum p ln p with p_k = |I_k| / sum |I|; 0 ln 0 = 0. Throws ZeroCurrent.
double current_entropy(std::span<const double> currents);

double cross_section_entropy(const Network& net, const SolveResult& result, const CrossSection& section);
double full_network_entropy(const SolveResult& result);

struct EntropyTrace {
    enum class Variant { cross_section, full_network };
    Variant variant = Variant::full_network;
    std::vector<double> times;
    std::vector<double> values;  // NaN where no current flows
};

/// Entropy at every recorded sample; `section` == nullopt uses every edge.
EntropyTrace entropy_trace(const Trajectory& traj, const std::optional<CrossSection>& section);

/// Finite-difference dR/dt between consecutive samples, one series per edge.
std::vector<std::vector<double>> switching_rate_trace(const Trajectory& traj, std::span<const EdgeId> edges);

/// Time of the first sample at which each edge's unit resistance is at or
/// below `threshold`.
std::vector<std::optional<double>> first_crossing_times(const Trajectory& traj, std::span<const EdgeId> edges,
                                                        double threshold);

}  // namespace memnet
