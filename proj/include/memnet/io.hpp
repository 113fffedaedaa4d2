#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memnet/analysis.hpp"
#include "memnet/circuit.hpp"
#include "memnet/dynamics.hpp"
#include "memnet/topology.hpp"

namespace memnet {

/// Network state plus what is needed to re-render it: highlighted nodes and
/// the pulse that produced the state.
struct Snapshot {
    Network network;
    std::vector<NodeId> highlight;
    std::optional<PulseSpec> pulse;
};

/// JSON with device parameters, node positions, edge endpoints and both
/// device memristances per edge.
std::string snapshot_json(const Network& net, std::span<const NodeId> highlight,
                          const std::optional<PulseSpec>& pulse);
Snapshot parse_snapshot(std::string_view text);  // throws ConfigError
Snapshot load_snapshot(const std::filesystem::path& path);

/// CSV, one row per sample: time, source_current, entropy, then the unit
/// resistance of every tracked edge.
std::string trace_csv(const Trajectory& traj, const EntropyTrace& entropy, std::span<const EdgeId> tracked);

enum class RenderMode {
    resistance,  // edge color on a log scale from the unit OFF to the unit ON resistance
    current,     // edge color and width by |I| / max |I|
};

/// SVG drawing: nodes as circles, edges colored per `mode`, highlighted nodes
/// drawn large. `currents` is required for RenderMode::current.
std::string render_svg(const Network& net, std::span<const NodeId> highlight, RenderMode mode,
                       const SolveResult* currents = nullptr);

void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace memnet
