#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "memnet/algorithms.hpp"
#include "memnet/device.hpp"
#include "memnet/dynamics.hpp"
#include "memnet/topology.hpp"

namespace memnet {

/// A node given either by id or as the node nearest to a point.
struct NodeRef {
    std::optional<NodeId> id;
    Point near;

    static NodeRef by_id(NodeId id) { return {id, {}}; }
    static NodeRef nearest(Point p) { return {std::nullopt, p}; }
    NodeId resolve(const Network& net) const;  // throws InvalidArgument for unknown ids
};

struct NetworkSpec {
    enum class Kind { grid, random };
    Kind kind = Kind::grid;
    int rows = 11;
    int cols = 11;
    int n_scale = 20;
    std::uint64_t seed = 1;
    RandomNetworkOptions random;
};

enum class Algorithm { shortest_path, heal, tsp, entropy_study };

const char* to_string(Algorithm a);

struct SweepPoint {
    double r_on = 10.0;
    double volts = 6.0;
};

struct ScenarioConfig {
    std::string name = "scenario";
    NetworkSpec network;
    DeviceParams device;
    Algorithm algorithm = Algorithm::shortest_path;
    NodeRef input;
    NodeRef output;
    std::vector<NodeRef> cities;
    Amplitude amplitude = Amplitude::volts(6.0);
    std::size_t post_passes = 0;
    std::optional<Amplitude> post_amplitude;  // nullopt reuses `amplitude`
    std::vector<std::pair<NodeRef, NodeRef>> damage;  // heal: node pairs whose edge is removed
    int section_column = 0;                           // grid cross-section for entropy; 0 = whole network
    std::vector<SweepPoint> sweep;                    // entropy_study
    TspSchedule tsp;
    std::size_t tsp_passes = 2;
    SimConfig sim;
    bool render = true;
    std::filesystem::path out_dir = "out";
};

/// Parses a JSON scenario. Unknown keys and bad values raise ConfigError
/// naming the field.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Applies a --seed override: random network seed and TSP schedule seed.
void override_seed(ScenarioConfig& cfg, std::uint64_t seed);

Network build_network(const ScenarioConfig& cfg);

struct ScenarioReport {
    int exit_code = 0;
    std::string summary_text;  // one "key = value" line per entry
    std::string summary_json;
    std::vector<std::filesystem::path> files;
};

/// Runs the scenario, writing summary.{txt,json}, oracle.json, snapshots,
/// traces and renderings into `out_dir`. Module errors propagate; use
/// exit_code_for() to map them.
ScenarioReport run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

/// 2 config error, 3 non-convergence or no solution, 4 disconnected
/// terminals, 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace memnet
