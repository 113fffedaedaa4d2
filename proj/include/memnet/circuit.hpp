#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "memnet/topology.hpp"

namespace memnet {

/// Ideal fixed-potential nodes. The first entry is the input: source_current
/// is the current the source pushes into the network there.
struct SourceSpec {
    std::vector<std::pair<NodeId, double>> fixed;

    static SourceSpec pair(NodeId input, NodeId output, double volts) {
        return SourceSpec{{{input, volts}, {output, 0.0}}};
    }
};

struct SolveResult {
    NodeId input = 0;
    std::vector<double> potentials;     // by node index; NaN on floating nodes
    std::vector<double> edge_currents;  // by edge index, signed from -> to
    double source_current = 0.0;
    double kcl_residual = 0.0;  // max |sum of currents| over solved free nodes

    double potential(const Network& net, NodeId id) const { return potentials[net.node_index(id)]; }
    double current(const Network& net, EdgeId id) const { return edge_currents[net.edge_index(id)]; }
    /// KCL residual relative to max(|source_current|, 1 uA).
    double relative_residual() const;
};

struct SolveOptions {
    // Components without a fixed node get NaN potentials and zero current
    // instead of raising SingularSystem.
    bool allow_floating = false;
};

/// Reusable solver for one topology and one set of fixed nodes. The sparsity
/// pattern is analysed once; each solve() refactorizes with the current
/// device states.
class DcSolver {
public:
    DcSolver(const Network& net, std::span<const NodeId> fixed_nodes, SolveOptions options = {});
    ~DcSolver();
    DcSolver(DcSolver&&) noexcept;
    DcSolver& operator=(DcSolver&&) noexcept;

    /// `net` must have the topology the solver was built for and `src` must
    /// fix the same nodes.
    SolveResult solve(const Network& net, const SourceSpec& src);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

SolveResult solve_dc(const Network& net, const SourceSpec& src, SolveOptions options = {});

/// Signed currents through `section`, oriented from the input side to the
/// output side. The side of each endpoint is decided by connectivity to the
/// input once every section edge is removed.
std::vector<std::pair<EdgeId, double>> cross_section_currents(const Network& net,
                                                              const SolveResult& result,
                                                              std::span<const EdgeId> section);

/// Fills potentials-derived fields shared by every solver path: edge currents,
/// source current and KCL residual. `fixed` flags fixed node indices.
void finish_solve(const Network& net, const std::vector<char>& fixed, SolveResult& result);

}  // namespace memnet
