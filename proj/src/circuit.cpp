#include "memnet/circuit.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "memnet/error.hpp"

namespace memnet {

double SolveResult::relative_residual() const {
    return kcl_residual / std::max(std::abs(source_current), 1e-6);
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

constexpr std::int64_t kFixed = -1;
constexpr std::int64_t kFloating = -2;

}  // namespace

struct DcSolver::Impl {
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    std::vector<NodeId> fixed_ids;
    std::vector<char> fixed;              // by node index
    std::vector<std::int64_t> unknown;    // node index -> unknown row, kFixed, kFloating
    std::vector<std::size_t> from_idx, to_idx;  // edge endpoints as node indices
    // Offsets of each edge's stamp in the compressed value array; -1 when
    // the entry does not exist (fixed or floating endpoint).
    std::vector<std::array<std::ptrdiff_t, 4>> stamp;
    SparseMatrix matrix;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt;
    bool has_unknowns = false;
};

DcSolver::DcSolver(const Network& net, std::span<const NodeId> fixed_nodes, SolveOptions options)
    : impl_(std::make_unique<Impl>()) {
    Impl& s = *impl_;
    if (fixed_nodes.empty()) throw InvalidArgument("solve_dc: at least one fixed node required");
    s.node_count = net.node_count();
    s.edge_count = net.edge_count();
    s.fixed.assign(s.node_count, 0);
    for (NodeId id : fixed_nodes) {
        const std::size_t i = net.node_index(id);
        if (s.fixed[i]) throw InvalidArgument("solve_dc: node fixed twice: " + std::to_string(id));
        s.fixed[i] = 1;
        s.fixed_ids.push_back(id);
    }

    // Components that contain no fixed node have no unique solution.
    const std::vector<int> label = component_labels(net);
    const int ncomp = label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
    std::vector<char> anchored(static_cast<std::size_t>(ncomp), 0);
    for (std::size_t i = 0; i < s.node_count; ++i)
        if (s.fixed[i]) anchored[static_cast<std::size_t>(label[i])] = 1;

    s.unknown.assign(s.node_count, kFixed);
    std::int64_t rows = 0;
    for (std::size_t i = 0; i < s.node_count; ++i) {
        if (s.fixed[i]) continue;
        if (!anchored[static_cast<std::size_t>(label[i])]) {
            if (!options.allow_floating)
                throw SingularSystem("solve_dc: node " + std::to_string(net.nodes()[i].id) +
                                     " lies in a component with no fixed potential");
            s.unknown[i] = kFloating;
            continue;
        }
        s.unknown[i] = rows++;
    }

    s.from_idx.resize(s.edge_count);
    s.to_idx.resize(s.edge_count);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(4 * s.edge_count);
    for (std::size_t k = 0; k < s.edge_count; ++k) {
        const Edge& e = net.edges()[k];
        s.from_idx[k] = net.node_index(e.from);
        s.to_idx[k] = net.node_index(e.to);
        const std::int64_t u = s.unknown[s.from_idx[k]], v = s.unknown[s.to_idx[k]];
        if (u >= 0) triplets.emplace_back(u, u, 1.0);
        if (v >= 0) triplets.emplace_back(v, v, 1.0);
        if (u >= 0 && v >= 0) {
            triplets.emplace_back(u, v, -1.0);
            triplets.emplace_back(v, u, -1.0);
        }
    }
    s.matrix.resize(rows, rows);
    s.matrix.setFromTriplets(triplets.begin(), triplets.end());
    s.matrix.makeCompressed();

    s.stamp.assign(s.edge_count, {-1, -1, -1, -1});
    const double* base = s.matrix.valuePtr();
    for (std::size_t k = 0; k < s.edge_count; ++k) {
        const std::int64_t u = s.unknown[s.from_idx[k]], v = s.unknown[s.to_idx[k]];
        auto& st = s.stamp[k];
        if (u >= 0) st[0] = &s.matrix.coeffRef(u, u) - base;
        if (v >= 0) st[1] = &s.matrix.coeffRef(v, v) - base;
        if (u >= 0 && v >= 0) {
            st[2] = &s.matrix.coeffRef(u, v) - base;
            st[3] = &s.matrix.coeffRef(v, u) - base;
        }
    }
    s.has_unknowns = rows > 0;
    if (s.has_unknowns) s.ldlt.analyzePattern(s.matrix);
}

DcSolver::~DcSolver() = default;
DcSolver::DcSolver(DcSolver&&) noexcept = default;
DcSolver& DcSolver::operator=(DcSolver&&) noexcept = default;

SolveResult DcSolver::solve(const Network& net, const SourceSpec& src) {
    Impl& s = *impl_;
    if (net.node_count() != s.node_count || net.edge_count() != s.edge_count)
        throw InvalidArgument("DcSolver: network topology changed");
    if (src.fixed.size() != s.fixed_ids.size())
        throw InvalidArgument("DcSolver: source fixes a different node set");

    SolveResult result;
    result.input = src.fixed.front().first;
    result.potentials.assign(s.node_count, std::numeric_limits<double>::quiet_NaN());
    for (const auto& [id, volts] : src.fixed) {
        if (!std::isfinite(volts)) throw InvalidArgument("solve_dc: non-finite source potential");
        const std::size_t i = net.node_index(id);
        if (!s.fixed[i]) throw InvalidArgument("DcSolver: source fixes a different node set");
        result.potentials[i] = volts;
    }

    const auto rows = s.matrix.rows();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
    double* values = s.matrix.valuePtr();
    std::fill(values, values + s.matrix.nonZeros(), 0.0);
    for (std::size_t k = 0; k < s.edge_count; ++k) {
        const double g = unit_conductance(net.edges()[k].unit);
        if (!std::isfinite(g) || !(g > 0.0))
            throw SingularSystem("solve_dc: non-finite conductance on edge " +
                                 std::to_string(net.edges()[k].id));
        const auto& st = s.stamp[k];
        for (int j = 0; j < 2; ++j)
            if (st[j] >= 0) values[st[j]] += g;
        for (int j = 2; j < 4; ++j)
            if (st[j] >= 0) values[st[j]] -= g;
        const std::size_t a = s.from_idx[k], b = s.to_idx[k];
        const std::int64_t u = s.unknown[a], v = s.unknown[b];
        if (u >= 0 && v == kFixed) rhs[u] += g * result.potentials[b];
        if (v >= 0 && u == kFixed) rhs[v] += g * result.potentials[a];
    }

    if (s.has_unknowns) {
        s.ldlt.factorize(s.matrix);
        if (s.ldlt.info() != Eigen::Success) throw SingularSystem("solve_dc: factorization failed");
        const Eigen::VectorXd x = s.ldlt.solve(rhs);
        if (s.ldlt.info() != Eigen::Success || !x.allFinite())
            throw SingularSystem("solve_dc: solve failed");
        for (std::size_t i = 0; i < s.node_count; ++i)
            if (s.unknown[i] >= 0) result.potentials[i] = x[s.unknown[i]];
    }
    finish_solve(net, s.fixed, result);
    return result;
}

void finish_solve(const Network& net, const std::vector<char>& fixed, SolveResult& result) {
    const std::size_t n = net.node_count();
    result.edge_currents.assign(net.edge_count(), 0.0);
    std::vector<double> outflow(n, 0.0);
    for (std::size_t k = 0; k < net.edge_count(); ++k) {
        const Edge& e = net.edges()[k];
        const std::size_t a = net.node_index(e.from), b = net.node_index(e.to);
        const double va = result.potentials[a], vb = result.potentials[b];
        if (std::isnan(va) || std::isnan(vb)) continue;
        const double i = (va - vb) * unit_conductance(e.unit);
        result.edge_currents[k] = i;
        outflow[a] += i;
        outflow[b] -= i;
    }
    result.source_current = outflow[net.node_index(result.input)];
    result.kcl_residual = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (!fixed[i]) result.kcl_residual = std::max(result.kcl_residual, std::abs(outflow[i]));
}

SolveResult solve_dc(const Network& net, const SourceSpec& src, SolveOptions options) {
    std::vector<NodeId> ids;
    ids.reserve(src.fixed.size());
    for (const auto& f : src.fixed) ids.push_back(f.first);
    DcSolver solver(net, ids, options);
    return solver.solve(net, src);
}

std::vector<std::pair<EdgeId, double>> cross_section_currents(const Network& net,
                                                              const SolveResult& result,
                                                              std::span<const EdgeId> section) {
    std::vector<char> cut(net.edge_count(), 0);
    for (EdgeId id : section) cut[net.edge_index(id)] = 1;

    std::vector<char> input_side(net.node_count(), 0);
    std::queue<NodeId> q;
    q.push(result.input);
    input_side[net.node_index(result.input)] = 1;
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop();
        for (EdgeId eid : net.incident(u)) {
            if (cut[net.edge_index(eid)]) continue;
            const NodeId v = net.other_end(net.edge(eid), u);
            const std::size_t iv = net.node_index(v);
            if (!input_side[iv]) {
                input_side[iv] = 1;
                q.push(v);
            }
        }
    }

    std::vector<std::pair<EdgeId, double>> out;
    out.reserve(section.size());
    for (EdgeId id : section) {
        const Edge& e = net.edge(id);
        const double i = result.current(net, id);
        out.emplace_back(id, input_side[net.node_index(e.from)] ? i : -i);
    }
    return out;
}

}  // namespace memnet
