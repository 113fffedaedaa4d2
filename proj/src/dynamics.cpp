#include "memnet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "memnet/error.hpp"

namespace memnet {

void SimConfig::validate() const {
    if (!(dt >= 0.0) || !std::isfinite(dt)) throw InvalidArgument("sim config: dt must be >= 0 (0 = auto)");
    if (max_steps < 1) throw InvalidArgument("sim config: max_steps must be >= 1");
    if (record_stride < 1) throw InvalidArgument("sim config: record_stride must be >= 1");
    if (!(max_change_fraction > 0.0 && max_change_fraction <= 1.0))
        throw InvalidArgument("sim config: max_change_fraction must be in (0, 1]");
}

const char* to_string(PulseStatus s) {
    switch (s) {
        case PulseStatus::steady: return "steady";
        case PulseStatus::duration_elapsed: return "duration_elapsed";
        case PulseStatus::max_steps_exhausted: return "max_steps_exhausted";
    }
    return "unknown";
}

double auto_time_step(const DeviceParams& p, double amplitude, const SimConfig& cfg) {
    const double i_max = std::abs(amplitude) * 2.0 / p.r_on;
    const double rate = p.gamma * std::max(i_max - p.i_threshold, 0.0);
    const double budget = cfg.max_change_fraction * (p.r_off - p.r_on);
    // Below threshold nothing moves; any positive step is exact.
    if (rate <= 0.0) return budget / p.gamma;
    return budget / rate;
}

namespace {

void record(Trajectory& traj, const Network& net, const SolveResult& sol, double t) {
    traj.times.push_back(t);
    std::vector<double> r(net.edge_count());
    for (std::size_t k = 0; k < net.edge_count(); ++k) r[k] = net.edges()[k].unit.resistance();
    traj.resistances.push_back(std::move(r));
    traj.currents.push_back(sol.edge_currents);
    traj.source_current.push_back(sol.source_current);
}

}  // namespace

PulseOutcome apply_pulse(Network net, const PulseSpec& pulse, const SimConfig& cfg) {
    cfg.validate();
    if (!std::isfinite(pulse.amplitude)) throw InvalidArgument("pulse amplitude must be finite");
    if (pulse.input == pulse.output) throw InvalidArgument("pulse input and output must differ");
    if (net.edge_count() == 0) throw InvalidArgument("apply_pulse: network has no edges");
    if (!connected(net, pulse.input, pulse.output))
        throw DisconnectedTerminals("apply_pulse: nodes " + std::to_string(pulse.input) + " and " +
                                    std::to_string(pulse.output) + " are not connected");

    if (pulse.duration && !(*pulse.duration >= 0.0)) throw InvalidArgument("pulse duration must be >= 0");

    const SourceSpec src = SourceSpec::pair(pulse.input, pulse.output, pulse.amplitude);
    const NodeId fixed[] = {pulse.input, pulse.output};
    DcSolver solver(net, fixed, SolveOptions{.allow_floating = true});

    const DeviceParams& params = net.params();
    const double budget = cfg.max_change_fraction * (params.r_off - params.r_on);
    const double fallback = auto_time_step(params, pulse.amplitude, cfg);

    Trajectory traj;
    traj.dt = cfg.dt > 0.0 ? cfg.dt : std::numeric_limits<double>::infinity();
    traj.edge_ids.reserve(net.edge_count());
    for (const Edge& e : net.edges()) traj.edge_ids.push_back(e.id);

    SolveResult sol = solver.solve(net, src);
    traj.max_relative_residual = sol.relative_residual();
    record(traj, net, sol, 0.0);

    traj.status = PulseStatus::max_steps_exhausted;
    std::size_t step = 0;
    double t = 0.0;
    while (step < cfg.max_steps) {
        if (pulse.duration && *pulse.duration - t <= 1e-12 * *pulse.duration) {
            traj.status = PulseStatus::duration_elapsed;
            break;
        }
        double h = cfg.dt;
        auto edges = net.edges();
        if (h <= 0.0) {
            double rate = 0.0;
            for (std::size_t k = 0; k < edges.size(); ++k)
                rate = std::max(rate, unit_max_rate(edges[k].unit, sol.edge_currents[k], cfg.mode, cfg.drive));
            h = rate > 0.0 ? budget / rate : fallback;
        }
        if (pulse.duration) h = std::min(h, *pulse.duration - t);
        traj.dt = std::min(traj.dt, h);

        ++step;
        t += h;
        bool changed = false;
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const BasicUnit next = step_unit(edges[k].unit, sol.edge_currents[k], h, cfg.mode, cfg.drive);
            if (!(next == edges[k].unit)) {
                edges[k].unit = next;
                changed = true;
            }
        }
        if (changed) {
            sol = solver.solve(net, src);
            traj.max_relative_residual = std::max(traj.max_relative_residual, sol.relative_residual());
        }
        if (step % cfg.record_stride == 0) record(traj, net, sol, t);
        if (!changed) {
            traj.status = PulseStatus::steady;
            break;
        }
    }
    if (traj.status == PulseStatus::max_steps_exhausted && pulse.duration && *pulse.duration - t <= 1e-12 * *pulse.duration)
        traj.status = PulseStatus::duration_elapsed;
    traj.steps_taken = step;
    traj.elapsed = t;
    traj.reached_steady = traj.status == PulseStatus::steady;
    traj.final_solve = std::move(sol);
    return PulseOutcome{std::move(net), std::move(traj)};
}

SequenceOutcome run_pulse_sequence(Network net, std::span<const PulseSpec> pulses, const SimConfig& cfg) {
    SequenceOutcome out{std::move(net), {}, 0.0};
    SimConfig quiet = cfg;
    quiet.record_stride = cfg.max_steps;
    for (const PulseSpec& p : pulses) {
        PulseOutcome r = apply_pulse(std::move(out.network), p, quiet);
        out.network = std::move(r.network);
        out.pulses.push_back(PulseRecord{p, r.trajectory.status, r.trajectory.steps_taken, r.trajectory.elapsed,
                                         r.trajectory.max_relative_residual});
        out.max_relative_residual = std::max(out.max_relative_residual, r.trajectory.max_relative_residual);
    }
    return out;
}

double switching_onset_amplitude(const Network& net, NodeId input, NodeId output, ThresholdDrive drive) {
    if (!connected(net, input, output))
        throw DisconnectedTerminals("switching_onset_amplitude: terminals not connected");
    Network fresh = net;
    fresh.reset_states();
    const SolveResult sol = solve_dc(fresh, SourceSpec::pair(input, output, 1.0), SolveOptions{.allow_floating = true});
    double worst = 0.0;
    for (std::size_t k = 0; k < fresh.edge_count(); ++k) {
        const BasicUnit& u = fresh.edges()[k].unit;
        double share = 1.0;
        if (drive == ThresholdDrive::branch_current)
            share = std::max(1.0 / u.a.x, 1.0 / u.b.x) / unit_conductance(u);
        worst = std::max(worst, std::abs(sol.edge_currents[k]) * share);
    }
    if (!(worst > 0.0)) throw InvalidArgument("switching_onset_amplitude: no current flows");
    return fresh.params().i_threshold / worst;
}

double Amplitude::resolve(const Network& net, NodeId input, NodeId output, ThresholdDrive drive) const {
    if (!std::isfinite(value)) throw InvalidArgument("amplitude must be finite");
    if (kind == Kind::volts) return value;
    return value * switching_onset_amplitude(net, input, output, drive);
}

std::vector<PulseSpec> random_pulse_schedule(std::span<const NodeId> cities, std::size_t n_pulses,
                                             double amplitude, std::uint64_t seed,
                                             std::optional<double> duration) {
    if (cities.size() < 2) throw InvalidArgument("random_pulse_schedule: need at least 2 cities");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> first(0, cities.size() - 1);
    std::uniform_int_distribution<std::size_t> second(0, cities.size() - 2);
    std::bernoulli_distribution positive(0.5);
    std::vector<PulseSpec> out;
    out.reserve(n_pulses);
    for (std::size_t k = 0; k < n_pulses; ++k) {
        const std::size_t i = first(rng);
        std::size_t j = second(rng);
        if (j >= i) ++j;
        const double a = positive(rng) ? amplitude : -amplitude;
        out.push_back(PulseSpec{cities[i], cities[j], a, duration});
    }
    return out;
}

}  // namespace memnet
