#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "memnet/circuit.hpp"
#include "memnet/device.hpp"
#include "memnet/topology.hpp"

namespace memnet {

struct PulseSpec {
    NodeId input = 0;
    NodeId output = 0;
    double amplitude = 0.0;           // volts at input, output held at 0
    std::optional<double> duration;   // seconds; nullopt runs to steady state
};

struct SimConfig {
    // Fixed time step in seconds. 0 selects a rate-limited step: every step
    // is the largest one that moves no free device by more than
    // max_change_fraction * (r_off - r_on).
    double dt = 0.0;
    std::size_t max_steps = 1'000'000;
    std::size_t record_stride = 1;
    DynamicsMode mode = DynamicsMode::bipolar;
    ThresholdDrive drive = ThresholdDrive::unit_current;
    double max_change_fraction = 0.01;

    void validate() const;
};

enum class PulseStatus {
    steady,               // a full step left every device state unchanged
    duration_elapsed,
    max_steps_exhausted,
};

const char* to_string(PulseStatus s);

/// Sampled history of one pulse. Sample k is taken after k * record_stride
/// steps; currents are those of the state at that instant. Times are not
/// uniform under the rate-limited step.
struct Trajectory {
    std::vector<EdgeId> edge_ids;  // column order of the per-edge series
    std::vector<double> times;
    std::vector<std::vector<double>> resistances;  // [sample][edge]
    std::vector<std::vector<double>> currents;     // [sample][edge]
    std::vector<double> source_current;
    double dt = 0.0;  // fixed step, or the smallest step used when rate-limited
    double elapsed = 0.0;
    std::size_t steps_taken = 0;
    PulseStatus status = PulseStatus::steady;
    bool reached_steady = false;
    double max_relative_residual = 0.0;  // worst KCL residual over every solve
    SolveResult final_solve;             // solve of the returned state

    std::size_t sample_count() const { return times.size(); }
};

struct PulseOutcome {
    Network network;
    Trajectory trajectory;
};

/// Fixed time step such that no device can move by more than
/// max_change_fraction * (r_off - r_on) in one step for any state, from the
/// a-priori bound |I_edge| <= |V| * 2 / r_on.
double auto_time_step(const DeviceParams& params, double amplitude, const SimConfig& cfg);

/// Quasi-static integration: solve, update every unit synchronously from the
/// same solve, advance by dt. Throws DisconnectedTerminals; running out of
/// max_steps is reported through Trajectory::status with the partial state.
PulseOutcome apply_pulse(Network net, const PulseSpec& pulse, const SimConfig& cfg);

struct PulseRecord {
    PulseSpec pulse;
    PulseStatus status = PulseStatus::steady;
    std::size_t steps = 0;
    double elapsed = 0.0;
    double max_relative_residual = 0.0;
};

struct SequenceOutcome {
    Network network;
    std::vector<PulseRecord> pulses;
    double max_relative_residual = 0.0;
};

/// Applies pulses in order, carrying device states across pulses. Only the
/// final state of each pulse is kept.
SequenceOutcome run_pulse_sequence(Network net, std::span<const PulseSpec> pulses, const SimConfig& cfg);

/// Amplitude at which the largest device current of a pulse between `input`
/// and `output` just reaches the threshold, evaluated on an all-OFF copy of
/// `net` (the solve is linear, so this scales exactly).
double switching_onset_amplitude(const Network& net, NodeId input, NodeId output,
                                 ThresholdDrive drive = ThresholdDrive::unit_current);

/// Pulse amplitude given either directly in volts or as a multiple of the
/// switching onset of the network it is applied to.
struct Amplitude {
    enum class Kind { volts, onset_multiple };
    Kind kind = Kind::volts;
    double value = 0.0;

    static Amplitude volts(double v) { return {Kind::volts, v}; }
    static Amplitude onset_multiple(double f) { return {Kind::onset_multiple, f}; }
    double resolve(const Network& net, NodeId input, NodeId output, ThresholdDrive drive) const;
};

/// Uniformly random distinct city pairs with uniformly random polarity.
std::vector<PulseSpec> random_pulse_schedule(std::span<const NodeId> cities, std::size_t n_pulses,
                                             double amplitude, std::uint64_t seed,
                                             std::optional<double> duration = std::nullopt);

}  // namespace memnet
