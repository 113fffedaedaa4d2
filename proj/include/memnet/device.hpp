#pragma once

namespace memnet {

/// Parameters of one current-controlled bipolar threshold memristive device.
/// Defaults are the reference set: R_off = 200 ohm, R_on = 10 ohm,
/// gamma = 1e6 ohm/(s*A), I_t = 10 mA.
struct DeviceParams {
    double r_on = 10.0;
    double r_off = 200.0;
    double gamma = 1.0e6;
    double i_threshold = 0.01;

    /// Throws InvalidArgument unless 0 < r_on < r_off, gamma > 0, i_threshold >= 0.
    void validate() const;

    /// Unit resistance with one device ON and the other OFF.
    double unit_on_resistance() const { return r_on * r_off / (r_on + r_off); }
    /// Unit resistance with both devices OFF.
    double unit_off_resistance() const { return r_off / 2.0; }
    /// Geometric mean of the unit ON and OFF resistances; the reading cutoff.
    double unit_on_threshold() const;

    bool operator==(const DeviceParams&) const = default;
};

enum class DynamicsMode {
    bipolar,   // sign of the device current selects the switching direction
    unipolar,  // every super-threshold current drives the device toward r_on
};

// Which current a device's threshold law sees inside a basic unit.
enum class ThresholdDrive {
    unit_current,    // each device is driven by the full unit (edge) current
    branch_current,  // each device is driven by its own current-divider share
};

struct MemristiveDevice {
    double x = 200.0;     // memristance in ohm, R(x) = x
    int orientation = 1;  // +1 or -1 relative to the edge reference direction
    DeviceParams params{};

    static MemristiveDevice off(const DeviceParams& p, int orientation) {
        return MemristiveDevice{p.r_off, orientation, p};
    }
    bool operator==(const MemristiveDevice&) const = default;
};

inline double device_resistance(const MemristiveDevice& d) { return d.x; }

/// Unclamped dx/dt for a device carrying `i_device` in its own orientation frame.
double state_derivative(const MemristiveDevice& d, double i_device, DynamicsMode mode);

/// One explicit Euler step followed by a hard clamp to [r_on, r_off].
MemristiveDevice step_device(const MemristiveDevice& d, double i_device, double dt,
                             DynamicsMode mode);

/// Two anti-parallel devices in parallel forming one network edge.
struct BasicUnit {
    MemristiveDevice a;  // orientation +1
    MemristiveDevice b;  // orientation -1

    static BasicUnit off(const DeviceParams& p) {
        return BasicUnit{MemristiveDevice::off(p, +1), MemristiveDevice::off(p, -1)};
    }
    double resistance() const { return a.x * b.x / (a.x + b.x); }
    bool operator==(const BasicUnit&) const = default;
};

inline double unit_conductance(const BasicUnit& u) { return 1.0 / u.a.x + 1.0 / u.b.x; }

/// Advances both devices of a unit carrying `i_unit` (edge reference
/// direction). Both devices are updated from the pre-step state.
BasicUnit step_unit(const BasicUnit& u, double i_unit, double dt, DynamicsMode mode,
                    ThresholdDrive drive = ThresholdDrive::unit_current);

/// Largest |dx/dt| over the unit's two devices, ignoring a device that sits
/// on the clamp it is being pushed into (it cannot move).
double unit_max_rate(const BasicUnit& u, double i_unit, DynamicsMode mode,
                     ThresholdDrive drive = ThresholdDrive::unit_current);

}  // namespace memnet
