#include "memnet/device.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "memnet/error.hpp"

namespace memnet {

void DeviceParams::validate() const {
    if (!(std::isfinite(r_on) && std::isfinite(r_off) && r_on > 0.0 && r_on < r_off))
        throw InvalidArgument("device params: require 0 < r_on < r_off");
    if (!(std::isfinite(gamma) && gamma > 0.0))
        throw InvalidArgument("device params: require gamma > 0");
    if (!(std::isfinite(i_threshold) && i_threshold >= 0.0))
        throw InvalidArgument("device params: require i_threshold >= 0");
}

double DeviceParams::unit_on_threshold() const {
    return std::sqrt(unit_on_resistance() * unit_off_resistance());
}

double state_derivative(const MemristiveDevice& d, double i_device, DynamicsMode mode) {
    const double magnitude = std::abs(i_device);
    if (magnitude < d.params.i_threshold) return 0.0;
    const double rate = d.params.gamma * (magnitude - d.params.i_threshold);
    if (mode == DynamicsMode::unipolar) return -rate;
    if (i_device > 0.0) return rate;
    if (i_device < 0.0) return -rate;
    return 0.0;
}

MemristiveDevice step_device(const MemristiveDevice& d, double i_device, double dt,
                             DynamicsMode mode) {
    MemristiveDevice next = d;
    const double rate = state_derivative(d, i_device, mode);
    if (rate != 0.0)
        next.x = std::clamp(d.x + rate * dt, d.params.r_on, d.params.r_off);
    return next;
}

namespace {

std::pair<double, double> device_currents(const BasicUnit& u, double i_unit, ThresholdDrive drive) {
    if (drive == ThresholdDrive::unit_current) return {i_unit, i_unit};
    const double g_a = 1.0 / u.a.x;
    const double g_b = 1.0 / u.b.x;
    return {i_unit * g_a / (g_a + g_b), i_unit * g_b / (g_a + g_b)};
}

double movable_rate(const MemristiveDevice& d, double i_device, DynamicsMode mode) {
    const double rate = state_derivative(d, i_device, mode);
    if (rate > 0.0 && d.x >= d.params.r_off) return 0.0;
    if (rate < 0.0 && d.x <= d.params.r_on) return 0.0;
    return std::abs(rate);
}

}  // namespace

double unit_max_rate(const BasicUnit& u, double i_unit, DynamicsMode mode, ThresholdDrive drive) {
    const auto [i_a, i_b] = device_currents(u, i_unit, drive);
    return std::max(movable_rate(u.a, i_a * u.a.orientation, mode), movable_rate(u.b, i_b * u.b.orientation, mode));
}

BasicUnit step_unit(const BasicUnit& u, double i_unit, double dt, DynamicsMode mode,
                    ThresholdDrive drive) {
    const auto [i_a, i_b] = device_currents(u, i_unit, drive);
    return BasicUnit{step_device(u.a, i_a * u.a.orientation, dt, mode),
                     step_device(u.b, i_b * u.b.orientation, dt, mode)};
}

}  // namespace memnet
