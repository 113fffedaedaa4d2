#include <doctest.h>

#include <cmath>
#include <random>
#include <utility>

#include "memnet/device.hpp"
#include "memnet/error.hpp"

using namespace memnet;

namespace {
const DeviceParams P{};  // r_on 10, r_off 200, gamma 1e6, I_t 10 mA
}

TEST_SUITE("device") {

TEST_CASE("params validation") {
    CHECK_NOTHROW(P.validate());
    CHECK_THROWS_AS((DeviceParams{10, 10, 1e6, 0.01}.validate()), InvalidArgument);
    CHECK_THROWS_AS((DeviceParams{0, 200, 1e6, 0.01}.validate()), InvalidArgument);
    CHECK_THROWS_AS((DeviceParams{10, 200, 0, 0.01}.validate()), InvalidArgument);
    CHECK_THROWS_AS((DeviceParams{10, 200, 1e6, -1e-3}.validate()), InvalidArgument);
    CHECK_NOTHROW((DeviceParams{10, 200, 1e6, 0.0}.validate()));
}

TEST_CASE("resistance is the state") {
    for (double x : {200.0, 10.0, 105.0}) CHECK(device_resistance(MemristiveDevice{x, 1, P}) == x);
}

TEST_CASE("state derivative") {
    const MemristiveDevice d = MemristiveDevice::off(P, +1);
    CHECK(state_derivative(d, 0.005, DynamicsMode::bipolar) == 0.0);
    CHECK(state_derivative(d, -0.005, DynamicsMode::unipolar) == 0.0);
    // sgn(i) * gamma * (|i| - I_t)
    CHECK(state_derivative(d, -0.030, DynamicsMode::bipolar) == doctest::Approx(-1.0 * 1e6 * (0.030 - 0.010)));
    CHECK(state_derivative(d, 0.030, DynamicsMode::bipolar) == doctest::Approx(2.0e4));
    CHECK(state_derivative(d, 0.030, DynamicsMode::unipolar) == doctest::Approx(-2.0e4));
    CHECK(state_derivative(d, -0.030, DynamicsMode::unipolar) == doctest::Approx(-2.0e4));
}

TEST_CASE("step device") {
    const MemristiveDevice d = MemristiveDevice::off(P, +1);
    CHECK(step_device(d, 0.005, 1e-3, DynamicsMode::bipolar).x == 200.0);
    CHECK(step_device(d, -0.030, 1e-3, DynamicsMode::bipolar).x == doctest::Approx(200.0 + (-2e4) * 1e-3));
    CHECK(step_device(MemristiveDevice{12.0, 1, P}, -0.030, 1e-3, DynamicsMode::bipolar).x == 10.0);
    CHECK(step_device(d, 0.030, 1e-3, DynamicsMode::bipolar).x == 200.0);
    const MemristiveDevice s = step_device(d, -0.030, 1e-3, DynamicsMode::bipolar);
    CHECK(s.orientation == d.orientation);
    CHECK(s.params == d.params);
}

TEST_CASE("unit conductance") {
    CHECK(unit_conductance(BasicUnit::off(P)) == doctest::Approx(0.01));
    BasicUnit u = BasicUnit::off(P);
    u.b.x = 10.0;
    CHECK(unit_conductance(u) == doctest::Approx(1.0 / 200 + 1.0 / 10));
    CHECK(1.0 / unit_conductance(u) == doctest::Approx(9.5238095).epsilon(1e-7));
    CHECK(BasicUnit::off(P).resistance() == doctest::Approx(P.r_off / 2));
    CHECK(P.unit_on_resistance() == doctest::Approx(200.0 * 10.0 / 210.0));
    CHECK(P.unit_on_threshold() == doctest::Approx(std::sqrt(100.0 * 200.0 * 10.0 / 210.0)));
}

TEST_CASE("step unit, branch-current drive") {
    const BasicUnit u = BasicUnit::off(P);
    const double dt = 1e-4;
    const BasicUnit s = step_unit(u, 0.060, dt, DynamicsMode::bipolar, ThresholdDrive::branch_current);
    CHECK(s.a.x == 200.0);
    CHECK(s.b.x == doctest::Approx(200.0 - 2e4 * dt));
    const BasicUnit m = step_unit(u, -0.060, dt, DynamicsMode::bipolar, ThresholdDrive::branch_current);
    CHECK(m.a.x == doctest::Approx(200.0 - 2e4 * dt));
    CHECK(m.b.x == 200.0);
    CHECK(step_unit(u, 0.0, dt, DynamicsMode::bipolar, ThresholdDrive::branch_current) == u);
}

TEST_CASE("step unit, unit-current drive") {
    // Each device sees the whole unit current: 60 mA -> 5e4 ohm/s.
    const BasicUnit u = BasicUnit::off(P);
    const double dt = 1e-4;
    const BasicUnit s = step_unit(u, 0.060, dt, DynamicsMode::bipolar);
    CHECK(s.a.x == 200.0);
    CHECK(s.b.x == doctest::Approx(200.0 - 1e6 * (0.060 - 0.010) * dt));
    const BasicUnit w = step_unit(u, 0.060, dt, DynamicsMode::unipolar);
    CHECK(w.a.x == doctest::Approx(200.0 - 5e4 * dt));
    CHECK(w.b.x == doctest::Approx(200.0 - 5e4 * dt));
    // 15 mA unit current is above threshold here but each 7.5 mA branch is not.
    CHECK(step_unit(u, 0.015, dt, DynamicsMode::bipolar).b.x < 200.0);
    CHECK(step_unit(u, 0.015, dt, DynamicsMode::bipolar, ThresholdDrive::branch_current) == u);
}

TEST_CASE("unit max rate ignores pinned devices") {
    const BasicUnit u = BasicUnit::off(P);
    CHECK(unit_max_rate(u, 0.030, DynamicsMode::bipolar) == doctest::Approx(2e4));
    CHECK(unit_max_rate(u, 0.005, DynamicsMode::bipolar) == 0.0);
    BasicUnit on = u;
    on.b.x = P.r_on;
    CHECK(unit_max_rate(on, 0.030, DynamicsMode::bipolar) == 0.0);
}

TEST_CASE("properties over random sequences") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> cur(-0.2, 0.2), step(1e-6, 1e-3);
    for (auto drive : {ThresholdDrive::unit_current, ThresholdDrive::branch_current}) {
        BasicUnit u = BasicUnit::off(P), w = BasicUnit::off(P);
        for (int k = 0; k < 2000; ++k) {
            const double i = cur(rng), dt = step(rng);
            u = step_unit(u, i, dt, DynamicsMode::bipolar, drive);
            const BasicUnit next = step_unit(w, i, dt, DynamicsMode::unipolar, drive);
            for (const MemristiveDevice* d : {&std::as_const(u).a, &std::as_const(u).b, &next.a, &next.b}) {
                CHECK(d->x >= P.r_on);
                CHECK(d->x <= P.r_off);
            }
            CHECK(next.a.x <= w.a.x);
            CHECK(next.b.x <= w.b.x);
            w = next;
            CHECK(u.a.orientation == 1);
            CHECK(u.b.orientation == -1);
        }
    }
}

TEST_CASE("deadband") {
    MemristiveDevice d{57.0, -1, P};
    for (double i : {0.0, 0.009999, -0.009999, 0.005})
        for (double dt : {1e-9, 1.0, 1e3}) CHECK(step_device(d, i, dt, DynamicsMode::bipolar).x == 57.0);
}

TEST_CASE("polarity symmetry of the unit") {
    for (double x : {200.0, 120.0, 10.0}) {
        BasicUnit u{MemristiveDevice{x, 1, P}, MemristiveDevice{x, -1, P}};
        for (double i : {0.02, 0.07, 0.3}) {
            const BasicUnit p = step_unit(u, i, 2e-4, DynamicsMode::bipolar);
            const BasicUnit m = step_unit(u, -i, 2e-4, DynamicsMode::bipolar);
            CHECK(p.a.x == m.b.x);
            CHECK(p.b.x == m.a.x);
        }
    }
}

TEST_CASE("constant-current closed form") {
    // x(t) = clamp(x0 + sgn(i) gamma (|i| - I_t) t); forward Euler is exact
    // for a constant rate, so refinement only changes rounding.
    const double i = -0.030, t_end = 0.008;
    auto closed = [&](double t) { return std::clamp(200.0 - 1e6 * 0.020 * t, 10.0, 200.0); };
    for (int n : {80, 160, 320}) {
        MemristiveDevice d = MemristiveDevice::off(P, 1);
        const double dt = t_end / n;
        for (int k = 0; k < n; ++k) d = step_device(d, i, dt, DynamicsMode::bipolar);
        CHECK(d.x == doctest::Approx(closed(t_end)).epsilon(1e-9));
    }
}

}
