#include <doctest.h>

#include <cmath>
#include <limits>

#include "cavesim/control.hpp"
#include "cavesim/errors.hpp"
#include "cavesim/vehicle.hpp"
#include "test_support.hpp"

using namespace cavesim;
using test::uniform;

TEST_CASE("pid_update examples") {
  const PidGains chosen{3.4, 0.9, 0.0};
  CHECK(pid_update(chosen, {}, 0.1, 0.05).output == doctest::Approx(0.34));
  CHECK(pid_update(chosen, {}, 0.0, 0.05).output == 0.0);

  const PidGains kd_only{0, 0.9, 0};
  auto r = pid_update(kd_only, {}, 0.0, 0.1);
  CHECK(r.output == 0.0);
  r = pid_update(kd_only, r.state, 0.1, 0.1);
  CHECK(r.output == doctest::Approx(0.9));
}

TEST_CASE("pid_update rejects bad input") {
  CHECK_THROWS_AS(pid_update({1, 0, 0}, {}, 0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pid_update({1, 0, 0}, {}, std::numeric_limits<double>::quiet_NaN(), 0.1),
                  SimulationFault);
  CHECK_THROWS_AS(pid_update({1, 0, 0}, {}, std::numeric_limits<double>::infinity(), 0.1),
                  SimulationFault);
  CHECK_THROWS_AS((PidGains{1, 0, -1}).validate(), std::invalid_argument);
}

TEST_CASE("kp-only output is exactly linear in the error") {
  for (int i = 0; i < 1000; ++i) {
    const PidGains g{uniform(-100, 100), 0, 0};
    PidState s;
    s.prev_error = uniform(-1, 1);
    s.initialized = i % 2 == 0;
    const double e = uniform(-1, 1);
    CHECK(pid_update(g, s, e, uniform(0.001, 0.1)).output == g.kp * e);
  }
}

TEST_CASE("derivative matches the finite difference") {
  for (int i = 0; i < 1000; ++i) {
    const PidGains g{0, uniform(0, 5), 0};
    const double dt = uniform(0.001, 0.1);
    const double e0 = uniform(-1, 1), e1 = uniform(-1, 1);
    const auto first = pid_update(g, {}, e0, dt);
    CHECK(first.output == 0.0);
    const auto second = pid_update(g, first.state, e1, dt);
    CHECK(second.output == doctest::Approx(g.kd * (e1 - e0) / dt));
  }
}

TEST_CASE("integral never winds past its limit") {
  const PidGains g{0, 0, 50};
  PidState s;
  for (int i = 0; i < 2000; ++i) {
    const auto r = pid_update(g, s, uniform(-1, 1) + (i < 1000 ? 2 : -2), 0.02);
    CHECK(std::abs(r.state.integral) <= kIntegralLimit);
    s = r.state;
  }
  CHECK(s.integral == doctest::Approx(-kIntegralLimit));
}

TEST_CASE("pid_update is replay-safe") {
  const PidGains g{1.3, 0.4, 0.2};
  PidState a, b;
  for (int i = 0; i < 100; ++i) {
    const double e = std::sin(0.1 * i);
    const auto ra = pid_update(g, a, e, 0.02);
    const auto rb = pid_update(g, b, e, 0.02);
    CHECK(ra.output == rb.output);
    a = ra.state;
    b = rb.state;
  }
}

TEST_CASE("heading_controller") {
  const PidGains g{3.4, 0.9, 0};
  CHECK(heading_controller(0.0, g, {}, 0.02).output == 0.0);
  CHECK(heading_controller(10.0, g, {}, 0.02).output == -1.0);
  CHECK(heading_controller(-10.0, g, {}, 0.02).output == 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double psi = uniform(-3, 3);
    CHECK(std::abs(heading_controller(psi, {uniform(0, 50), uniform(0, 5), 0}, {}, 0.02).output) <= 1.0);
  }
}

TEST_CASE("heading command turns the bow toward the line") {
  // psi > 0: line to starboard. The yaw target sits psi to starboard of the
  // current heading and should be approached.
  const VehicleParams p;
  for (double psi0 : {0.3, -0.3, 1.0, -1.0}) {
    VehicleState s;
    s.position = {0, 0, 1};
    const double target = psi0;
    const double dt = 0.02;
    PidState pid;
    for (int i = 0; i < 25; ++i) {
      const double psi = target - s.attitude.yaw;
      const auto r = heading_controller(psi, {3.4 * 0.1, 0.9 * 0.1, 0}, pid, dt);
      pid = r.state;
      s = step_dynamics(s, mix_commands({0, 0, 0, r.output}), p, {}, dt);
    }
    CHECK(std::abs(target - s.attitude.yaw) < std::abs(psi0));
  }
}

TEST_CASE("depth_controller") {
  const PidGains raw{600, 50, 0};
  CHECK(depth_controller(0.35, 0.35, raw, {}, 0.02).output == 0.0);
  CHECK(depth_controller(0.34, 0.35, raw, {}, 0.02).output == 1.0);
  CHECK(depth_controller(0.36, 0.35, raw, {}, 0.02).output == -1.0);
  // normalized gains: 600 / 600 * 0.01
  const auto r = depth_controller(0.34, 0.35, raw.scaled(1.0 / 600), {}, 0.02);
  CHECK(r.output == doctest::Approx(0.01));
}

TEST_CASE("depth hold in closed loop reaches and holds the target") {
  const VehicleParams p;
  VehicleState s;
  const double target = 0.35;
  const PidGains g = PidGains{600, 50, 0}.scaled(1.0 / 600);
  PidState pid;
  double sum = 0;
  int n = 0;
  const double dt = 0.02;
  for (int i = 0; i < static_cast<int>(120 / dt); ++i) {
    const auto r = depth_controller(s.position.z(), target, g, pid, dt);
    pid = r.state;
    s = step_dynamics(s, mix_commands({0, r.output, 0, 0}), p, {}, dt);
    if (s.time >= 24) {
      sum += std::abs(s.position.z() - target);
      ++n;
    }
    if (s.time >= 10) CHECK(std::abs(s.position.z() - target) < 0.1);
  }
  CHECK(sum / n <= 0.05);
}
