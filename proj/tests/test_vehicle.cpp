#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "cavesim/vehicle.hpp"
#include "test_support.hpp"

using namespace cavesim;
using test::uniform;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

VehicleParams neutral_params() {
  VehicleParams p;
  p.buoyancy_force = p.mass * kGravity;
  return p;
}

double kinetic_energy(const VehicleState& s, const VehicleParams& p) {
  return 0.5 * p.mass * s.linear_velocity.squaredNorm() +
         0.5 * (p.inertia.array() * s.angular_velocity.array().square()).sum();
}

VehicleState run(VehicleState s, const ThrusterCommand& cmd, const VehicleParams& p, double dt,
                 double duration) {
  const CurrentField still;
  const int n = static_cast<int>(std::lround(duration / dt));
  for (int i = 0; i < n; ++i) s = step_dynamics(s, cmd, p, still, dt);
  return s;
}

}  // namespace

TEST_CASE("mix_commands examples") {
  CHECK(mix_commands({0, 0, 0, 0}).t == Vec4::Zero());

  const auto surge = mix_commands({1, 0, 0, 0}).t;
  CHECK(surge[0] > 0);
  CHECK(surge[0] == surge[1]);
  CHECK(surge[2] == 0);
  CHECK(surge[3] == 0);

  for (double y : {-0.7, 0.2, 1.0}) {
    const auto t = mix_commands({0, 0, 0, y}).t;
    CHECK(t[0] == doctest::Approx(-t[1]));
    CHECK(t[2] == 0);
    CHECK(t[3] == 0);
  }
}

TEST_CASE("mixing round trip inside the clamp region") {
  for (int i = 0; i < 1000; ++i) {
    // |surge| + |yaw| <= 1 and |heave| + |roll| <= 1 keep every thruster in range
    const double s = uniform(-1, 1);
    const double y = uniform(-1, 1) * (1 - std::abs(s));
    const double h = uniform(-1, 1);
    const double r = uniform(-1, 1) * (1 - std::abs(h));
    const DofCommand d{s, h, r, y};
    const ThrusterCommand t = mix_commands(d);
    CHECK((t.t.cwiseAbs().array() <= 1.0 + 1e-12).all());
    CHECK((forward_mix(t).vec() - d.vec()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("mix_commands clamps silently") {
  const auto t = mix_commands({1, 1, 1, 1}).t;
  CHECK((t.cwiseAbs().array() <= 1.0).all());
}

TEST_CASE("yaw command and the wrench sign agree") {
  // positive yaw swings the bow to port, i.e. negative body z moment
  const VehicleParams p;
  const Vec4 wrench = p.mixing * mix_commands({0, 0, 0, 0.5}).t;
  CHECK(wrench[3] < 0);
  const Vec4 roll = p.mixing * mix_commands({0, 0, 0.5, 0}).t;
  CHECK(roll[2] > 0);
}

TEST_CASE("static equilibrium") {
  const VehicleParams p = neutral_params();
  VehicleState s;
  s.position = {1, 2, 0.5};
  s.attitude = {0, 0, 0.7};
  const auto next = step_dynamics(s, {}, p, {}, 0.02);
  CHECK(next.position == s.position);
  CHECK(next.linear_velocity == Vec3::Zero());
  CHECK(next.angular_velocity == Vec3::Zero());
  CHECK(next.attitude.yaw == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(next.time == doctest::Approx(0.02));
}

TEST_CASE("positive buoyancy rises from the first step") {
  const VehicleParams p;  // 2 % buoyant by default
  VehicleState s;
  s.position = {0, 0, 0.35};
  const auto next = step_dynamics(s, {}, p, {}, 0.02);
  CHECK(next.position.z() < s.position.z());
  VehicleState t = s;
  for (int i = 0; i < 200; ++i) {
    const auto n = step_dynamics(t, {}, p, {}, 0.02);
    CHECK(n.position.z() < t.position.z());
    t = n;
  }
}

TEST_CASE("surge converges to the quadratic-drag terminal speed") {
  const VehicleParams p = neutral_params();
  for (double u : {0.2, 0.5, 1.0}) {
    const auto cmd = mix_commands({u, 0, 0, 0});
    const auto s = run(VehicleState{}, cmd, p, 0.02, 60.0);
    const double force = p.max_thrust * (cmd.t[0] + cmd.t[1]);
    const double vt = std::sqrt(force / p.linear_drag_coeffs.x());
    CHECK(s.linear_velocity.x() == doctest::Approx(vt).epsilon(0.02));
  }
  // default drag gives about 0.5 m/s at full thrust
  const auto full = run(VehicleState{}, mix_commands({1, 0, 0, 0}), p, 0.02, 60.0);
  CHECK(full.linear_velocity.x() == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("unforced motion never gains kinetic energy") {
  VehicleParams p = neutral_params();
  p.center_of_buoyancy_offset = Vec3::Zero();
  for (int trial = 0; trial < 1000; ++trial) {
    VehicleState s;
    s.position = {0, 0, 5};
    s.attitude = test::random_attitude(1.2);
    s.linear_velocity = test::random_vec(-1, 1);
    s.angular_velocity = test::random_vec(-2, 2);
    double e = kinetic_energy(s, p);
    for (int i = 0; i < 20; ++i) {
      s = step_dynamics(s, {}, p, {}, uniform(0.001, 0.1));
      const double e2 = kinetic_energy(s, p);
      CHECK(e2 <= e * (1 + 1e-12));
      e = e2;
    }
  }
}

TEST_CASE("roll oscillation decays under the buoyancy couple") {
  const VehicleParams p = neutral_params();
  VehicleState s;
  s.position = {0, 0, 1};
  s.attitude = {10 * kDeg, 0, 0};
  std::vector<double> peaks;
  double prev = s.attitude.roll, prev2 = prev;
  for (int i = 0; i < 30000; ++i) {
    s = step_dynamics(s, {}, p, {}, 0.01);
    const double r = std::abs(s.attitude.roll);
    if (prev > prev2 && prev >= r) peaks.push_back(prev);
    prev2 = prev;
    prev = r;
  }
  REQUIRE(peaks.size() >= 3);
  for (std::size_t i = 1; i < peaks.size(); ++i) CHECK(peaks[i] <= peaks[i - 1]);
  CHECK(peaks.back() < 10 * kDeg);
}

TEST_CASE("rotation stays orthonormal over long random runs") {
  const VehicleParams p;
  for (int trial = 0; trial < 50; ++trial) {
    VehicleState s;
    s.position = {0, 0, 50};
    s.angular_velocity = test::random_vec(-1, 1);
    ThrusterCommand cmd{Vec4{uniform(-1, 1), uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)}};
    for (int i = 0; i < 500; ++i) {
      s = step_dynamics(s, cmd, p, {}, 0.02);
      CHECK(rotation_defect(s.rotation()) < 1e-9);
    }
  }
}

TEST_CASE("step_dynamics is deterministic") {
  const VehicleParams p;
  CurrentField c;
  c.velocity = {0.1, 0.05, 0};
  c.gust_amplitude = {0.02, 0.02, 0.01};
  c.gust_period = 3;
  VehicleState a, b;
  const ThrusterCommand cmd{Vec4{0.3, -0.1, 0.2, 0.25}};
  for (int i = 0; i < 500; ++i) {
    a = step_dynamics(a, cmd, p, c, 0.02);
    b = step_dynamics(b, cmd, p, c, 0.02);
  }
  CHECK(a.position == b.position);
  CHECK(a.linear_velocity == b.linear_velocity);
  CHECK(a.attitude.yaw == b.attitude.yaw);
}

TEST_CASE("halving dt converges at first order") {
  const VehicleParams p = neutral_params();
  const ThrusterCommand cmd = mix_commands({0.6, 0.1, 0, 0.2});
  VehicleState s0;
  s0.position = {0, 0, 2};
  const Vec3 a = run(s0, cmd, p, 0.04, 10).position;
  const Vec3 b = run(s0, cmd, p, 0.02, 10).position;
  const Vec3 c = run(s0, cmd, p, 0.01, 10).position;
  const double d1 = (a - b).norm();
  const double d2 = (b - c).norm();
  CHECK(d1 < 0.05);
  CHECK(d2 < 0.75 * d1);
}

TEST_CASE("step_dynamics rejects bad input") {
  const VehicleParams p;
  CHECK_THROWS_AS(step_dynamics({}, {}, p, {}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(step_dynamics({}, {}, p, {}, 0.2), std::invalid_argument);
  VehicleState bad;
  bad.linear_velocity.x() = std::nan("");
  CHECK_THROWS_AS(step_dynamics(bad, {}, p, {}, 0.02), SimulationFault);
}

TEST_CASE("read_imu") {
  Rng rng(1);
  VehicleState s;
  s.attitude = {0.1, -0.2, 2.0};
  const auto exact = read_imu(s, 0.0, rng);
  CHECK(exact.attitude.roll == 0.1);
  CHECK(exact.attitude.yaw == 2.0);

  const double sigma = 0.01;
  double sum = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) sum += read_imu(s, sigma, rng).attitude.pitch;
  CHECK(std::abs(sum / n - s.attitude.pitch) < 3 * sigma / 100);

  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(read_imu(s, 0.05, a).attitude.yaw == read_imu(s, 0.05, b).attitude.yaw);
  }
}

TEST_CASE("read_depth") {
  Rng rng(3);
  VehicleState s;
  s.position.z() = 0.35;
  const DepthSensorModel noiseless{0.0, 0.002};
  CHECK(std::abs(read_depth(s, noiseless, rng).depth - 0.35) <= 0.002);

  s.position.z() = 0.0;
  CHECK(read_depth(s, noiseless, rng).depth == 0.0);
  s.position.z() = -0.3;
  CHECK(read_depth(s, DepthSensorModel{}, rng).depth == 0.0);

  const DepthSensorModel model;
  for (int i = 0; i < 1000; ++i) {
    s.position.z() = uniform(0, 3);
    const double d = read_depth(s, model, rng).depth;
    CHECK(d >= 0);
    CHECK(std::abs(d / 0.002 - std::round(d / 0.002)) < 1e-6);
  }
}

TEST_CASE("read_sonar") {
  Rng rng(5);
  const SonarModel model;
  VehicleState s;
  s.position.z() = 0.35;
  const auto r = read_sonar(s, 1.5, model, rng);
  REQUIRE(r);
  CHECK(r->range >= 1.15);
  CHECK(r->range - 1.15 <= 0.005 * 1.15 + 1e-12);

  s.attitude.pitch = 60.1 * kDeg;
  CHECK_FALSE(read_sonar(s, 1.5, model, rng));
  s.attitude.pitch = 0;
  s.attitude.roll = -61 * kDeg;
  CHECK_FALSE(read_sonar(s, 1.5, model, rng));

  s.attitude = {};
  s.position.z() = 1.6;
  CHECK_FALSE(read_sonar(s, 1.5, model, rng));

  for (int i = 0; i < 1000; ++i) {
    s.position.z() = uniform(0, 1.4);
    s.attitude = {uniform(-0.9, 0.9), uniform(-0.9, 0.9), uniform(-3, 3)};
    const auto reading = read_sonar(s, 1.5, model, rng);
    REQUIRE(reading);
    const double clearance = 1.5 - s.position.z();
    CHECK(reading->range >= clearance);
    CHECK(reading->range <= clearance / s.rotation()(2, 2) * 1.005 + 1e-12);
    CHECK(reading->range <= 100.0);
  }
}
