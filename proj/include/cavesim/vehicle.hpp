#ifndef CAVESIM_VEHICLE_HPP
#define CAVESIM_VEHICLE_HPP

#include <Eigen/Core>

#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "cavesim/errors.hpp"
#include "cavesim/geometry.hpp"
#include "cavesim/world.hpp"

namespace cavesim {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

/// Random stream owned by one consumer (one sensor, one noise source).
using Rng = std::mt19937_64;

inline constexpr double kGravity = 9.81;

struct VehicleState {
  Vec3 position = Vec3::Zero();          // {G}, z = depth
  EulerAngles attitude;                  // body -> {G}
  Vec3 linear_velocity = Vec3::Zero();   // {G}
  Vec3 angular_velocity = Vec3::Zero();  // body frame
  double time{0};

  Mat3 rotation() const { return euler_to_rotation(attitude); }
  bool finite() const;
};

/// Thrusters: 1 port horizontal, 2 starboard horizontal, 3 port vertical,
/// 4 starboard vertical. Horizontal thrust acts along body +x, vertical along
/// body +z (down).
struct ThrusterCommand {
  Vec4 t = Vec4::Zero();

  static ThrusterCommand clamped(const Vec4& raw) { return {raw.cwiseMax(-1.0).cwiseMin(1.0)}; }
};

/// Normalized 4-DOF command. yaw > 0 swings the bow to port, roll > 0 lowers
/// the starboard side, heave > 0 pushes down.
struct DofCommand {
  double surge{0};
  double heave{0};
  double roll{0};
  double yaw{0};

  Vec4 vec() const { return {surge, heave, roll, yaw}; }
};

struct VehicleParams {
  double mass{8.8};
  double buoyancy_force{8.8 * kGravity * 1.02};
  Vec3 center_of_buoyancy_offset{0.0, 0.0, -0.02};
  Vec3 inertia{0.12, 0.3, 0.45};
  Vec3 linear_drag_coeffs{280.0, 400.0, 300.0};
  Vec3 angular_drag_coeffs{0.6, 0.6, 0.8};
  double max_thrust{35.0};
  /// Body wrench [Fx, Fz, Mx, Mz] per newton of thruster force.
  Mat4 mixing = default_mixing(0.08, 0.09);
  Vec3 camera_to_sonar_offset{-0.12, 0.0, 0.03};

  static Mat4 default_mixing(double horizontal_arm_m, double vertical_arm_m);
  void validate() const;
};

/// Inverse allocation from a 4-DOF command to thruster commands, clamped.
ThrusterCommand mix_commands(const DofCommand& dof);
/// The normalized allocation that mix_commands inverts.
DofCommand forward_mix(const ThrusterCommand& cmd);

/// One semi-implicit Euler step. Drag is treated implicitly per axis so that
/// an unforced vehicle never gains energy. Throws SimulationFault on a
/// non-finite result and std::invalid_argument for dt outside (0, 0.1].
VehicleState step_dynamics(const VehicleState& state, const ThrusterCommand& cmd,
                           const VehicleParams& params, const CurrentField& env, double dt);

struct ImuReading {
  EulerAngles attitude;
  double timestamp{0};
};

struct DepthReading {
  double depth{0};
  double timestamp{0};
};

struct SonarReading {
  double range{0};
  double timestamp{0};
};

struct DepthSensorModel {
  double sigma_m{0.002};
  /// 0.2 mbar of water column, rounded.
  double quantum_m{0.002};
};

struct SonarModel {
  double sigma_m{0.0};
  /// Relative resolution; readings lie on a geometric lattice with this ratio.
  double resolution{0.005};
  double max_range_m{100.0};
  double max_tilt_rad{60.0 * std::numbers::pi / 180.0};
};

ImuReading read_imu(const VehicleState& state, double sigma_rad, Rng& rng);
DepthReading read_depth(const VehicleState& state, const DepthSensorModel& model, Rng& rng);
/// std::nullopt is the no-return signal (tilt past the limit, vehicle at or
/// below the floor, or range past the maximum).
std::optional<SonarReading> read_sonar(const VehicleState& state, double floor_depth,
                                       const SonarModel& model, Rng& rng);

}  // namespace cavesim

#endif  // CAVESIM_VEHICLE_HPP
