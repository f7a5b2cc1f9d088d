#include "cavesim/vehicle.hpp"

#include <cmath>

namespace cavesim {

namespace {

// Normalized allocation: [surge heave roll yaw]^T = kForwardMix * [t1 t2 t3 t4]^T.
const Mat4& forward_allocation() {
  static const Mat4 m = [] {
    Mat4 a;
    a << 0.5, 0.5, 0.0, 0.0,  //
        0.0, 0.0, 0.5, 0.5,   //
        0.0, 0.0, -0.5, 0.5,  //
        -0.5, 0.5, 0.0, 0.0;
    return a;
  }();
  return m;
}

const Mat4& inverse_allocation() {
  static const Mat4 m = forward_allocation().inverse();
  return m;
}

double gaussian(Rng& rng, double sigma) {
  if (sigma <= 0) return 0.0;
  std::normal_distribution<double> n(0.0, sigma);
  return n(rng);
}

}  // namespace

bool VehicleState::finite() const {
  return position.allFinite() && linear_velocity.allFinite() && angular_velocity.allFinite() &&
         std::isfinite(attitude.roll) && std::isfinite(attitude.pitch) &&
         std::isfinite(attitude.yaw) && std::isfinite(time);
}

Mat4 VehicleParams::default_mixing(double horizontal_arm_m, double vertical_arm_m) {
  Mat4 m;
  m << 1, 1, 0, 0,                             // Fx
      0, 0, 1, 1,                              // Fz
      0, 0, -vertical_arm_m, vertical_arm_m,   // Mx
      horizontal_arm_m, -horizontal_arm_m, 0, 0;  // Mz
  return m;
}

void VehicleParams::validate() const {
  if (!(mass > 0)) throw std::invalid_argument("vehicle mass must be positive");
  if (!(max_thrust > 0)) throw std::invalid_argument("max thrust must be positive");
  if (!(inertia.array() > 0).all()) throw std::invalid_argument("inertia must be positive");
  if ((linear_drag_coeffs.array() < 0).any() || (angular_drag_coeffs.array() < 0).any()) {
    throw std::invalid_argument("drag coefficients must be non-negative");
  }
  if (std::abs(mixing.determinant()) < 1e-12) {
    throw std::invalid_argument("thruster mixing matrix is singular");
  }
}

ThrusterCommand mix_commands(const DofCommand& dof) {
  return ThrusterCommand::clamped(inverse_allocation() * dof.vec());
}

DofCommand forward_mix(const ThrusterCommand& cmd) {
  const Vec4 d = forward_allocation() * cmd.t;
  return {d[0], d[1], d[2], d[3]};
}

VehicleState step_dynamics(const VehicleState& state, const ThrusterCommand& cmd,
                           const VehicleParams& params, const CurrentField& env, double dt) {
  if (!(dt > 0) || dt > 0.1 + 1e-12) {
    throw std::invalid_argument("step_dynamics: dt must lie in (0, 0.1]");
  }
  if (!state.finite()) throw SimulationFault("step_dynamics: non-finite input state");

  const Mat3 R = state.rotation();
  const Vec4 wrench = params.mixing * (params.max_thrust * cmd.t.cwiseMax(-1.0).cwiseMin(1.0));

  // Translation, worked in body axes where the drag coefficients live.
  const Vec3 current = sample_current(env, state.time);
  const Vec3 weight_net{0.0, 0.0, params.mass * kGravity - params.buoyancy_force};
  const Vec3 thrust_body{wrench[0], 0.0, wrench[1]};
  const Vec3 accel_body = (R.transpose() * weight_net + thrust_body) / params.mass;
  const Vec3 v_rel = R.transpose() * (state.linear_velocity - current);
  Vec3 v_rel_next;
  for (int i = 0; i < 3; ++i) {
    const double damping = dt * params.linear_drag_coeffs[i] * std::abs(v_rel[i]) / params.mass;
    v_rel_next[i] = (v_rel[i] + dt * accel_body[i]) / (1.0 + damping);
  }

  // Rotation: thrust torques plus the buoyancy couple about the center of gravity.
  const Vec3 buoyancy_body = R.transpose() * Vec3{0.0, 0.0, -params.buoyancy_force};
  const Vec3 torque = Vec3{wrench[2], 0.0, wrench[3]} +
                      params.center_of_buoyancy_offset.cross(buoyancy_body);
  Vec3 omega_next;
  for (int i = 0; i < 3; ++i) {
    const double w = state.angular_velocity[i];
    const double damping = dt * params.angular_drag_coeffs[i] * std::abs(w) / params.inertia[i];
    omega_next[i] = (w + dt * torque[i] / params.inertia[i]) / (1.0 + damping);
  }

  VehicleState next;
  next.linear_velocity = R * v_rel_next + current;
  next.position = state.position + dt * next.linear_velocity;
  next.angular_velocity = omega_next;
  const double angle = omega_next.norm() * dt;
  Mat3 R_next = R;
  if (angle > 0) R_next = R * Eigen::AngleAxisd(angle, omega_next.normalized()).toRotationMatrix();
  next.attitude = rotation_to_euler(R_next);
  next.time = state.time + dt;

  if (!next.finite()) throw SimulationFault("step_dynamics: state became non-finite");
  return next;
}

ImuReading read_imu(const VehicleState& state, double sigma_rad, Rng& rng) {
  ImuReading r;
  r.timestamp = state.time;
  r.attitude = state.attitude;
  if (sigma_rad > 0) {
    r.attitude.roll += gaussian(rng, sigma_rad);
    r.attitude.pitch += gaussian(rng, sigma_rad);
    r.attitude.yaw += gaussian(rng, sigma_rad);
    r.attitude = r.attitude.wrapped();
  }
  return r;
}

DepthReading read_depth(const VehicleState& state, const DepthSensorModel& model, Rng& rng) {
  double z = state.position.z() + gaussian(rng, model.sigma_m);
  if (model.quantum_m > 0) z = std::round(z / model.quantum_m) * model.quantum_m;
  return {std::max(z, 0.0), state.time};
}

std::optional<SonarReading> read_sonar(const VehicleState& state, double floor_depth,
                                       const SonarModel& model, Rng& rng) {
  if (std::abs(state.attitude.roll) >= model.max_tilt_rad ||
      std::abs(state.attitude.pitch) >= model.max_tilt_rad) {
    return std::nullopt;
  }
  const double clearance = floor_depth - state.position.z();
  const double cos_tilt = state.rotation()(2, 2);
  if (clearance <= 0 || cos_tilt <= 0) return std::nullopt;

  double range = clearance / cos_tilt + gaussian(rng, model.sigma_m);
  if (range <= 0) return std::nullopt;
  if (model.resolution > 0) {
    const double step = std::log1p(model.resolution);
    // rounded up so a reading never undercuts the true slant range
    range = std::exp(std::ceil(std::log(range) / step - 1e-9) * step);
  }
  if (range > model.max_range_m) return std::nullopt;
  return SonarReading{range, state.time};
}

}  // namespace cavesim
