#ifndef CAVESIM_CONTROL_HPP
#define CAVESIM_CONTROL_HPP

namespace cavesim {

struct PidGains {
  double kp{0};
  double kd{0};
  double ki{0};

  PidGains scaled(double s) const { return {kp * s, kd * s, ki * s}; }
  void validate() const;
  bool operator==(const PidGains&) const = default;
};

struct PidState {
  double prev_error{0};
  /// Integral term in command units (ki already applied), kept within +-integral_limit.
  double integral{0};
  bool initialized{false};
};

inline constexpr double kIntegralLimit = 0.5;

struct PidResult {
  double output;
  PidState state;
};

/// kp*e + ki*int(e) + kd*de/dt, derivative on error and zero on the first
/// call. Throws SimulationFault for a non-finite error, std::invalid_argument
/// for dt <= 0.
PidResult pid_update(const PidGains& gains, const PidState& pid, double error, double dt,
                     double integral_limit = kIntegralLimit);

/// Drives psi to zero: error = -psi, output clamped to [-1, 1]. A negative
/// output swings the bow to starboard (see DofCommand::yaw).
PidResult heading_controller(double psi, const PidGains& gains, const PidState& pid, double dt);

/// error = target - current (positive when too shallow, pushing down), clamped to [-1, 1].
PidResult depth_controller(double current_depth, double target_depth, const PidGains& gains,
                           const PidState& pid, double dt);

/// What servoing hands to the control layer, zero-order held between camera frames.
struct ControlSetpoints {
  double heading_error{0};  // psi, radians, > 0 means the waypoint is to starboard
  double target_depth{0};
  double surge_setpoint{0};
  double yaw_rate{0};  // open-loop heading ramp in rad/s, used while searching
};

}  // namespace cavesim

#endif  // CAVESIM_CONTROL_HPP
