#ifndef CAVESIM_SERVOING_HPP
#define CAVESIM_SERVOING_HPP

// Caveline visual servoing: contours in, heading angle out.
//
// Each camera frame is reduced to its caveline contours. No contours puts the
// servo in LOST, where it commands a slow in-place turn and gives up after one
// full revolution. Otherwise the waypoint is the centroid of the contour
// farthest from the image center, preferring contours ahead of the vehicle,
// and psi is the bearing of that waypoint in the image (u forward, v starboard).

#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "cavesim/control.hpp"
#include "cavesim/perception.hpp"
#include "cavesim/vehicle.hpp"

namespace cavesim {

enum class ServoMode { kTracking, kLost, kAborted };

const char* to_string(ServoMode mode);

struct ServoState {
  ServoMode mode{ServoMode::kTracking};
  double recovery_rotation_accum{0};  // radians, in [0, 2*pi]
};

struct ServoConfig {
  double cruise_surge{0.15};
  double target_depth{0.35};
  double recovery_yaw_rate{30.0 * std::numbers::pi / 180.0};
  double psi_slow{60.0 * std::numbers::pi / 180.0};
  int min_area_px{5};
  /// Look for contours ahead of the image center before using the whole frame.
  bool forward_crop{true};
  /// Radius of the forward window in pixels; 0 keeps the whole forward half.
  double lookahead_px{70.0};
};

struct HeadingCommand {
  double psi{0};
  double surge_setpoint{0};
};

struct HeadingResult {
  double psi{0};
  bool degenerate{false};
};

/// Centroid of the farthest contour from center, restricted to contours whose
/// centroid lies ahead (u > center.u) when any does. Ties keep the earliest
/// contour. Throws std::invalid_argument on an empty list.
Pixel select_waypoint(std::span<const Contour> contours, const Pixel& center);

/// atan2(v_c - v_i, u_c - u_i): 0 straight ahead, positive to starboard.
/// waypoint == center yields psi = 0 with the degenerate flag set.
HeadingResult compute_heading(const Pixel& center, const Pixel& waypoint);

struct ServoOutput {
  ControlSetpoints setpoints;
  ServoState state;
  std::vector<Contour> contours;
  bool has_waypoint{false};
  Pixel waypoint;
};

/// One pass of the servo loop on a single frame. Pure in (map, state, dt).
ServoOutput servo_step(const SegmentationMap& map, const ServoState& state, double dt,
                       const ServoConfig& config, const Pixel& center);

/// Maps heading/depth controller outputs onto the 4-DOF command. Surge is the
/// cruise setpoint scaled by max(0, 1 - |psi| / psi_slow); roll stays zero.
DofCommand map_to_thrust(const HeadingCommand& cmd, double heading_pid_out, double depth_pid_out,
                         double psi_slow);

}  // namespace cavesim

#endif  // CAVESIM_SERVOING_HPP
