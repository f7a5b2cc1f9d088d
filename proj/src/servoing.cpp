#include "cavesim/servoing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cavesim {

namespace {

constexpr double kFullTurn = 2.0 * std::numbers::pi;
// Absorbs rounding when n * (rate * dt) should land exactly on a full turn.
constexpr double kTurnSlack = 1e-9;

double squared_distance(const Pixel& a, const Pixel& b) {
  const double du = a.u - b.u;
  const double dv = a.v - b.v;
  return du * du + dv * dv;
}

}  // namespace

const char* to_string(ServoMode mode) {
  switch (mode) {
    case ServoMode::kTracking:
      return "TRACKING";
    case ServoMode::kLost:
      return "LOST";
    case ServoMode::kAborted:
      return "ABORTED";
  }
  return "?";
}

Pixel select_waypoint(std::span<const Contour> contours, const Pixel& center) {
  if (contours.empty()) throw std::invalid_argument("select_waypoint: no contours");
  if (contours.size() == 1) return contours.front().centroid;

  const bool any_ahead = std::any_of(contours.begin(), contours.end(),
                                     [&](const Contour& c) { return c.centroid.u > center.u; });
  const Contour* best = nullptr;
  double best_d2 = -1.0;
  for (const auto& c : contours) {
    if (any_ahead && !(c.centroid.u > center.u)) continue;
    const double d2 = squared_distance(c.centroid, center);
    if (d2 > best_d2) {
      best = &c;
      best_d2 = d2;
    }
  }
  return best->centroid;
}

HeadingResult compute_heading(const Pixel& center, const Pixel& waypoint) {
  const double du = waypoint.u - center.u;
  const double dv = waypoint.v - center.v;
  if (du == 0.0 && dv == 0.0) return {0.0, true};
  return {std::atan2(dv, du), false};
}

ServoOutput servo_step(const SegmentationMap& map, const ServoState& state, double dt,
                       const ServoConfig& config, const Pixel& center) {
  if (!(dt > 0)) throw std::invalid_argument("servo_step: dt must be positive");
  ServoOutput out;
  out.state = state;
  if (state.mode == ServoMode::kAborted) return out;

  if (config.forward_crop) {
    out.contours = extract_contours(map.forward_window(center, config.lookahead_px), config.min_area_px);
  }
  if (out.contours.empty()) out.contours = extract_contours(map, config.min_area_px);

  out.setpoints.target_depth = config.target_depth;
  if (out.contours.empty()) {
    const double accum = state.recovery_rotation_accum + config.recovery_yaw_rate * dt;
    if (accum >= kFullTurn - kTurnSlack) {
      out.state = {ServoMode::kAborted, kFullTurn};
      out.setpoints = {};
      return out;
    }
    out.state = {ServoMode::kLost, accum};
    out.setpoints.yaw_rate = config.recovery_yaw_rate;
    return out;
  }

  out.state = {ServoMode::kTracking, 0.0};
  out.waypoint = select_waypoint(out.contours, center);
  out.has_waypoint = true;
  out.setpoints.heading_error = compute_heading(center, out.waypoint).psi;
  out.setpoints.surge_setpoint = config.cruise_surge;
  return out;
}

DofCommand map_to_thrust(const HeadingCommand& cmd, double heading_pid_out, double depth_pid_out,
                         double psi_slow) {
  DofCommand d;
  d.yaw = std::clamp(heading_pid_out, -1.0, 1.0);
  d.heave = std::clamp(depth_pid_out, -1.0, 1.0);
  d.surge = cmd.surge_setpoint * std::max(0.0, 1.0 - std::abs(cmd.psi) / psi_slow);
  d.roll = 0.0;
  return d;
}

}  // namespace cavesim
