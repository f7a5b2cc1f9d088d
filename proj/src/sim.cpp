#include "cavesim/sim.hpp"

#include <cmath>
#include <random>

#include "cavesim/control.hpp"
#include "cavesim/errors.hpp"

namespace cavesim {

namespace {

// Independent random streams per consumer so that enabling one noise source
// never shifts another.
enum Stream : std::uint32_t {
  kImuStream = 1,
  kDepthStream,
  kCameraStream,
  kEvalCameraStream,
  kEvalImuStream,
  kEvalSonarStream,
};

Rng make_stream(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

// Time-based scheduler on an exact n * dt clock.
struct Ticker {
  double period;
  double next;

  bool due(double t) {
    if (t + 1e-9 < next) return false;
    while (next <= t + 1e-9) next += period;
    return true;
  }
};

bool near_corner(const CavelinePath& path, const Vec3& point, double radius) {
  const auto& v = path.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!path.closed() && (i == 0 || i + 1 == v.size())) continue;
    if ((v[i] - point).norm() <= radius) return true;
  }
  return false;
}

}  // namespace

const char* to_string(TrialOutcome outcome) {
  switch (outcome) {
    case TrialOutcome::kCompleted:
      return "completed";
    case TrialOutcome::kAborted:
      return "aborted";
    case TrialOutcome::kSurfaced:
      return "surfaced";
  }
  return "?";
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

TrialResult run_simulation(const SimConfig& config, const FrameSink& frames) {
  config.validate();
  const auto& sc = config.scenario;
  const auto& path = sc.path;
  const double dt = config.timing.dt;
  const double path_length = path.length();
  const Pixel center = config.camera.center();

  Rng imu_rng = make_stream(sc.seed, kImuStream);
  Rng depth_rng = make_stream(sc.seed, kDepthStream);
  Rng camera_rng = make_stream(sc.seed, kCameraStream);
  Rng eval_camera_rng = make_stream(sc.seed, kEvalCameraStream);
  Rng eval_imu_rng = make_stream(sc.seed, kEvalImuStream);
  Rng eval_sonar_rng = make_stream(sc.seed, kEvalSonarStream);

  const PidGains heading_gains = config.control.heading.scaled(config.control.heading_gain_scale);
  const PidGains depth_gains = config.control.depth.scaled(config.control.depth_gain_scale);

  VehicleState state;
  state.position = sc.initial_position;
  state.attitude = sc.initial_attitude;

  TrialResult result;
  Calibration calib;
  calib.K = config.camera;
  calib.camera_to_sonar_offset = config.vehicle.camera_to_sonar_offset;
  calib.initial_attitude = read_imu(state, config.sensors.imu_sigma_rad, eval_imu_rng).attitude;

  const OracleResult start = tracking_error_oracle(state, path);
  result.start_projection = start.nearest;
  double last_arc = start.arc_length;

  ServoState servo;
  ControlSetpoints setpoints;
  setpoints.target_depth = sc.target_depth;
  double yaw_target = state.attitude.yaw;
  PidState heading_pid;
  PidState depth_pid;
  double prev_yaw = state.attitude.yaw;

  Ticker camera_tick{config.timing.camera_period, config.timing.stabilize_s};
  Ticker eval_tick{config.timing.eval_period, 0.0};
  int frame_index = 0;
  const auto total_steps = static_cast<long>(std::ceil(sc.duration / dt - 1e-9));

  auto log_row = [&](double t, double psi) {
    TrialRow row;
    row.t = t;
    row.position = state.position;
    row.attitude = state.attitude;
    row.psi = psi;
    row.delta_oracle = tracking_error_oracle(state, path).delta;
    row.depth_error = state.position.z() - sc.target_depth;
    row.mode = servo.mode;
    if (servo.mode == ServoMode::kTracking) {
      SegmentationMap map(config.camera.width, config.camera.height);
      if (!config.camera_blacked_out(t)) {
        map = corrupt(render_downcam(state, path, config.camera), sc.noise, eval_camera_rng);
      }
      const auto imu = read_imu(state, config.sensors.imu_sigma_rad, eval_imu_rng);
      const auto sonar = read_sonar(state, sc.floor_depth, config.sensors.sonar, eval_sonar_rng);
      const auto m = tracking_error_pipeline(map, imu, sonar, calib, config.servo.min_area_px);
      if (m.ok()) {
        row.delta_pipeline = m.delta;
        row.delta_pipeline_signed = m.signed_delta;
      }
    }
    result.log.push_back(row);
  };

  double psi = 0.0;
  for (long n = 0; n <= total_steps; ++n) {
    const double t = static_cast<double>(n) * dt;
    state.time = t;

    const ImuReading imu = read_imu(state, config.sensors.imu_sigma_rad, imu_rng);
    const DepthReading depth = read_depth(state, config.sensors.depth, depth_rng);

    if (camera_tick.due(t)) {
      SegmentationMap map(config.camera.width, config.camera.height);
      if (!config.camera_blacked_out(t)) {
        map = corrupt(render_downcam(state, path, config.camera), sc.noise, camera_rng);
      }
      if (frames) frames(frame_index, t, map);
      ++frame_index;

      const ServoMode before = servo.mode;
      auto out = servo_step(map, servo, config.timing.camera_period, config.servo, center);
      servo = out.state;
      setpoints = out.setpoints;
      result.setpoint_times.push_back(t);
      if (servo.mode == ServoMode::kTracking) {
        yaw_target = imu.attitude.yaw + setpoints.heading_error;
        if (before == ServoMode::kLost) result.resumed_after_lost = true;
      } else if (servo.mode == ServoMode::kLost && before != ServoMode::kLost) {
        yaw_target = imu.attitude.yaw;
        result.last_lost_yaw_turned = 0.0;
        ++result.lost_episodes;
      }
    }

    if (servo.mode == ServoMode::kLost) {
      result.last_lost_yaw_turned += wrap_angle(state.attitude.yaw - prev_yaw);
    }
    prev_yaw = state.attitude.yaw;

    if (eval_tick.due(t)) log_row(t, psi);

    if (servo.mode == ServoMode::kAborted) {
      result.outcome = TrialOutcome::kAborted;
      if (result.log.empty() || result.log.back().t < t) log_row(t, psi);
      break;
    }
    if (n == total_steps) break;

    // Controllers at every dt on zero-order-held setpoints.
    const bool steering = t + 1e-9 >= config.timing.stabilize_s;
    psi = wrap_angle(yaw_target - imu.attitude.yaw);
    double heading_out = 0.0;
    if (steering) {
      auto h = heading_controller(psi, heading_gains, heading_pid, dt);
      heading_pid = h.state;
      heading_out = h.output;
    }
    auto d = depth_controller(depth.depth, setpoints.target_depth, depth_gains, depth_pid, dt);
    depth_pid = d.state;

    const HeadingCommand cmd{psi, steering ? setpoints.surge_setpoint : 0.0};
    const DofCommand dof = map_to_thrust(cmd, heading_out, d.output, config.servo.psi_slow);
    const ThrusterCommand thrust = mix_commands(dof);
    const DofCommand achieved = forward_mix(thrust);
    if ((achieved.vec() - dof.vec()).cwiseAbs().maxCoeff() > 1e-12) ++result.saturated_steps;

    state = step_dynamics(state, thrust, config.vehicle, sc.current, dt);
    state.time = static_cast<double>(n + 1) * dt;
    if (servo.mode == ServoMode::kLost) yaw_target += setpoints.yaw_rate * dt;

    const OracleResult here = tracking_error_oracle(state, path);
    double ds = here.arc_length - last_arc;
    if (path.closed()) ds -= path_length * std::round(ds / path_length);
    result.path_progress += ds;
    last_arc = here.arc_length;
    result.max_cross_track = std::max(result.max_cross_track, here.delta);
    if (near_corner(path, here.nearest, config.corner_radius)) {
      result.max_corner_cross_track = std::max(result.max_corner_cross_track, here.delta);
    }

    if (state.position.z() <= 0.0) {
      result.outcome = TrialOutcome::kSurfaced;
      log_row(state.time, psi);
      break;
    }
    if (config.timing.stop_after_loops > 0 &&
        std::abs(result.path_progress) >= config.timing.stop_after_loops * path_length) {
      log_row(state.time, psi);
      break;
    }
  }
  result.final_state = state;
  return result;
}

}  // namespace cavesim
