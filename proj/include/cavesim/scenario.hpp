#ifndef CAVESIM_SCENARIO_HPP
#define CAVESIM_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cavesim/control.hpp"
#include "cavesim/evaluation.hpp"
#include "cavesim/perception.hpp"
#include "cavesim/servoing.hpp"
#include "cavesim/vehicle.hpp"
#include "cavesim/world.hpp"

namespace cavesim {

/// The environment and mission a trial runs in.
struct Scenario {
  CavelinePath path = build_rectangle_loop(1.0, 2.0, 1.5, 0.01);
  double floor_depth{1.5};
  double target_depth{0.35};
  CurrentField current;
  NoiseModel noise;
  Vec3 initial_position{0.5, 0.0, 0.35};
  EulerAngles initial_attitude;
  double duration{120.0};
  std::uint64_t seed{1};

  void validate() const;
};

struct SensorConfig {
  double imu_sigma_rad{0.0};
  DepthSensorModel depth;
  SonarModel sonar;
};

struct ControlConfig {
  PidGains heading{3.4, 0.9, 0.0};
  PidGains depth{600.0, 50.0, 0.0};
  /// Multiplies the configured gains before use; maps hardware units onto
  /// normalized thruster commands.
  double heading_gain_scale{0.1};
  double depth_gain_scale{1.0 / 600.0};
};

struct TimingConfig {
  double dt{0.02};
  double camera_period{0.2};
  double eval_period{1.0 / 0.6};
  /// Heading and surge stay off this long after start while depth settles.
  double stabilize_s{0.0};
  /// Stop once the vehicle has advanced this many path lengths (0 disables).
  double stop_after_loops{0.0};
};

enum class GridTarget { kHeading, kDepth };

struct GridSettings {
  std::vector<std::pair<double, double>> heading_pairs;
  std::vector<std::pair<double, double>> depth_pairs;
  int repeats{5};
  DeltaSource metric{DeltaSource::kOracle};
};

/// Everything a scenario file resolves to.
struct SimConfig {
  std::string name{"default"};
  Scenario scenario;
  VehicleParams vehicle;
  CameraIntrinsics camera = CameraIntrinsics::default_downcam();
  std::vector<std::pair<double, double>> camera_blackouts;  // [start, end) windows, seconds
  SensorConfig sensors;
  ServoConfig servo;
  ControlConfig control;
  TimingConfig timing;
  double warmup_s{10.0};
  double corner_radius{0.4};
  GridSettings grid;

  void validate() const;
  bool camera_blacked_out(double t) const;
};

/// Heading pairs as tabulated for the caveline loop tuning run.
std::vector<std::pair<double, double>> default_heading_pairs();
/// Depth pairs as tabulated for the caveline loop tuning run.
std::vector<std::pair<double, double>> default_depth_pairs();

/// Parses the YAML scenario format (see scenarios/README.md). Throws ConfigError.
SimConfig parse_scenario(const std::string& text);
SimConfig load_scenario(const std::filesystem::path& file);
/// Fully resolved configuration as YAML; parse_scenario(to_yaml(c)) reproduces c.
std::string to_yaml(const SimConfig& config);

}  // namespace cavesim

#endif  // CAVESIM_SCENARIO_HPP
