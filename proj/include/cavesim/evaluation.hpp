#ifndef CAVESIM_EVALUATION_HPP
#define CAVESIM_EVALUATION_HPP

#include <optional>
#include <string>
#include <vector>

#include "cavesim/geometry.hpp"
#include "cavesim/perception.hpp"
#include "cavesim/servoing.hpp"
#include "cavesim/vehicle.hpp"
#include "cavesim/world.hpp"

namespace cavesim {

/// Fixed quantities the sensor-based tracking error needs. The initial
/// attitude defines frame {N}, whose x axis is assumed to run along the line.
struct Calibration {
  CameraIntrinsics K;
  Vec3 camera_to_sonar_offset = Vec3::Zero();
  EulerAngles initial_attitude;
};

enum class MeasurementStatus { kOk, kNoContour, kNoSonar, kDegenerate };

struct PipelineMeasurement {
  MeasurementStatus status{MeasurementStatus::kNoContour};
  double delta{0};         // |y| of the line point in {N}, meters
  double signed_delta{0};  // y of the line point in {N}
  PixelIndex image_point;  // edge pixel used
  Vec3 point_in_n = Vec3::Zero();

  bool ok() const { return status == MeasurementStatus::kOk; }
};

/// Sensor-only tracking error. Picks the contour edge pixel nearest the
/// principal point, back-projects it, scales the ray with the sonar range
/// and reads off the lateral coordinate in {N}.
PipelineMeasurement tracking_error_pipeline(const SegmentationMap& map, const ImuReading& imu,
                                            const std::optional<SonarReading>& sonar,
                                            const Calibration& calib, int min_area_px = 1);

struct OracleResult {
  double delta{0};
  Vec3 nearest = Vec3::Zero();
  std::size_t segment{0};
  double arc_length{0};
};

/// Ground-truth tracking error: distance, within the local plane of the
/// caveline, from the optical center's projection to the nearest line point.
/// The local plane of a segment contains the segment and the horizontal
/// direction perpendicular to it.
OracleResult tracking_error_oracle(const VehicleState& state, const CavelinePath& path);

struct TrialRow {
  double t{0};
  Vec3 position = Vec3::Zero();
  EulerAngles attitude;
  double psi{0};
  std::optional<double> delta_pipeline;
  double delta_oracle{0};
  double depth_error{0};  // true depth minus target
  ServoMode mode{ServoMode::kTracking};
  std::optional<double> delta_pipeline_signed;

  bool operator==(const TrialRow&) const = default;
};

using TrialLog = std::vector<TrialRow>;

struct Stats {
  double mean{0};
  double std{0};  // population
  double max{0};
  int count{0};
};

/// Single-pass (Welford) statistics. Throws std::invalid_argument when empty.
Stats compute_stats(const std::vector<double>& values);

enum class DeltaSource { kPipeline, kOracle };

struct TrialSummary {
  std::optional<Stats> delta;  // empty when no row after warmup has a measurement
  Stats depth;                 // over |depth_error|
  int no_measurement_rows{0};
};

/// Statistics over rows with t >= warmup_s. Throws std::invalid_argument when
/// no row survives the warmup.
TrialSummary summarize(const TrialLog& log, double warmup_s,
                       DeltaSource source = DeltaSource::kPipeline);

/// sigma_yield / sigma_max. Throws std::invalid_argument for non-positive input.
double factor_of_safety(double yield_strength_mpa, double max_stress_mpa);

}  // namespace cavesim

#endif  // CAVESIM_EVALUATION_HPP
