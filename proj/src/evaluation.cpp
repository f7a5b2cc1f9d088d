#include "cavesim/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cavesim {

namespace {

constexpr double kDegenerateRay = 1e-6;

}  // namespace

PipelineMeasurement tracking_error_pipeline(const SegmentationMap& map, const ImuReading& imu,
                                            const std::optional<SonarReading>& sonar,
                                            const Calibration& calib, int min_area_px) {
  PipelineMeasurement m;
  const auto contours = extract_contours(map, min_area_px);
  if (contours.empty()) return m;

  // Edge pixel closest to the principal point, over all contours.
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : contours) {
    for (const auto& p : c.edge_pixels(map.width(), map.height())) {
      const double du = p.u - calib.K.cx;
      const double dv = p.v - calib.K.cy;
      const double d2 = du * du + dv * dv;
      if (d2 < best) {
        best = d2;
        m.image_point = p;
      }
    }
  }
  if (!sonar) {
    m.status = MeasurementStatus::kNoSonar;
    return m;
  }

  const Vec3 ray = pixel_to_ray(calib.K, {double(m.image_point.u), double(m.image_point.v)});
  const Mat3 R = relative_rotation(euler_to_rotation(calib.initial_attitude),
                                   euler_to_rotation(imu.attitude));
  const Vec3& t = calib.camera_to_sonar_offset;

  // Direction part of the homogeneous transform; the offset does not scale with depth.
  const Vec3 abc = R * ray;
  if (std::abs(abc.z()) < kDegenerateRay) {
    m.status = MeasurementStatus::kDegenerate;
    return m;
  }
  const double sonar_depth = R(2, 2) * sonar->range;
  const double lambda = sonar_depth / abc.z();
  const Vec3 p_sonar = lambda * abc + t;
  m.point_in_n = -t + p_sonar;
  m.signed_delta = m.point_in_n.y();
  m.delta = std::abs(m.signed_delta);
  m.status = std::isfinite(m.delta) ? MeasurementStatus::kOk : MeasurementStatus::kDegenerate;
  return m;
}

OracleResult tracking_error_oracle(const VehicleState& state, const CavelinePath& path) {
  OracleResult best;
  best.delta = std::numeric_limits<double>::infinity();
  const Vec3& p = state.position;
  for (std::size_t i = 0; i < path.segment_count(); ++i) {
    const Vec3 a = path.segment_start(i);
    const Vec3 ab = path.segment_end(i) - a;
    const Vec3 dir = ab.normalized();

    Vec3 lateral = Vec3::UnitZ().cross(dir);
    if (lateral.norm() < 1e-9) lateral = Vec3::UnitX();  // vertical segment
    const Vec3 normal = dir.cross(lateral.normalized()).normalized();
    const Vec3 in_plane = p - (p - a).dot(normal) * normal;

    const double s = std::clamp((in_plane - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    const Vec3 q = a + s * ab;
    const double d = (in_plane - q).norm();
    if (d < best.delta) {
      best.delta = d;
      best.nearest = q;
      best.segment = i;
      best.arc_length = path.arc_length_at(i) + s * ab.norm();
    }
  }
  return best;
}

Stats compute_stats(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("compute_stats: no values");
  Stats s;
  double m2 = 0;
  s.max = -std::numeric_limits<double>::infinity();
  for (double x : values) {
    ++s.count;
    const double d = x - s.mean;
    s.mean += d / s.count;
    m2 += d * (x - s.mean);
    s.max = std::max(s.max, x);
  }
  s.std = std::sqrt(std::max(0.0, m2 / s.count));
  return s;
}

TrialSummary summarize(const TrialLog& log, double warmup_s, DeltaSource source) {
  std::vector<double> deltas;
  std::vector<double> depths;
  TrialSummary out;
  for (const auto& row : log) {
    if (row.t < warmup_s) continue;
    depths.push_back(std::abs(row.depth_error));
    if (source == DeltaSource::kOracle) {
      deltas.push_back(row.delta_oracle);
    } else if (row.delta_pipeline) {
      deltas.push_back(*row.delta_pipeline);
    } else {
      ++out.no_measurement_rows;
    }
  }
  if (depths.empty()) throw std::invalid_argument("summarize: no rows after warmup");
  out.depth = compute_stats(depths);
  if (!deltas.empty()) out.delta = compute_stats(deltas);
  return out;
}

double factor_of_safety(double yield_strength_mpa, double max_stress_mpa) {
  if (!(yield_strength_mpa > 0) || !(max_stress_mpa > 0)) {
    throw std::invalid_argument("factor_of_safety: stresses must be positive");
  }
  return yield_strength_mpa / max_stress_mpa;
}

}  // namespace cavesim
