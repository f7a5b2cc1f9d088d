#include "cavesim/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cavesim {

namespace {

constexpr double kMinVertexSeparation = 1e-6;

void require_positive(double value, const char* what) {
  if (!(value > 0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

CavelinePath::CavelinePath(std::vector<Vec3> vertices, bool closed, double line_width)
    : vertices_(std::move(vertices)), closed_(closed), line_width_(line_width) {
  if (vertices_.size() < 2) {
    throw std::invalid_argument("caveline path needs at least two vertices");
  }
  require_positive(line_width_, "line width");
  for (const auto& v : vertices_) {
    if (!v.allFinite()) throw std::invalid_argument("caveline vertex is not finite");
  }
  cumulative_.assign(1, 0.0);
  for (std::size_t i = 0; i < segment_count(); ++i) {
    const double len = (segment_end(i) - segment_start(i)).norm();
    if (len <= kMinVertexSeparation) {
      throw std::invalid_argument("consecutive caveline vertices " + std::to_string(i) +
                                  " coincide");
    }
    cumulative_.push_back(cumulative_.back() + len);
  }
}

std::size_t CavelinePath::segment_count() const {
  return closed_ ? vertices_.size() : vertices_.size() - 1;
}

Vec3 CavelinePath::point_at(double s) const {
  const double total = length();
  if (closed_) {
    s = std::fmod(s, total);
    if (s < 0) s += total;
  } else {
    s = std::clamp(s, 0.0, total);
  }
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t seg = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
  seg = std::min(seg == 0 ? 0 : seg - 1, segment_count() - 1);
  const double seg_len = cumulative_[seg + 1] - cumulative_[seg];
  const double f = std::clamp((s - cumulative_[seg]) / seg_len, 0.0, 1.0);
  return segment_start(seg) + f * (segment_end(seg) - segment_start(seg));
}

CavelinePath CavelinePath::translated(const Vec3& offset) const {
  std::vector<Vec3> moved = vertices_;
  for (auto& v : moved) v += offset;
  return CavelinePath(std::move(moved), closed_, line_width_);
}

CavelinePath build_rectangle_loop(double width_m, double height_m, double depth_m,
                                  double line_width_m) {
  require_positive(width_m, "rectangle width");
  require_positive(height_m, "rectangle height");
  return CavelinePath({{0, 0, depth_m}, {width_m, 0, depth_m}, {width_m, height_m, depth_m},
                       {0, height_m, depth_m}},
                      true, line_width_m);
}

CavelinePath build_hexagon_loop(double circumradius_m, double depth_m, double line_width_m) {
  require_positive(circumradius_m, "hexagon circumradius");
  std::vector<Vec3> v;
  for (int k = 0; k < 6; ++k) {
    const double a = k * std::numbers::pi / 3.0;
    v.emplace_back(circumradius_m * std::cos(a), circumradius_m * std::sin(a), depth_m);
  }
  return CavelinePath(std::move(v), true, line_width_m);
}

CavelinePath build_lawnmower(int rows, double row_length_m, double row_spacing_m, double depth_m,
                             double line_width_m) {
  if (rows < 2) throw std::invalid_argument("lawnmower pattern needs at least two rows");
  require_positive(row_length_m, "row length");
  require_positive(row_spacing_m, "row spacing");
  std::vector<Vec3> v;
  for (int r = 0; r < rows; ++r) {
    const double y = r * row_spacing_m;
    const bool outbound = r % 2 == 0;
    v.emplace_back(outbound ? 0.0 : row_length_m, y, depth_m);
    v.emplace_back(outbound ? row_length_m : 0.0, y, depth_m);
  }
  return CavelinePath(std::move(v), false, line_width_m);
}

PathProjection nearest_point_on_path(const CavelinePath& path, const Vec3& p) {
  PathProjection best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.segment_count(); ++i) {
    const Vec3 a = path.segment_start(i);
    const Vec3 ab = path.segment_end(i) - a;
    const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    const Vec3 q = a + t * ab;
    const double d = (p - q).norm();
    if (d < best.distance) {
      best.point = q;
      best.distance = d;
      best.segment = i;
      best.arc_length = path.arc_length_at(i) + t * ab.norm();
    }
  }
  return best;
}

void CurrentField::validate() const {
  if (!velocity.allFinite() || !gust_amplitude.allFinite()) {
    throw std::invalid_argument("current field must be finite");
  }
  if (!gust_amplitude.isZero(0.0) && !(gust_period > 0)) {
    throw std::invalid_argument("gust period must be positive when a gust is set");
  }
}

Vec3 sample_current(const CurrentField& field, double t) {
  if (field.gust_amplitude.isZero(0.0)) return field.velocity;
  const double phase = std::sin(2.0 * std::numbers::pi * t / field.gust_period);
  return field.velocity + phase * field.gust_amplitude;
}

}  // namespace cavesim
