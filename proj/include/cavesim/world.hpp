#ifndef CAVESIM_WORLD_HPP
#define CAVESIM_WORLD_HPP

#include <cstddef>
#include <vector>

#include "cavesim/geometry.hpp"

namespace cavesim {

/// Polyline the vehicle follows, in {G}. Closed paths include the segment
/// from the last vertex back to the first.
class CavelinePath {
 public:
  /// Throws std::invalid_argument on fewer than two vertices, coincident
  /// consecutive vertices (including the wrap segment when closed) or a
  /// non-positive line width.
  CavelinePath(std::vector<Vec3> vertices, bool closed, double line_width);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  bool closed() const { return closed_; }
  double line_width() const { return line_width_; }

  std::size_t segment_count() const;
  Vec3 segment_start(std::size_t i) const { return vertices_[i]; }
  Vec3 segment_end(std::size_t i) const { return vertices_[(i + 1) % vertices_.size()]; }

  double length() const { return cumulative_.back(); }
  /// Arc length at the start of segment i.
  double arc_length_at(std::size_t i) const { return cumulative_[i]; }
  Vec3 point_at(double arc_length) const;

  CavelinePath translated(const Vec3& offset) const;

 private:
  std::vector<Vec3> vertices_;
  bool closed_;
  double line_width_;
  std::vector<double> cumulative_;
};

struct PathProjection {
  Vec3 point = Vec3::Zero();
  double distance{0};
  std::size_t segment{0};
  double arc_length{0};
};

CavelinePath build_rectangle_loop(double width_m, double height_m, double depth_m,
                                  double line_width_m);
CavelinePath build_hexagon_loop(double circumradius_m, double depth_m, double line_width_m);
CavelinePath build_lawnmower(int rows, double row_length_m, double row_spacing_m, double depth_m,
                             double line_width_m);

/// Exact closest point over every segment. Ties go to the lowest segment index.
PathProjection nearest_point_on_path(const CavelinePath& path, const Vec3& p);

/// Steady current plus one sinusoidal gust per axis, in {G}.
struct CurrentField {
  Vec3 velocity = Vec3::Zero();
  Vec3 gust_amplitude = Vec3::Zero();
  double gust_period{1};

  void validate() const;
};

Vec3 sample_current(const CurrentField& field, double t);

}  // namespace cavesim

#endif  // CAVESIM_WORLD_HPP
