#ifndef CAVESIM_PERCEPTION_HPP
#define CAVESIM_PERCEPTION_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cavesim/geometry.hpp"
#include "cavesim/vehicle.hpp"
#include "cavesim/world.hpp"

namespace cavesim {

/// Binary caveline mask. Pixel (u, v) is stored at v * width + u; u is the
/// forward image axis, v the starboard one.
class SegmentationMap {
 public:
  SegmentationMap(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  bool in_bounds(int u, int v) const { return u >= 0 && v >= 0 && u < width_ && v < height_; }
  bool at(int u, int v) const { return pixels_[index(u, v)] != 0; }
  void set(int u, int v, bool on = true) { pixels_[index(u, v)] = on ? 1 : 0; }

  std::size_t count() const;
  bool empty() const { return count() == 0; }
  std::span<const std::uint8_t> data() const { return pixels_; }

  /// Copy keeping only pixels ahead of `center` (u > center.u) and, when
  /// radius > 0, within `radius` pixels of it.
  SegmentationMap forward_window(const Pixel& center, double radius) const;

  /// Ground distance covered by one pixel at the rendered range; 0 if unknown.
  double meters_per_pixel{0};
  /// Rendered line thickness in pixels; 0 if unknown.
  double line_width_px{0};

  bool operator==(const SegmentationMap& o) const {
    return width_ == o.width_ && height_ == o.height_ && pixels_ == o.pixels_;
  }

 private:
  std::size_t index(int u, int v) const { return static_cast<std::size_t>(v) * width_ + u; }

  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

/// Writes the map as a binary portable graymap (P5), rows along v.
void write_pgm(std::ostream& out, const SegmentationMap& map);

struct PixelIndex {
  int u{0};
  int v{0};
  bool operator==(const PixelIndex&) const = default;
};

struct Contour {
  std::vector<PixelIndex> pixels;  // row-major order
  Pixel centroid;
  int area{0};

  /// Pixels with at least one 4-neighbour outside the contour (image borders count as outside).
  std::vector<PixelIndex> edge_pixels(int width, int height) const;
};

struct NoiseModel {
  double dropout_prob{0};
  double gap_rate{0};  // expected gaps per meter of projected line
  int gap_length_px{8};
  double speckle_rate{0};  // expected false blobs per frame
  int speckle_area_px{4};

  bool is_zero() const { return dropout_prob == 0 && gap_rate == 0 && speckle_rate == 0; }
  void validate() const;
};

/// Purely geometric down-camera view of the caveline from the vehicle pose.
/// The optical center sits at the vehicle position and the camera axes match
/// the body axes.
SegmentationMap render_downcam(const VehicleState& state, const CavelinePath& path,
                               const CameraIntrinsics& K);

/// Dropout, gaps and speckle. Gap density needs the map's meters_per_pixel and
/// line_width_px; without them gaps are skipped.
SegmentationMap corrupt(const SegmentationMap& map, const NoiseModel& noise, Rng& rng);

/// 8-connected components with area >= min_area_px, ordered by their first
/// pixel in row-major scan.
std::vector<Contour> extract_contours(const SegmentationMap& map, int min_area_px);

}  // namespace cavesim

#endif  // CAVESIM_PERCEPTION_HPP
