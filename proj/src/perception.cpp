#include "cavesim/perception.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <stdexcept>

namespace cavesim {

namespace {

constexpr double kNearPlane = 0.05;

struct ScreenPoint {
  double u;
  double v;
  double inv_depth;
};

// Liang-Barsky clip of the screen segment a-b to [lo_u, hi_u] x [lo_v, hi_v].
bool clip_segment(ScreenPoint& a, ScreenPoint& b, double lo_u, double hi_u, double lo_v,
                  double hi_v) {
  const double du = b.u - a.u;
  const double dv = b.v - a.v;
  double t0 = 0.0;
  double t1 = 1.0;
  const double p[4] = {-du, du, -dv, dv};
  const double q[4] = {a.u - lo_u, hi_u - a.u, a.v - lo_v, hi_v - a.v};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0) return false;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
    if (t0 > t1) return false;
  }
  const ScreenPoint a0 = a;
  auto lerp = [&](double t) {
    return ScreenPoint{a0.u + t * du, a0.v + t * dv,
                       a0.inv_depth + t * (b.inv_depth - a0.inv_depth)};
  };
  const ScreenPoint nb = lerp(t1);
  a = lerp(t0);
  b = nb;
  return true;
}

void stamp_disk(SegmentationMap& map, int u, int v, double radius) {
  const int r = static_cast<int>(std::floor(radius));
  const double r2 = radius * radius;
  for (int dv = -r; dv <= r; ++dv) {
    for (int du = -r; du <= r; ++du) {
      if (du * du + dv * dv > r2) continue;
      if (map.in_bounds(u + du, v + dv)) map.set(u + du, v + dv);
    }
  }
}

// Midpoint (Bresenham) traversal between rounded endpoints with a circular
// brush. Brush width follows inverse depth, which is linear in screen space.
void draw_thick_line(SegmentationMap& map, const ScreenPoint& a, const ScreenPoint& b,
                     double world_width_px_per_inv_depth) {
  int u0 = static_cast<int>(std::lround(a.u));
  int v0 = static_cast<int>(std::lround(a.v));
  const int u1 = static_cast<int>(std::lround(b.u));
  const int v1 = static_cast<int>(std::lround(b.v));
  const int du = std::abs(u1 - u0);
  const int dv = -std::abs(v1 - v0);
  const int su = u0 < u1 ? 1 : -1;
  const int sv = v0 < v1 ? 1 : -1;
  const int steps = std::max(du, -dv);
  int err = du + dv;
  for (int i = 0;; ++i) {
    const double t = steps == 0 ? 0.0 : static_cast<double>(i) / steps;
    const double inv_depth = a.inv_depth + t * (b.inv_depth - a.inv_depth);
    const double width_px = std::max(1.0, world_width_px_per_inv_depth * inv_depth);
    stamp_disk(map, u0, v0, std::max(width_px / 2.0, 0.5));
    if (u0 == u1 && v0 == v1) break;
    const int e2 = 2 * err;
    if (e2 >= dv) {
      err += dv;
      u0 += su;
    }
    if (e2 <= du) {
      err += du;
      v0 += sv;
    }
  }
}

}  // namespace

SegmentationMap::SegmentationMap(int width, int height)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("segmentation map dimensions must be positive");
  }
  pixels_.assign(static_cast<std::size_t>(width) * height, 0);
}

std::size_t SegmentationMap::count() const {
  return static_cast<std::size_t>(std::count(pixels_.begin(), pixels_.end(), 1));
}

SegmentationMap SegmentationMap::forward_window(const Pixel& center, double radius) const {
  SegmentationMap out = *this;
  const double r2 = radius * radius;
  for (int v = 0; v < height_; ++v) {
    for (int u = 0; u < width_; ++u) {
      const double du = u - center.u;
      const double dv = v - center.v;
      if (du <= 0 || (radius > 0 && du * du + dv * dv > r2)) out.set(u, v, false);
    }
  }
  return out;
}

void write_pgm(std::ostream& out, const SegmentationMap& map) {
  out << "P5\n" << map.width() << ' ' << map.height() << "\n255\n";
  for (auto px : map.data()) out.put(static_cast<char>(px ? 255 : 0));
}

std::vector<PixelIndex> Contour::edge_pixels(int width, int height) const {
  if (pixels.empty()) return {};
  int u_min = pixels.front().u, u_max = u_min, v_min = pixels.front().v, v_max = v_min;
  for (const auto& p : pixels) {
    u_min = std::min(u_min, p.u);
    u_max = std::max(u_max, p.u);
    v_min = std::min(v_min, p.v);
    v_max = std::max(v_max, p.v);
  }
  const int bw = u_max - u_min + 3;
  const int bh = v_max - v_min + 3;
  std::vector<std::uint8_t> local(static_cast<std::size_t>(bw) * bh, 0);
  auto idx = [&](int u, int v) {
    return static_cast<std::size_t>(v - v_min + 1) * bw + (u - u_min + 1);
  };
  for (const auto& p : pixels) local[idx(p.u, p.v)] = 1;

  std::vector<PixelIndex> edge;
  for (const auto& p : pixels) {
    const bool on_border = p.u == 0 || p.v == 0 || p.u == width - 1 || p.v == height - 1;
    if (on_border || !local[idx(p.u - 1, p.v)] || !local[idx(p.u + 1, p.v)] ||
        !local[idx(p.u, p.v - 1)] || !local[idx(p.u, p.v + 1)]) {
      edge.push_back(p);
    }
  }
  return edge;
}

void NoiseModel::validate() const {
  if (!(dropout_prob >= 0 && dropout_prob <= 1)) {
    throw std::invalid_argument("dropout_prob must lie in [0, 1]");
  }
  if (!(gap_rate >= 0) || !(speckle_rate >= 0)) {
    throw std::invalid_argument("noise rates must be non-negative");
  }
  if (gap_length_px < 1 || speckle_area_px < 1) {
    throw std::invalid_argument("gap length and speckle area must be at least one pixel");
  }
}

SegmentationMap render_downcam(const VehicleState& state, const CavelinePath& path,
                               const CameraIntrinsics& K) {
  SegmentationMap map(K.width, K.height);
  const Mat3 Rt = state.rotation().transpose();
  const double width_scale = K.fx * path.line_width();

  double max_radius = 0.5;
  std::vector<std::pair<ScreenPoint, ScreenPoint>> segments;
  for (std::size_t i = 0; i < path.segment_count(); ++i) {
    Vec3 a = Rt * (path.segment_start(i) - state.position);
    Vec3 b = Rt * (path.segment_end(i) - state.position);
    if (a.z() < kNearPlane && b.z() < kNearPlane) continue;
    if (a.z() < kNearPlane) a += (kNearPlane - a.z()) / (b.z() - a.z()) * (b - a);
    if (b.z() < kNearPlane) b += (kNearPlane - b.z()) / (a.z() - b.z()) * (a - b);
    const Pixel pa = project(K, a);
    const Pixel pb = project(K, b);
    segments.push_back({{pa.u, pa.v, 1.0 / a.z()}, {pb.u, pb.v, 1.0 / b.z()}});
    max_radius = std::max({max_radius, width_scale / a.z() / 2.0, width_scale / b.z() / 2.0});
  }

  const double margin = std::ceil(max_radius) + 1.0;
  for (auto [a, b] : segments) {
    if (!clip_segment(a, b, -margin, K.width - 1 + margin, -margin, K.height - 1 + margin)) {
      continue;
    }
    draw_thick_line(map, a, b, width_scale);
  }

  // Scale metadata at the principal ray: altitude above the path plane below.
  const double range = path.vertices().front().z() - state.position.z();
  if (range > 0) {
    map.meters_per_pixel = range / K.fx;
    map.line_width_px = std::max(1.0, width_scale / range);
  }
  return map;
}

SegmentationMap corrupt(const SegmentationMap& map, const NoiseModel& noise, Rng& rng) {
  noise.validate();
  SegmentationMap out = map;
  if (noise.is_zero()) return out;
  const int w = map.width();
  const int h = map.height();

  if (noise.gap_rate > 0 && map.meters_per_pixel > 0 && map.line_width_px > 0) {
    std::vector<PixelIndex> set;
    for (int v = 0; v < h; ++v)
      for (int u = 0; u < w; ++u)
        if (out.at(u, v)) set.push_back({u, v});
    if (!set.empty()) {
      const double line_length_m =
          static_cast<double>(set.size()) / map.line_width_px * map.meters_per_pixel;
      std::poisson_distribution<int> gaps(noise.gap_rate * line_length_m);
      const int n = gaps(rng);
      std::uniform_int_distribution<std::size_t> pick(0, set.size() - 1);
      const double radius = noise.gap_length_px / 2.0;
      const int r = static_cast<int>(std::ceil(radius));
      for (int g = 0; g < n; ++g) {
        const PixelIndex c = set[pick(rng)];
        for (int dv = -r; dv <= r; ++dv)
          for (int du = -r; du <= r; ++du)
            if (du * du + dv * dv <= radius * radius && out.in_bounds(c.u + du, c.v + dv))
              out.set(c.u + du, c.v + dv, false);
      }
    }
  }

  if (noise.dropout_prob > 0) {
    std::bernoulli_distribution drop(noise.dropout_prob);
    for (int v = 0; v < h; ++v)
      for (int u = 0; u < w; ++u)
        if (out.at(u, v) && drop(rng)) out.set(u, v, false);
  }

  if (noise.speckle_rate > 0) {
    std::poisson_distribution<int> blobs(noise.speckle_rate);
    const int n = blobs(rng);
    const int side = static_cast<int>(std::ceil(std::sqrt(noise.speckle_area_px)));
    std::uniform_int_distribution<int> pu(0, w - 1);
    std::uniform_int_distribution<int> pv(0, h - 1);
    for (int b = 0; b < n; ++b) {
      const int u0 = pu(rng);
      const int v0 = pv(rng);
      int placed = 0;
      for (int dv = 0; dv < side && placed < noise.speckle_area_px; ++dv) {
        for (int du = 0; du < side && placed < noise.speckle_area_px; ++du, ++placed) {
          if (out.in_bounds(u0 + du, v0 + dv)) out.set(u0 + du, v0 + dv);
        }
      }
    }
  }
  return out;
}

std::vector<Contour> extract_contours(const SegmentationMap& map, int min_area_px) {
  if (min_area_px < 1) throw std::invalid_argument("min_area_px must be at least 1");
  const int w = map.width();
  const int h = map.height();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<Contour> out;
  std::deque<PixelIndex> queue;

  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * w + u;
      if (seen[i] || !map.at(u, v)) continue;
      Contour c;
      seen[i] = 1;
      queue.push_back({u, v});
      while (!queue.empty()) {
        const PixelIndex p = queue.front();
        queue.pop_front();
        c.pixels.push_back(p);
        for (int dv = -1; dv <= 1; ++dv) {
          for (int du = -1; du <= 1; ++du) {
            const int nu = p.u + du;
            const int nv = p.v + dv;
            if ((du == 0 && dv == 0) || !map.in_bounds(nu, nv)) continue;
            const std::size_t j = static_cast<std::size_t>(nv) * w + nu;
            if (seen[j] || !map.at(nu, nv)) continue;
            seen[j] = 1;
            queue.push_back({nu, nv});
          }
        }
      }
      c.area = static_cast<int>(c.pixels.size());
      if (c.area < min_area_px) continue;
      std::sort(c.pixels.begin(), c.pixels.end(), [](const PixelIndex& a, const PixelIndex& b) {
        return a.v != b.v ? a.v < b.v : a.u < b.u;
      });
      double su = 0, sv = 0;
      for (const auto& p : c.pixels) {
        su += p.u;
        sv += p.v;
      }
      c.centroid = {su / c.area, sv / c.area};
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace cavesim
