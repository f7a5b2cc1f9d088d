#ifndef CAVESIM_GEOMETRY_HPP
#define CAVESIM_GEOMETRY_HPP

// Frames, rotations and pinhole-camera math.
//
// Conventions used everywhere in cavesim:
//   * {G} is north-east-down: x north, y east, z down (z is depth).
//   * Body frame: x forward, y starboard, z down.
//   * Attitude is intrinsic ZYX: R = Rz(yaw) * Ry(pitch) * Rx(roll), mapping
//     body-frame vectors into {G}.
//   * The down camera shares the body axes. Image u runs along body x
//     (forward), image v along body y (starboard), optical axis along body z.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cavesim {

template <typename Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3T = Eigen::Matrix<Scalar, 3, 3>;

using Vec3 = Vec3T<double>;
using Mat3 = Mat3T<double>;

/// Wraps an angle into (-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar a) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  constexpr Scalar two_pi = Scalar(2) * pi;
  a = std::fmod(a + pi, two_pi);
  if (a < 0) a += two_pi;
  a -= pi;
  return a == -pi ? pi : a;
}

template <typename Scalar>
struct EulerAnglesT {
  Scalar roll{0};
  Scalar pitch{0};
  Scalar yaw{0};
  bool operator==(const EulerAnglesT&) const = default;

  EulerAnglesT wrapped() const {
    return {wrap_angle(roll), wrap_angle(pitch), wrap_angle(yaw)};
  }
};
using EulerAngles = EulerAnglesT<double>;

template <typename Scalar>
Mat3T<Scalar> euler_to_rotation(const EulerAnglesT<Scalar>& a) {
  using AngleAxis = Eigen::AngleAxis<Scalar>;
  return (AngleAxis(a.yaw, Vec3T<Scalar>::UnitZ()) *
          AngleAxis(a.pitch, Vec3T<Scalar>::UnitY()) *
          AngleAxis(a.roll, Vec3T<Scalar>::UnitX()))
      .toRotationMatrix();
}

/// Inverse of euler_to_rotation. Near |pitch| = pi/2 roll is pinned to zero and
/// the combined yaw/roll rotation is reported in yaw.
template <typename Scalar>
EulerAnglesT<Scalar> rotation_to_euler(const Mat3T<Scalar>& R) {
  EulerAnglesT<Scalar> a;
  const Scalar cos_pitch = std::hypot(R(0, 0), R(1, 0));
  a.pitch = std::atan2(-R(2, 0), cos_pitch);
  if (cos_pitch > Scalar(1e-6)) {
    a.roll = std::atan2(R(2, 1), R(2, 2));
    a.yaw = std::atan2(R(1, 0), R(0, 0));
  } else {
    a.roll = Scalar(0);
    a.yaw = std::atan2(-R(0, 1), R(1, 1));
  }
  return a.wrapped();
}

/// R_init^T * R_now: attitude now expressed in the initial frame.
template <typename Derived1, typename Derived2>
auto relative_rotation(const Eigen::MatrixBase<Derived1>& r_init,
                       const Eigen::MatrixBase<Derived2>& r_now) {
  return (r_init.transpose() * r_now).eval();
}

/// Max-norm of R^T R - I and |det R - 1|, the two things a rotation must keep small.
template <typename Derived>
typename Derived::Scalar rotation_defect(const Eigen::MatrixBase<Derived>& R) {
  using Scalar = typename Derived::Scalar;
  const Scalar ortho =
      (R.transpose() * R - Mat3T<Scalar>::Identity()).cwiseAbs().maxCoeff();
  return std::max(ortho, std::abs(R.determinant() - Scalar(1)));
}

template <typename Scalar>
struct RigidTransformT {
  Mat3T<Scalar> rotation = Mat3T<Scalar>::Identity();
  Vec3T<Scalar> translation = Vec3T<Scalar>::Zero();

  static RigidTransformT identity() { return {}; }

  Vec3T<Scalar> operator()(const Vec3T<Scalar>& p) const {
    return rotation * p + translation;
  }

  /// (this * other)(p) == this(other(p))
  RigidTransformT operator*(const RigidTransformT& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }

  RigidTransformT inverse() const {
    const Mat3T<Scalar> rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }
};
using RigidTransform = RigidTransformT<double>;

template <typename Scalar>
Vec3T<Scalar> transform_point(const RigidTransformT<Scalar>& T, const Vec3T<Scalar>& p) {
  return T(p);
}

template <typename Scalar>
struct PixelT {
  Scalar u{0};
  Scalar v{0};
  bool operator==(const PixelT&) const = default;
};
using Pixel = PixelT<double>;

struct CameraIntrinsics {
  double fx{1};
  double fy{1};
  double cx{0};
  double cy{0};
  int width{1};
  int height{1};

  Mat3 matrix() const {
    Mat3 K;
    K << fx, 0, cx, 0, fy, cy, 0, 0, 1;
    return K;
  }

  Pixel center() const { return {cx, cy}; }

  /// Pinhole intrinsics from a resolution and full fields of view along the
  /// u (forward) and v (starboard) axes.
  static CameraIntrinsics from_fov(int width, int height, double fov_u_rad, double fov_v_rad) {
    if (width <= 0 || height <= 0 || !(fov_u_rad > 0) || !(fov_v_rad > 0) ||
        fov_u_rad >= std::numbers::pi || fov_v_rad >= std::numbers::pi) {
      throw std::invalid_argument("from_fov: resolution and fields of view must be positive");
    }
    CameraIntrinsics k;
    k.width = width;
    k.height = height;
    k.cx = width / 2.0;
    k.cy = height / 2.0;
    k.fx = (width / 2.0) / std::tan(fov_u_rad / 2.0);
    k.fy = (height / 2.0) / std::tan(fov_v_rad / 2.0);
    return k;
  }

  /// 480x384 at 80 x 64 degrees, the default down camera.
  static CameraIntrinsics default_downcam() {
    return from_fov(480, 384, 80.0 * std::numbers::pi / 180.0, 64.0 * std::numbers::pi / 180.0);
  }

  bool valid() const {
    return fx > 0 && fy > 0 && width > 0 && height > 0 && cx > 0 && cx < width && cy > 0 &&
           cy < height;
  }
};

/// K^-1 [u v 1]^T, the ray through a pixel at unit depth.
inline Vec3 pixel_to_ray(const CameraIntrinsics& K, const Pixel& p) {
  return {(p.u - K.cx) / K.fx, (p.v - K.cy) / K.fy, 1.0};
}

/// Projects a camera-frame point (z > 0) to pixel coordinates.
inline Pixel project(const CameraIntrinsics& K, const Vec3& p_cam) {
  return {K.cx + K.fx * p_cam.x() / p_cam.z(), K.cy + K.fy * p_cam.y() / p_cam.z()};
}

}  // namespace cavesim

#endif  // CAVESIM_GEOMETRY_HPP
