#pragma once

// Geometric primitives shared by every module.
//
// Frame convention: camera frame with x to the image right, y up and z
// pointing from the camera toward the subject (depth is positive). All trace
// data is expressed in this frame.

#include <cmath>

#include <Eigen/Core>

namespace coach {

inline constexpr double kDegenerateLength = 1e-9;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  constexpr double squared_norm() const { return x * x + y * y + z * z; }
  bool is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// Unit vector along v. Throws DegenerateVector when |v| <= 1e-9.
Vec3 normalize(const Vec3& v);

/// Unsigned angle in [0, pi]. Throws DegenerateVector for near-zero inputs.
double angle_between(const Vec3& a, const Vec3& b);

inline Eigen::Vector3d to_eigen(const Vec3& v) { return {v.x, v.y, v.z}; }
inline Vec3 from_eigen(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

struct Pixel {
  double u = 0.0;
  double v = 0.0;

  constexpr bool operator==(const Pixel&) const = default;
};

struct CameraIntrinsics {
  double fx = 1060.0;
  double fy = 1060.0;
  double cx = 960.0;
  double cy = 540.0;

  /// Throws InvalidParams unless fx, fy > 0 and all values finite.
  void validate() const;
};

struct RigidPose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 translation{};

  Vec3 apply(const Vec3& p) const { return from_eigen(rotation * to_eigen(p)) + translation; }
};

/// Pinhole projection of a model point under pose. Throws BehindCamera when
/// the transformed depth is <= 1e-6 m.
Pixel project_point(const Vec3& p, const RigidPose& pose, const CameraIntrinsics& k);

/// Rodrigues exponential map of an axis-angle vector.
Eigen::Matrix3d rotation_from_axis_angle(const Eigen::Vector3d& omega);

/// Intrinsic yaw (about y), then pitch (about x), then roll (about z):
/// R = Ry(yaw) * Rx(pitch) * Rz(roll).
Eigen::Matrix3d rotation_from_ypr(double yaw, double pitch, double roll);

struct YawPitchRoll {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;

  bool operator==(const YawPitchRoll&) const = default;
};

YawPitchRoll ypr_from_rotation(const Eigen::Matrix3d& r);

/// Geodesic distance between two rotations, radians.
double rotation_distance(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

/// True when r is orthonormal with determinant +1 to tolerance tol.
bool is_rotation(const Eigen::Matrix3d& r, double tol = 1e-9);

}  // namespace coach
