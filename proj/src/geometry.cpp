#include "coach/geometry.hpp"

#include <algorithm>

#include <Eigen/Geometry>

#include "coach/error.hpp"

namespace coach {

Vec3 normalize(const Vec3& v) {
  const double n = v.norm();
  if (!(n > kDegenerateLength)) {
    throw Error(ErrorKind::DegenerateVector, "cannot normalize a vector of length <= 1e-9");
  }
  return v / n;
}

double angle_between(const Vec3& a, const Vec3& b) {
  if (!(a.norm() > kDegenerateLength) || !(b.norm() > kDegenerateLength)) {
    throw Error(ErrorKind::DegenerateVector, "angle with a degenerate vector");
  }
  // atan2 form keeps full precision near 0 and pi where acos loses ~1e-8.
  const double s = cross(a, b).norm();
  const double c = dot(a, b);
  return std::clamp(std::atan2(s, c), 0.0, M_PI);
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy) ||
      !std::isfinite(cx) || !std::isfinite(cy)) {
    throw Error(ErrorKind::InvalidParams, "camera intrinsics need finite fx, fy > 0");
  }
}

Pixel project_point(const Vec3& p, const RigidPose& pose, const CameraIntrinsics& k) {
  const Vec3 c = pose.apply(p);
  if (!(c.z > 1e-6)) {
    throw Error(ErrorKind::BehindCamera, "point depth " + std::to_string(c.z) + " m");
  }
  return {k.fx * c.x / c.z + k.cx, k.fy * c.y / c.z + k.cy};
}

Eigen::Matrix3d rotation_from_axis_angle(const Eigen::Vector3d& omega) {
  const double theta = omega.norm();
  if (theta < 1e-12) {
    Eigen::Matrix3d w;
    w << 0, -omega.z(), omega.y(), omega.z(), 0, -omega.x(), -omega.y(), omega.x(), 0;
    return Eigen::Matrix3d::Identity() + w;
  }
  return Eigen::AngleAxisd(theta, omega / theta).toRotationMatrix();
}

Eigen::Matrix3d rotation_from_ypr(double yaw, double pitch, double roll) {
  return (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitX()) *
          Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitZ()))
      .toRotationMatrix();
}

YawPitchRoll ypr_from_rotation(const Eigen::Matrix3d& r) {
  YawPitchRoll out;
  out.pitch = std::asin(std::clamp(-r(1, 2), -1.0, 1.0));
  out.yaw = std::atan2(r(0, 2), r(2, 2));
  out.roll = std::atan2(r(1, 0), r(1, 1));
  return out;
}

double rotation_distance(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  return Eigen::AngleAxisd(a.transpose() * b).angle();
}

bool is_rotation(const Eigen::Matrix3d& r, double tol) {
  const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

}  // namespace coach
