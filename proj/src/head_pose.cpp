#include "coach/head_pose.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "coach/error.hpp"

namespace coach {

namespace {

constexpr std::array<std::string_view, kFacePointCount> kFacePointNames = {
    "nose_tip",         "chin", "left_eye_corner", "right_eye_corner", "left_mouth_corner",
    "right_mouth_corner",
};

double cost_of(const ResidualVector& r) { return r.squaredNorm(); }

bool all_in_front(const RigidPose& pose, const FaceModel& model) {
  for (const auto& p : model.points) {
    if (!(pose.apply(p).z > 1e-6)) return false;
  }
  return true;
}

Eigen::Matrix3d skew(const Eigen::Vector3d& a) {
  Eigen::Matrix3d s;
  s << 0, -a.z(), a.y(), a.z(), 0, -a.x(), -a.y(), a.x(), 0;
  return s;
}

}  // namespace

std::string_view to_string(FacePoint p) noexcept {
  return kFacePointNames[static_cast<std::size_t>(p)];
}

std::optional<FacePoint> parse_face_point(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kFacePointCount; ++i) {
    if (kFacePointNames[i] == name) return static_cast<FacePoint>(i);
  }
  return std::nullopt;
}

void FaceModel::validate() const {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : points) {
    if (!p.is_finite()) throw Error(ErrorKind::DegenerateConfiguration, "non-finite face model");
    mean += to_eigen(p);
  }
  mean /= static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d d = to_eigen(p) - mean;
    cov += d * d.transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov);
  const auto sv = svd.singularValues();
  if (!(sv(2) > 1e-12 * sv(0))) {
    throw Error(ErrorKind::DegenerateConfiguration, "face model points are coplanar");
  }
}

FaceModel FaceModel::generic() {
  FaceModel m;
  m.points = {
      Vec3{0.0, 0.0, 0.0},             // nose tip
      Vec3{0.0, -0.110, -0.020},       // chin
      Vec3{-0.0450, 0.0520, -0.030},   // left eye outer corner
      Vec3{0.0450, 0.0520, -0.030},    // right eye outer corner
      Vec3{-0.0300, -0.0450, -0.025},  // left mouth corner
      Vec3{0.0300, -0.0450, -0.025},   // right mouth corner
  };
  return m;
}

RigidPose solve_dlt(const LandmarkSet2D& landmarks, const FaceModel& model,
                    const CameraIntrinsics& k) {
  k.validate();
  constexpr std::size_t n = kFacePointCount;

  // Normalized image coordinates, then Hartley conditioning in 2D and 3D.
  std::array<Eigen::Vector2d, n> img;
  Eigen::Vector2d c2 = Eigen::Vector2d::Zero();
  Eigen::Vector3d c3 = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Pixel& px = landmarks.points[i];
    if (!std::isfinite(px.u) || !std::isfinite(px.v)) {
      throw Error(ErrorKind::DegenerateConfiguration, "non-finite landmark");
    }
    img[i] = {(px.u - k.cx) / k.fx, (px.v - k.cy) / k.fy};
    c2 += img[i];
    c3 += to_eigen(model.points[i]);
  }
  c2 /= n;
  c3 /= n;
  double d2 = 0.0;
  double d3 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d2 += (img[i] - c2).norm();
    d3 += (to_eigen(model.points[i]) - c3).norm();
  }
  d2 /= n;
  d3 /= n;
  if (!(d2 > 1e-12) || !(d3 > 1e-12)) {
    throw Error(ErrorKind::DegenerateConfiguration, "landmarks or model collapse to a point");
  }
  const double s2 = std::sqrt(2.0) / d2;
  const double s3 = std::sqrt(3.0) / d3;

  Eigen::Matrix3d t2;
  t2 << s2, 0, -s2 * c2.x(), 0, s2, -s2 * c2.y(), 0, 0, 1;
  Eigen::Matrix4d u3 = Eigen::Matrix4d::Identity();
  u3.topLeftCorner<3, 3>() *= s3;
  u3.topRightCorner<3, 1>() = -s3 * c3;

  Eigen::Matrix<double, 2 * n, 12> a = Eigen::Matrix<double, 2 * n, 12>::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector4d x = u3 * to_eigen(model.points[i]).homogeneous();
    const Eigen::Vector3d y = t2 * img[i].homogeneous();
    a.block<1, 4>(2 * i, 0) = -x.transpose();
    a.block<1, 4>(2 * i, 8) = y.x() * x.transpose();
    a.block<1, 4>(2 * i + 1, 4) = -x.transpose();
    a.block<1, 4>(2 * i + 1, 8) = y.y() * x.transpose();
  }

  Eigen::JacobiSVD<Eigen::Matrix<double, 2 * n, 12>> svd(a, Eigen::ComputeFullV);
  const auto sv = svd.singularValues();
  if (!(sv(10) > 1e-9 * sv(0))) {
    throw Error(ErrorKind::DegenerateConfiguration, "DLT system is rank deficient");
  }
  const Eigen::Matrix<double, 12, 1> p = svd.matrixV().col(11);
  Eigen::Matrix<double, 3, 4> pn;
  pn.row(0) = p.segment<4>(0).transpose();
  pn.row(1) = p.segment<4>(4).transpose();
  pn.row(2) = p.segment<4>(8).transpose();

  Eigen::Matrix<double, 3, 4> proj = t2.inverse() * pn * u3;
  if (proj.leftCols<3>().determinant() < 0.0) proj = -proj;

  Eigen::JacobiSVD<Eigen::Matrix3d> msvd(proj.leftCols<3>(),
                                         Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r = msvd.matrixU() * msvd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) = -1.0;
    r = msvd.matrixU() * flip * msvd.matrixV().transpose();
  }
  const double scale = msvd.singularValues().mean();
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorKind::DegenerateConfiguration, "DLT scale vanished");
  }

  RigidPose pose;
  pose.rotation = r;
  pose.translation = from_eigen(proj.col(3) / scale);
  return pose;
}

ResidualVector reprojection_residuals(const RigidPose& pose, const LandmarkSet2D& landmarks,
                                      const FaceModel& model, const CameraIntrinsics& k) {
  ResidualVector r;
  for (std::size_t i = 0; i < kFacePointCount; ++i) {
    const Pixel px = project_point(model.points[i], pose, k);
    r(2 * i) = px.u - landmarks.points[i].u;
    r(2 * i + 1) = px.v - landmarks.points[i].v;
  }
  return r;
}

PoseJacobian reprojection_jacobian(const RigidPose& pose, const FaceModel& model,
                                   const CameraIntrinsics& k) {
  PoseJacobian j;
  const Eigen::Vector3d t = to_eigen(pose.translation);
  for (std::size_t i = 0; i < kFacePointCount; ++i) {
    const Eigen::Vector3d rotated = pose.rotation * to_eigen(model.points[i]);
    const Eigen::Vector3d c = rotated + t;
    const double iz = 1.0 / c.z();
    Eigen::Matrix<double, 2, 3> dproj;
    dproj << k.fx * iz, 0.0, -k.fx * c.x() * iz * iz, 0.0, k.fy * iz, -k.fy * c.y() * iz * iz;
    j.block<2, 3>(2 * i, 0) = -dproj * skew(rotated);
    j.block<2, 3>(2 * i, 3) = dproj;
  }
  return j;
}

RigidPose perturb_pose(const RigidPose& pose, const Eigen::Matrix<double, 6, 1>& delta) {
  RigidPose out;
  out.rotation = rotation_from_axis_angle(delta.head<3>()) * pose.rotation;
  out.translation = pose.translation + from_eigen(delta.tail<3>());
  return out;
}

HeadPoseEstimate refine_lm(const RigidPose& initial, const LandmarkSet2D& landmarks,
                           const FaceModel& model, const CameraIntrinsics& k,
                           const LmSettings& settings) {
  k.validate();
  if (!all_in_front(initial, model)) {
    throw Error(ErrorKind::BehindCamera, "initial pose puts the face behind the camera");
  }

  HeadPoseEstimate est;
  RigidPose pose = initial;
  ResidualVector r = reprojection_residuals(pose, landmarks, model, k);
  double cost = cost_of(r);
  est.accepted_costs.push_back(cost);

  double lambda = settings.initial_lambda;
  bool gradient_small = false;

  while (est.iterations < settings.max_iterations) {
    const PoseJacobian j = reprojection_jacobian(pose, model, k);
    const Eigen::Matrix<double, 6, 6> h = j.transpose() * j;
    const Eigen::Matrix<double, 6, 1> g = j.transpose() * r;
    if (g.norm() < settings.gradient_tolerance) {
      gradient_small = true;
      break;
    }

    Eigen::Matrix<double, 6, 1> diag = h.diagonal();
    diag = diag.cwiseMax(1e-12 * diag.maxCoeff());

    bool accepted = false;
    bool stalled = false;
    double decrease = 0.0;
    while (!accepted) {
      Eigen::Matrix<double, 6, 6> damped = h;
      damped.diagonal() += lambda * diag;
      const Eigen::Matrix<double, 6, 1> step = damped.ldlt().solve(-g);
      const RigidPose candidate = perturb_pose(pose, step);
      if (step.allFinite() && all_in_front(candidate, model)) {
        const ResidualVector rc = reprojection_residuals(candidate, landmarks, model, k);
        const double cc = cost_of(rc);
        if (cc < cost) {
          decrease = cost - cc;
          pose = candidate;
          r = rc;
          cost = cc;
          accepted = true;
          lambda /= settings.lambda_factor;
          break;
        }
      }
      lambda *= settings.lambda_factor;
      if (lambda > settings.max_lambda) {
        stalled = true;
        break;
      }
    }
    if (stalled) {
      const double rms = std::sqrt(cost / kFacePointCount);
      if (est.iterations == 0 && rms > settings.convergence_rms) {
        throw Error(ErrorKind::DivergedPose, "damping exceeded its limit without an accepted step");
      }
      break;
    }
    ++est.iterations;
    est.accepted_costs.push_back(cost);
    if (decrease < settings.cost_change_tolerance) break;
  }

  if (!gradient_small) {
    const Eigen::Matrix<double, 6, 1> g =
        reprojection_jacobian(pose, model, k).transpose() * r;
    gradient_small = g.norm() < settings.gradient_tolerance;
  }

  est.pose = pose;
  est.angles = ypr_from_rotation(pose.rotation);
  est.rms_error = std::sqrt(cost / kFacePointCount);
  est.converged = gradient_small || est.rms_error <= settings.convergence_rms;
  return est;
}

std::vector<RigidPose> canonical_seeds(const LandmarkSet2D& landmarks, const FaceModel& model,
                                      const CameraIntrinsics& k) {
  // Weak-perspective depth from the spread of the image against the model's
  // frontal (x, y) spread.
  Eigen::Vector2d c2 = Eigen::Vector2d::Zero();
  Eigen::Vector3d c3 = Eigen::Vector3d::Zero();
  std::array<Eigen::Vector2d, kFacePointCount> img;
  for (std::size_t i = 0; i < kFacePointCount; ++i) {
    img[i] = {(landmarks.points[i].u - k.cx) / k.fx, (landmarks.points[i].v - k.cy) / k.fy};
    c2 += img[i];
    c3 += to_eigen(model.points[i]);
  }
  c2 /= kFacePointCount;
  c3 /= kFacePointCount;
  double spread2 = 0.0;
  double spread3 = 0.0;
  for (std::size_t i = 0; i < kFacePointCount; ++i) {
    spread2 += (img[i] - c2).squaredNorm();
    spread3 += (to_eigen(model.points[i]) - c3).head<2>().squaredNorm();
  }
  std::vector<RigidPose> seeds;
  if (!(spread2 > 0.0) || !std::isfinite(spread2)) return seeds;
  const double depth = std::sqrt(spread3 / spread2);
  for (double yaw_deg : {-60.0, -30.0, 0.0, 30.0, 60.0}) {
    for (double pitch_deg : {-30.0, 0.0, 30.0}) {
      RigidPose s;
      s.rotation = rotation_from_ypr(yaw_deg * M_PI / 180.0, pitch_deg * M_PI / 180.0, 0.0);
      s.translation = from_eigen(Eigen::Vector3d(c2.x() * depth, c2.y() * depth, depth) -
                                 s.rotation * c3);
      seeds.push_back(s);
    }
  }
  return seeds;
}

HeadPoseEstimate estimate_head_pose(const LandmarkSet2D& landmarks, const FaceModel& model,
                                    const CameraIntrinsics& k, const LmSettings& settings) {
  // The DLT start is exact on clean data but unreliable under pixel noise
  // because the six model points are nearly planar, so a fixed set of
  // canonical starts competes with it and the lowest final cost wins.
  std::vector<RigidPose> seeds;
  std::optional<Error> first_error;
  try {
    seeds.push_back(solve_dlt(landmarks, model, k));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateConfiguration) throw;
    first_error = e;
  }
  if (seeds.empty()) throw *first_error;
  for (auto& s : canonical_seeds(landmarks, model, k)) seeds.push_back(std::move(s));

  std::optional<HeadPoseEstimate> best;
  for (const auto& seed : seeds) {
    try {
      HeadPoseEstimate est = refine_lm(seed, landmarks, model, k, settings);
      if (!best || est.accepted_costs.back() < best->accepted_costs.back()) best = std::move(est);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DivergedPose && e.kind() != ErrorKind::BehindCamera) throw;
      if (!first_error) first_error = e;
    }
  }
  if (!best) throw *first_error;
  return *best;
}

double eye_aspect_ratio(const EyeLandmarks& eye) {
  const auto dist = [](const Pixel& a, const Pixel& b) { return std::hypot(a.u - b.u, a.v - b.v); };
  const double width = dist(eye.p[0], eye.p[3]);
  if (!(width > 1e-6)) throw Error(ErrorKind::DegenerateEye, "eye corners coincide");
  return (dist(eye.p[1], eye.p[5]) + dist(eye.p[2], eye.p[4])) / (2.0 * width);
}

std::string_view to_string(AttentionDirection d) noexcept {
  switch (d) {
    case AttentionDirection::FacingRobotEyesOpen: return "facing_robot_eyes_open";
    case AttentionDirection::FacingRobotEyesClosed: return "facing_robot_eyes_closed";
    case AttentionDirection::FacingAway: return "facing_away";
  }
  return "unknown";
}

std::optional<AttentionDirection> parse_attention_direction(std::string_view s) noexcept {
  for (auto d : {AttentionDirection::FacingRobotEyesOpen, AttentionDirection::FacingRobotEyesClosed,
                 AttentionDirection::FacingAway}) {
    if (to_string(d) == s) return d;
  }
  return std::nullopt;
}

AttentionDirection classify_attention_direction(const HeadPoseEstimate& est, double ear_left,
                                                double ear_right,
                                                const AttentionThresholds& thresholds) {
  if (!est.converged) return AttentionDirection::FacingAway;
  const bool facing = std::abs(est.angles.yaw) <= thresholds.max_yaw &&
                      std::abs(est.angles.pitch) <= thresholds.max_pitch;
  if (!facing) return AttentionDirection::FacingAway;
  const double ear = 0.5 * (ear_left + ear_right);
  return ear >= thresholds.min_ear ? AttentionDirection::FacingRobotEyesOpen
                                   : AttentionDirection::FacingRobotEyesClosed;
}

}  // namespace coach
