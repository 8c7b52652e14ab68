#pragma once

// Head pose from six facial landmarks against a generic face model.
//
// A normalized DLT gives the primary starting pose; Levenberg-Marquardt then minimizes
// summed squared reprojection error over 6 parameters (left-multiplied
// axis-angle rotation increment and translation).

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "coach/geometry.hpp"
#include "coach/skeleton.hpp"

namespace coach {

enum class FacePoint : std::size_t {
  NoseTip,
  Chin,
  LeftEyeCorner,
  RightEyeCorner,
  LeftMouthCorner,
  RightMouthCorner,
};

inline constexpr std::size_t kFacePointCount = 6;

std::string_view to_string(FacePoint p) noexcept;
std::optional<FacePoint> parse_face_point(std::string_view name) noexcept;

/// Generic 3D face, meters, nose-tip origin, head-local frame.
struct FaceModel {
  std::array<Vec3, kFacePointCount> points;

  const Vec3& operator[](FacePoint p) const { return points[static_cast<std::size_t>(p)]; }

  /// Throws DegenerateConfiguration when the points do not span 3D.
  void validate() const;

  static FaceModel generic();
};

struct LandmarkSet2D {
  Timestamp timestamp = 0.0;
  std::array<Pixel, kFacePointCount> points{};

  const Pixel& operator[](FacePoint p) const { return points[static_cast<std::size_t>(p)]; }
  bool operator==(const LandmarkSet2D&) const = default;
};

/// p1/p4 horizontal corners, p2 p3 upper lid, p5 p6 lower lid.
struct EyeLandmarks {
  std::array<Pixel, 6> p{};
  bool operator==(const EyeLandmarks&) const = default;
};

struct HeadPoseEstimate {
  RigidPose pose;
  YawPitchRoll angles;
  double rms_error = 0.0;  // pixels
  int iterations = 0;
  bool converged = false;
  // Summed squared error: the initial value followed by each accepted step.
  std::vector<double> accepted_costs;
};

struct LmSettings {
  double initial_lambda = 1e-3;
  double lambda_factor = 10.0;
  double max_lambda = 1e8;
  double gradient_tolerance = 1e-8;
  double cost_change_tolerance = 1e-10;
  int max_iterations = 100;
  // An estimate whose rms reprojection error is at most this counts as converged.
  double convergence_rms = 2.0;
};

/// Pose from normalized DLT with the rotation projected to the nearest
/// rotation matrix. Throws DegenerateConfiguration on a rank-deficient system.
RigidPose solve_dlt(const LandmarkSet2D& landmarks, const FaceModel& model,
                    const CameraIntrinsics& k);

/// Throws BehindCamera if the initial pose puts a model point behind the
/// camera, DivergedPose if no step is ever accepted from a poor start.
HeadPoseEstimate refine_lm(const RigidPose& initial, const LandmarkSet2D& landmarks,
                           const FaceModel& model, const CameraIntrinsics& k,
                           const LmSettings& settings = {});

/// Fifteen fixed yaw/pitch starts with weak-perspective translation.
std::vector<RigidPose> canonical_seeds(const LandmarkSet2D& landmarks, const FaceModel& model,
                                      const CameraIntrinsics& k);

/// refine_lm from the DLT pose and from canonical_seeds; returns the run with
/// the lowest final error. Throws DegenerateConfiguration when the DLT system
/// is rank deficient.
HeadPoseEstimate estimate_head_pose(const LandmarkSet2D& landmarks, const FaceModel& model,
                                    const CameraIntrinsics& k, const LmSettings& settings = {});

using PoseJacobian = Eigen::Matrix<double, 2 * kFacePointCount, 6>;
using ResidualVector = Eigen::Matrix<double, 2 * kFacePointCount, 1>;

/// Projected minus observed pixels, (u, v) interleaved per model point.
ResidualVector reprojection_residuals(const RigidPose& pose, const LandmarkSet2D& landmarks,
                                      const FaceModel& model, const CameraIntrinsics& k);

/// Analytic d(residuals)/d(omega, dt) at pose, for the update in perturb_pose.
PoseJacobian reprojection_jacobian(const RigidPose& pose, const FaceModel& model,
                                   const CameraIntrinsics& k);

/// R' = exp([omega]x) R, t' = t + dt, with delta = (omega, dt).
RigidPose perturb_pose(const RigidPose& pose, const Eigen::Matrix<double, 6, 1>& delta);

/// Throws DegenerateEye when |p1 - p4| <= 1e-6 px.
double eye_aspect_ratio(const EyeLandmarks& eye);

enum class AttentionDirection { FacingRobotEyesOpen, FacingRobotEyesClosed, FacingAway };

std::string_view to_string(AttentionDirection d) noexcept;
std::optional<AttentionDirection> parse_attention_direction(std::string_view s) noexcept;

struct AttentionThresholds {
  double max_yaw = 30.0 * M_PI / 180.0;
  double max_pitch = 20.0 * M_PI / 180.0;
  double min_ear = 0.2;
};

/// An estimate that did not converge is reported as facing away.
AttentionDirection classify_attention_direction(const HeadPoseEstimate& est, double ear_left,
                                                double ear_right,
                                                const AttentionThresholds& thresholds = {});

}  // namespace coach
