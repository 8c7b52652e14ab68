#pragma once

// Human arm to two-arm robot joint angles.
//
// Torso-plane, "down", shoulder and elbow normals are built from cross
// products of limb vectors, and the four joint angles are unsigned angles
// between them. Only the left-arm derivation is native; a right arm is
// mirrored across the body's mid-plane and the S0/E0 signs are flipped.

#include <optional>
#include <string_view>

#include "coach/geometry.hpp"
#include "coach/skeleton.hpp"

namespace coach {

enum class ArmSide { Left, Right };

std::string_view to_string(ArmSide s) noexcept;

struct ArmObservation {
  Vec3 torso;
  Vec3 shoulder;           // active arm
  Vec3 opposite_shoulder;
  Vec3 elbow;
  Vec3 hand;
  ArmSide side = ArmSide::Left;
  Timestamp timestamp = 0.0;

  /// Throws DegenerateArm when two points lie within 1e-6 m of each other.
  void validate() const;

  /// Uses the hand joint when present, the wrist otherwise. Throws MissingJoint.
  static ArmObservation from_frame(const SkeletonFrame& frame, ArmSide side);
};

struct JointLimits {
  double min = 0.0;
  double max = 0.0;
  double clamp(double v) const { return v < min ? min : (v > max ? max : v); }
};

struct RobotArmModel {
  JointLimits s0{-1.70, 1.70};
  JointLimits s1{-2.15, 1.05};
  JointLimits e0{-3.05, 3.05};
  JointLimits e1{0.05, 2.62};
  double upper_arm = 0.37;
  double forearm = 0.37;

  void validate() const;
};

struct RobotJointAngles {
  double s0 = 0.0;
  double s1 = 0.0;
  double e0 = 0.0;
  double e1 = 0.0;
  Timestamp timestamp = 0.0;

  bool operator==(const RobotJointAngles&) const = default;
};

struct MotionThresholds {
  double tiny = 0.02;   // rad; every joint below this is jitter
  double large = 1.0;   // rad per frame; any joint above this is a tracking spike

  void validate() const;
};

/// Unit normals. elbow is nullopt when the arm is straight.
struct ArmNormals {
  Vec3 torso;
  Vec3 down;
  Vec3 shoulder;
  std::optional<Vec3> elbow;
};

/// Keeps limb directions and replaces the limb lengths with the robot's.
/// Throws DegenerateArm when a human limb is shorter than 1e-3 m.
ArmObservation scale_to_robot(const ArmObservation& obs, const RobotArmModel& model);

/// Reflects every point across the plane bisecting the two shoulders.
ArmObservation mirror_across_midplane(const ArmObservation& obs);

/// Normals of the observation as given (no mirroring for the right side).
/// Throws DegenerateConfiguration when any normal, including the elbow
/// normal of a straight arm, is undefined.
ArmNormals compute_normals(const ArmObservation& obs);

/// Unclamped angles. On a straight arm E0 is held at held_e0 (0 when absent).
/// Throws DegenerateConfiguration for a collinear torso or a shoulder normal
/// that vanishes.
RobotJointAngles compute_joint_angles(const ArmObservation& obs,
                                      std::optional<double> held_e0 = std::nullopt);

RobotJointAngles clamp_to_limits(const RobotJointAngles& angles, const RobotArmModel& model);

/// nullopt when every joint moved less than tiny or any joint moved more than
/// large (compared after clamping); otherwise the clamped candidate.
std::optional<RobotJointAngles> apply_motion_thresholds(
    const std::optional<RobotJointAngles>& previous, const RobotJointAngles& candidate,
    const RobotArmModel& model, const MotionThresholds& thresholds = {});

/// scale_to_robot, compute_joint_angles, then apply_motion_thresholds.
std::optional<RobotJointAngles> retarget(const ArmObservation& obs, const RobotArmModel& model,
                                         const std::optional<RobotJointAngles>& previous,
                                         const MotionThresholds& thresholds = {});

}  // namespace coach
