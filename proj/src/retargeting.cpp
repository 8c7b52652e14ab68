#include "coach/retargeting.hpp"

#include <array>
#include <cmath>
#include <string>

#include "coach/error.hpp"

namespace coach {

namespace {

constexpr double kParallel = 1e-9;
constexpr double kStraightArm = 1e-6;

// Unit normal of a x b, or nullopt when the unit inputs are parallel to within tol.
std::optional<Vec3> unit_normal(const Vec3& a, const Vec3& b, double tol) {
  const Vec3 n = cross(normalize(a), normalize(b));
  if (n.norm() < tol) return std::nullopt;
  return normalize(n);
}

struct LeftArmAngles {
  double s0;
  double s1;
  std::optional<double> e0;
  double e1;
};

LeftArmAngles left_arm_angles(const ArmObservation& o) {
  const auto tn = unit_normal(o.opposite_shoulder - o.torso, o.shoulder - o.torso, kParallel);
  if (!tn) throw Error(ErrorKind::DegenerateConfiguration, "torso and shoulders are collinear");
  const Vec3 down = normalize(cross(*tn, o.shoulder - o.opposite_shoulder));
  const Vec3 elbow_to_shoulder = o.shoulder - o.elbow;
  const auto sn = unit_normal(down, elbow_to_shoulder, kParallel);
  if (!sn) throw Error(ErrorKind::DegenerateConfiguration, "upper arm is parallel to 'down'");
  const Vec3 hand_to_elbow = o.elbow - o.hand;
  const Vec3 shoulder_to_elbow = o.elbow - o.shoulder;
  const auto en = unit_normal(hand_to_elbow, shoulder_to_elbow, kStraightArm);

  LeftArmAngles a;
  a.s0 = -angle_between(*tn, *sn);
  a.s1 = angle_between(down, elbow_to_shoulder);
  if (en) a.e0 = -angle_between(*tn, *en);
  a.e1 = M_PI - angle_between(hand_to_elbow, shoulder_to_elbow);
  return a;
}

void check_limits(const JointLimits& l, const char* name) {
  if (!(l.min < l.max) || !std::isfinite(l.min) || !std::isfinite(l.max)) {
    throw Error(ErrorKind::InvalidParams, std::string("joint limits need min < max for ") + name);
  }
}

}  // namespace

std::string_view to_string(ArmSide s) noexcept { return s == ArmSide::Left ? "left" : "right"; }

void ArmObservation::validate() const {
  const std::array<const Vec3*, 5> pts = {&torso, &shoulder, &opposite_shoulder, &elbow, &hand};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!pts[i]->is_finite()) throw Error(ErrorKind::DegenerateArm, "non-finite arm point");
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (distance(*pts[i], *pts[j]) <= 1e-6) {
        throw Error(ErrorKind::DegenerateArm, "two arm points coincide");
      }
    }
  }
}

ArmObservation ArmObservation::from_frame(const SkeletonFrame& frame, ArmSide side) {
  const bool left = side == ArmSide::Left;
  const JointId hand = left ? JointId::LeftHand : JointId::RightHand;
  const JointId wrist = left ? JointId::LeftWrist : JointId::RightWrist;
  ArmObservation o;
  o.torso = frame.at(JointId::Torso);
  o.shoulder = frame.at(left ? JointId::LeftShoulder : JointId::RightShoulder);
  o.opposite_shoulder = frame.at(left ? JointId::RightShoulder : JointId::LeftShoulder);
  o.elbow = frame.at(left ? JointId::LeftElbow : JointId::RightElbow);
  o.hand = frame.has(hand) ? frame.at(hand) : frame.at(wrist);
  o.side = side;
  o.timestamp = frame.timestamp();
  return o;
}

void RobotArmModel::validate() const {
  check_limits(s0, "S0");
  check_limits(s1, "S1");
  check_limits(e0, "E0");
  check_limits(e1, "E1");
  if (!(upper_arm > 0.0) || !(forearm > 0.0)) {
    throw Error(ErrorKind::InvalidParams, "robot link lengths must be positive");
  }
}

void MotionThresholds::validate() const {
  if (!(tiny >= 0.0) || !(large > tiny)) {
    throw Error(ErrorKind::InvalidParams, "motion thresholds need 0 <= tiny < large");
  }
}

ArmObservation scale_to_robot(const ArmObservation& obs, const RobotArmModel& model) {
  const Vec3 upper = obs.elbow - obs.shoulder;
  const Vec3 fore = obs.hand - obs.elbow;
  if (upper.norm() <= 1e-3 || fore.norm() <= 1e-3) {
    throw Error(ErrorKind::DegenerateArm, "human limb shorter than 1 mm");
  }
  ArmObservation out = obs;
  out.elbow = obs.shoulder + normalize(upper) * model.upper_arm;
  out.hand = out.elbow + normalize(fore) * model.forearm;
  return out;
}

ArmObservation mirror_across_midplane(const ArmObservation& obs) {
  const Vec3 mid = (obs.shoulder + obs.opposite_shoulder) * 0.5;
  const Vec3 n = normalize(obs.shoulder - obs.opposite_shoulder);
  const auto reflect = [&](const Vec3& p) { return p - n * (2.0 * dot(p - mid, n)); };
  ArmObservation out = obs;
  out.torso = reflect(obs.torso);
  out.shoulder = reflect(obs.shoulder);
  out.opposite_shoulder = reflect(obs.opposite_shoulder);
  out.elbow = reflect(obs.elbow);
  out.hand = reflect(obs.hand);
  return out;
}

ArmNormals compute_normals(const ArmObservation& o) {
  const auto tn = unit_normal(o.opposite_shoulder - o.torso, o.shoulder - o.torso, kParallel);
  if (!tn) throw Error(ErrorKind::DegenerateConfiguration, "torso and shoulders are collinear");
  ArmNormals n;
  n.torso = *tn;
  n.down = normalize(cross(n.torso, o.shoulder - o.opposite_shoulder));
  const auto sn = unit_normal(n.down, o.shoulder - o.elbow, kParallel);
  if (!sn) throw Error(ErrorKind::DegenerateConfiguration, "upper arm is parallel to 'down'");
  n.shoulder = *sn;
  n.elbow = unit_normal(o.elbow - o.hand, o.elbow - o.shoulder, kStraightArm);
  if (!n.elbow) throw Error(ErrorKind::DegenerateConfiguration, "straight arm: elbow normal undefined");
  return n;
}

RobotJointAngles compute_joint_angles(const ArmObservation& obs, std::optional<double> held_e0) {
  const bool right = obs.side == ArmSide::Right;
  const LeftArmAngles a = left_arm_angles(right ? mirror_across_midplane(obs) : obs);
  const double sign = right ? -1.0 : 1.0;
  RobotJointAngles out;
  out.timestamp = obs.timestamp;
  out.s0 = sign * a.s0;
  out.s1 = a.s1;
  out.e0 = a.e0 ? sign * *a.e0 : held_e0.value_or(0.0);
  out.e1 = a.e1;
  return out;
}

RobotJointAngles clamp_to_limits(const RobotJointAngles& angles, const RobotArmModel& model) {
  RobotJointAngles out = angles;
  out.s0 = model.s0.clamp(angles.s0);
  out.s1 = model.s1.clamp(angles.s1);
  out.e0 = model.e0.clamp(angles.e0);
  out.e1 = model.e1.clamp(angles.e1);
  return out;
}

std::optional<RobotJointAngles> apply_motion_thresholds(
    const std::optional<RobotJointAngles>& previous, const RobotJointAngles& candidate,
    const RobotArmModel& model, const MotionThresholds& thresholds) {
  const RobotJointAngles clamped = clamp_to_limits(candidate, model);
  if (!previous) return clamped;
  const std::array<double, 4> deltas = {
      std::abs(clamped.s0 - previous->s0), std::abs(clamped.s1 - previous->s1),
      std::abs(clamped.e0 - previous->e0), std::abs(clamped.e1 - previous->e1)};
  bool all_tiny = true;
  for (double d : deltas) {
    if (d > thresholds.large) return std::nullopt;
    if (d >= thresholds.tiny) all_tiny = false;
  }
  if (all_tiny) return std::nullopt;
  return clamped;
}

std::optional<RobotJointAngles> retarget(const ArmObservation& obs, const RobotArmModel& model,
                                         const std::optional<RobotJointAngles>& previous,
                                         const MotionThresholds& thresholds) {
  obs.validate();
  const ArmObservation scaled = scale_to_robot(obs, model);
  std::optional<double> held;
  if (previous) held = previous->e0;
  return apply_motion_thresholds(previous, compute_joint_angles(scaled, held), model, thresholds);
}

}  // namespace coach
