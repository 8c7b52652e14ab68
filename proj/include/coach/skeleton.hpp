#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

#include "coach/geometry.hpp"

namespace coach {

/// Seconds since trace start.
using Timestamp = double;

enum class JointId : std::size_t {
  Head,
  Neck,
  Torso,
  LeftShoulder,
  RightShoulder,
  LeftElbow,
  RightElbow,
  LeftWrist,
  RightWrist,
  LeftHand,
  RightHand,
  LeftHip,
  RightHip,
};

inline constexpr std::size_t kJointCount = 13;

inline constexpr std::array<JointId, kJointCount> kAllJoints = {
    JointId::Head,      JointId::Neck,       JointId::Torso,     JointId::LeftShoulder,
    JointId::RightShoulder, JointId::LeftElbow, JointId::RightElbow, JointId::LeftWrist,
    JointId::RightWrist, JointId::LeftHand,  JointId::RightHand, JointId::LeftHip,
    JointId::RightHip,
};

std::string_view to_string(JointId id) noexcept;
/// Exact, case-sensitive snake_case name. Returns nullopt for unknown names.
std::optional<JointId> parse_joint(std::string_view name) noexcept;

/// Timestamped 3D joints for one person. Joints are optional; confidence
/// defaults to 1 for joints set without one.
class SkeletonFrame {
 public:
  SkeletonFrame() = default;
  explicit SkeletonFrame(Timestamp t) : timestamp_(t) {}

  Timestamp timestamp() const { return timestamp_; }
  void set_timestamp(Timestamp t) { timestamp_ = t; }

  /// Throws DegenerateVector if p has a non-finite component, InvalidParams
  /// if confidence is outside [0, 1].
  void set(JointId id, const Vec3& p, double confidence = 1.0);
  void erase(JointId id);

  bool has(JointId id) const { return slots_[index(id)].has_value(); }
  std::optional<Vec3> position(JointId id) const;
  /// Throws MissingJoint when absent.
  const Vec3& at(JointId id) const;
  /// 0 for absent joints.
  double confidence(JointId id) const;

  bool operator==(const SkeletonFrame&) const = default;

 private:
  struct Slot {
    Vec3 position;
    double confidence = 1.0;
    bool operator==(const Slot&) const = default;
  };
  static constexpr std::size_t index(JointId id) { return static_cast<std::size_t>(id); }

  Timestamp timestamp_ = 0.0;
  std::array<std::optional<Slot>, kJointCount> slots_{};
};

}  // namespace coach
