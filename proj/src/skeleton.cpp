#include "coach/skeleton.hpp"

#include <string>

#include "coach/error.hpp"

namespace coach {

namespace {

constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "head",       "neck",       "torso",       "left_shoulder", "right_shoulder",
    "left_elbow", "right_elbow", "left_wrist", "right_wrist",    "left_hand",
    "right_hand", "left_hip",   "right_hip",
};

}  // namespace

std::string_view to_string(JointId id) noexcept {
  return kJointNames[static_cast<std::size_t>(id)];
}

std::optional<JointId> parse_joint(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kJointCount; ++i) {
    if (kJointNames[i] == name) return static_cast<JointId>(i);
  }
  return std::nullopt;
}

void SkeletonFrame::set(JointId id, const Vec3& p, double confidence) {
  if (!p.is_finite()) {
    throw Error(ErrorKind::DegenerateVector,
                "non-finite position for joint " + std::string(to_string(id)));
  }
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw Error(ErrorKind::InvalidParams, "joint confidence outside [0, 1]");
  }
  slots_[index(id)] = Slot{p, confidence};
}

void SkeletonFrame::erase(JointId id) { slots_[index(id)].reset(); }

std::optional<Vec3> SkeletonFrame::position(JointId id) const {
  const auto& slot = slots_[index(id)];
  if (!slot) return std::nullopt;
  return slot->position;
}

const Vec3& SkeletonFrame::at(JointId id) const {
  const auto& slot = slots_[index(id)];
  if (!slot) {
    throw Error(ErrorKind::MissingJoint, "frame lacks joint " + std::string(to_string(id)));
  }
  return slot->position;
}

double SkeletonFrame::confidence(JointId id) const {
  const auto& slot = slots_[index(id)];
  return slot ? slot->confidence : 0.0;
}

}  // namespace coach
