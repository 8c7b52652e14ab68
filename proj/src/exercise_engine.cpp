#include "coach/exercise_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "coach/error.hpp"

namespace coach {

namespace {

constexpr double kMinSegment = 1e-6;

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::string_view to_string(ExerciseKind kind) noexcept {
  switch (kind) {
    case ExerciseKind::ShoulderPress: return "shoulder_press";
    case ExerciseKind::SideLateralRaise: return "side_lateral_raise";
  }
  return "unknown";
}

std::optional<ExerciseKind> parse_exercise(std::string_view name) noexcept {
  if (name == "shoulder_press") return ExerciseKind::ShoulderPress;
  if (name == "side_lateral_raise") return ExerciseKind::SideLateralRaise;
  return std::nullopt;
}

std::string_view to_string(RepVerdict v) noexcept {
  return v == RepVerdict::Correct ? "correct" : "incorrect";
}

std::string_view to_string(RepFailure f) noexcept {
  switch (f) {
    case RepFailure::PathTooShort: return "path_too_short";
    case RepFailure::PathTooLong: return "path_too_long";
    case RepFailure::PathNotSmooth: return "path_not_smooth";
    case RepFailure::InsufficientExcursion: return "insufficient_excursion";
  }
  return "unknown";
}

std::optional<RepVerdict> parse_verdict(std::string_view s) noexcept {
  if (s == "correct") return RepVerdict::Correct;
  if (s == "incorrect") return RepVerdict::Incorrect;
  return std::nullopt;
}

std::optional<RepFailure> parse_failure(std::string_view s) noexcept {
  for (auto f : {RepFailure::PathTooShort, RepFailure::PathTooLong, RepFailure::PathNotSmooth,
                 RepFailure::InsufficientExcursion}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

void RegionOfInterest::validate() const {
  if (!positive_finite(extents.x) || !positive_finite(extents.y) || !positive_finite(extents.z)) {
    throw Error(ErrorKind::InvalidParams, "region of interest extents must be positive");
  }
  if (!offset.is_finite()) throw Error(ErrorKind::InvalidParams, "non-finite ROI offset");
}

void ExerciseSpec::validate() const {
  roi.validate();
  if (!(min_path_length >= 0.0) || !(min_path_length < max_path_length)) {
    throw Error(ErrorKind::InvalidParams, "need 0 <= min path length < max path length");
  }
  if (!(max_segment_angle > 0.0 && max_segment_angle <= M_PI)) {
    throw Error(ErrorKind::InvalidParams, "max segment angle must lie in (0, pi]");
  }
  if (!positive_finite(min_excursion)) {
    throw Error(ErrorKind::InvalidParams, "min excursion must be positive");
  }
  if (std::abs(excursion_axis.norm() - 1.0) > 1e-6) {
    throw Error(ErrorKind::InvalidParams, "excursion axis must be a unit vector");
  }
  if (!excursion_origin.is_finite()) {
    throw Error(ErrorKind::InvalidParams, "non-finite excursion origin");
  }
  if (target_repetitions < 1) throw Error(ErrorKind::InvalidParams, "target repetitions must be >= 1");
}

ExerciseSpec ExerciseSpec::shoulder_press() {
  ExerciseSpec s;
  s.kind = ExerciseKind::ShoulderPress;
  s.tracked_joint = JointId::LeftWrist;
  s.roi = {JointId::LeftShoulder, {0.0, 0.20, 0.0}, {0.35, 0.45, 0.35}};
  s.min_path_length = 0.6;
  s.max_path_length = 2.0;
  s.max_segment_angle = 2.6;
  s.min_excursion = 0.30;
  s.excursion_axis = {0.0, 1.0, 0.0};
  s.excursion_origin = {0.0, 0.0, 0.0};
  s.target_repetitions = 5;
  return s;
}

ExerciseSpec ExerciseSpec::side_lateral_raise() {
  ExerciseSpec s;
  s.kind = ExerciseKind::SideLateralRaise;
  s.tracked_joint = JointId::LeftWrist;
  s.roi = {JointId::LeftShoulder, {0.25, -0.25, 0.0}, {0.45, 0.45, 0.35}};
  s.min_path_length = 0.5;
  s.max_path_length = 1.8;
  s.max_segment_angle = 2.6;
  s.min_excursion = 0.30;
  s.excursion_axis = {1.0, 0.0, 0.0};
  s.excursion_origin = {0.05, 0.0, 0.0};
  s.target_repetitions = 5;
  return s;
}

ExerciseSpec ExerciseSpec::defaults_for(ExerciseKind kind) {
  return kind == ExerciseKind::ShoulderPress ? shoulder_press() : side_lateral_raise();
}

void EngineSettings::validate() const {
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
    throw Error(ErrorKind::InvalidParams, "min confidence outside [0, 1]");
  }
  if (!(sample_spacing >= 0.0)) throw Error(ErrorKind::InvalidParams, "negative sample spacing");
  if (!(end_fraction >= 0.0 && end_fraction < start_fraction && start_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidParams, "need 0 <= end band < start band < 1");
  }
}

double path_length(std::span<const Vec3> points) {
  if (points.size() < 2) throw Error(ErrorKind::TooFewPoints, "path length needs >= 2 points");
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) total += distance(points[k], points[k + 1]);
  return total;
}

std::vector<double> path_angles(std::span<const Vec3> points) {
  std::vector<Vec3> kept;
  kept.reserve(points.size());
  for (const auto& p : points) {
    if (kept.empty() || distance(kept.back(), p) > kMinSegment) kept.push_back(p);
  }
  if (kept.size() < 3) {
    throw Error(ErrorKind::TooFewPoints, "path angles need >= 3 distinct points");
  }
  std::vector<double> out;
  out.reserve(kept.size() - 2);
  for (std::size_t k = 0; k + 2 < kept.size(); ++k) {
    out.push_back(angle_between(kept[k + 1] - kept[k], kept[k + 2] - kept[k + 1]));
  }
  return out;
}

bool roi_contains(const SkeletonFrame& frame, const RegionOfInterest& roi, JointId joint) {
  const Vec3 d = frame.at(joint) - (frame.at(roi.anchor) + roi.offset);
  return std::abs(d.x) <= roi.extents.x && std::abs(d.y) <= roi.extents.y &&
         std::abs(d.z) <= roi.extents.z;
}

ExerciseEngine::ExerciseEngine(ExerciseSpec spec, EngineSettings settings)
    : spec_(spec), settings_(settings) {
  spec_.validate();
  settings_.validate();
}

std::optional<RepEvent> ExerciseEngine::update(const SkeletonFrame& frame) {
  const Timestamp t = frame.timestamp();
  if (last_t_ && !(t > *last_t_)) {
    throw Error(ErrorKind::NonMonotonicTimestamp,
                "frame at " + std::to_string(t) + " s after " + std::to_string(*last_t_) + " s");
  }
  last_t_ = t;

  if (!frame.has(spec_.tracked_joint)) {
    throw Error(ErrorKind::MissingJoint,
                "tracked joint " + std::string(to_string(spec_.tracked_joint)) + " absent");
  }
  // Brief occlusions are skipped rather than treated as leaving the box.
  if (frame.confidence(spec_.tracked_joint) < settings_.min_confidence) return std::nullopt;

  const Vec3& p = frame.at(spec_.tracked_joint);
  if (!roi_contains(frame, spec_.roi, spec_.tracked_joint)) {
    std::optional<RepEvent> ev;
    if (active_) ev = close_attempt(t);
    path_.clear();
    return ev;
  }

  const Vec3 origin = frame.at(spec_.roi.anchor) + spec_.excursion_origin;
  const double excursion = dot(p - origin, spec_.excursion_axis);
  const double start_band = settings_.start_fraction * spec_.min_excursion;
  const double end_band = settings_.end_fraction * spec_.min_excursion;

  if (!active_) {
    if (excursion <= start_band) {
      path_.assign(1, p);
      return std::nullopt;
    }
    active_ = true;
    peak_excursion_ = excursion;
  } else {
    peak_excursion_ = std::max(peak_excursion_, excursion);
  }

  if (path_.empty() || distance(path_.back(), p) >= settings_.sample_spacing) path_.push_back(p);

  if (excursion < end_band) {
    RepEvent ev = close_attempt(t);
    path_.assign(1, p);
    return ev;
  }
  return std::nullopt;
}

RepEvent ExerciseEngine::close_attempt(Timestamp t) {
  RepEvent ev;
  ev.exercise = spec_.kind;
  ev.timestamp = t;
  ev.excursion = peak_excursion_;
  ev.path_length = path_.size() >= 2 ? path_length(path_) : 0.0;
  if (path_.size() >= 3) {
    try {
      const auto angles = path_angles(path_);
      ev.max_segment_angle = *std::max_element(angles.begin(), angles.end());
    } catch (const Error&) {
      // Fewer than three distinct samples: a path with no interior vertex.
    }
  }

  if (ev.excursion < spec_.min_excursion) {
    ev.failure = RepFailure::InsufficientExcursion;
  } else if (ev.path_length < spec_.min_path_length) {
    ev.failure = RepFailure::PathTooShort;
  } else if (ev.path_length > spec_.max_path_length) {
    ev.failure = RepFailure::PathTooLong;
  } else if (ev.max_segment_angle > spec_.max_segment_angle) {
    ev.failure = RepFailure::PathNotSmooth;
  }

  if (ev.failure) {
    ev.verdict = RepVerdict::Incorrect;
    ++counts_.incorrect;
  } else {
    ev.verdict = RepVerdict::Correct;
    ++counts_.correct;
  }
  ev.rep_index = counts_.correct;

  active_ = false;
  peak_excursion_ = 0.0;
  path_.clear();
  return ev;
}

}  // namespace coach
