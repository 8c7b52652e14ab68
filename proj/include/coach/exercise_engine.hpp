#pragma once

// Online repetition recognition for seated arm exercises.
//
// A tracked joint (normally a wrist) is gated by a body-relative box. While it
// is inside the box an attempt opens once the joint moves past a start band
// along the exercise's excursion axis, and closes when it falls back under a
// lower end band or leaves the box. The closed attempt's polyline is then
// judged by its length, its sharpest turn and its peak excursion.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "coach/geometry.hpp"
#include "coach/skeleton.hpp"

namespace coach {

enum class ExerciseKind { ShoulderPress, SideLateralRaise };

std::string_view to_string(ExerciseKind kind) noexcept;
std::optional<ExerciseKind> parse_exercise(std::string_view name) noexcept;

/// Axis-aligned box centred at anchor + offset with half-widths extents.
struct RegionOfInterest {
  JointId anchor = JointId::LeftShoulder;
  Vec3 offset{};
  Vec3 extents{0.3, 0.3, 0.3};

  void validate() const;
};

struct ExerciseSpec {
  ExerciseKind kind = ExerciseKind::ShoulderPress;
  JointId tracked_joint = JointId::LeftWrist;
  RegionOfInterest roi;
  double min_path_length = 0.6;
  double max_path_length = 2.0;
  double max_segment_angle = 2.6;
  double min_excursion = 0.30;
  // Excursion is measured along this unit axis from roi.anchor + excursion_origin.
  Vec3 excursion_axis{0.0, 1.0, 0.0};
  Vec3 excursion_origin{};
  int target_repetitions = 5;

  /// Throws InvalidParams on a violated invariant.
  void validate() const;

  static ExerciseSpec shoulder_press();
  static ExerciseSpec side_lateral_raise();
  static ExerciseSpec defaults_for(ExerciseKind kind);
};

struct EngineSettings {
  double min_confidence = 0.3;
  // Minimum spacing between buffered path samples, meters.
  double sample_spacing = 0.10;
  // Start and end bands as fractions of min_excursion.
  double start_fraction = 0.2;
  double end_fraction = 0.0;

  void validate() const;
};

enum class RepVerdict { Correct, Incorrect };
enum class RepFailure { PathTooShort, PathTooLong, PathNotSmooth, InsufficientExcursion };

std::string_view to_string(RepVerdict v) noexcept;
std::string_view to_string(RepFailure f) noexcept;
std::optional<RepVerdict> parse_verdict(std::string_view s) noexcept;
std::optional<RepFailure> parse_failure(std::string_view s) noexcept;

struct RepEvent {
  ExerciseKind exercise = ExerciseKind::ShoulderPress;
  RepVerdict verdict = RepVerdict::Correct;
  std::optional<RepFailure> failure;
  double path_length = 0.0;
  double max_segment_angle = 0.0;
  double excursion = 0.0;
  int rep_index = 0;
  Timestamp timestamp = 0.0;

  bool correct() const { return verdict == RepVerdict::Correct; }
  bool operator==(const RepEvent&) const = default;
};

struct RepCounts {
  int correct = 0;
  int incorrect = 0;
  bool operator==(const RepCounts&) const = default;
};

/// Sum of consecutive 3D segment lengths. Throws TooFewPoints for < 2 points.
double path_length(std::span<const Vec3> points);

/// Turning angle at each interior vertex after dropping segments shorter than
/// 1e-6 m. Throws TooFewPoints when fewer than 3 distinct points remain.
std::vector<double> path_angles(std::span<const Vec3> points);

/// Throws MissingJoint when the anchor or the tracked joint is absent.
bool roi_contains(const SkeletonFrame& frame, const RegionOfInterest& roi, JointId joint);

/// One instance per tracked person and exercise; feed frames in order.
class ExerciseEngine {
 public:
  explicit ExerciseEngine(ExerciseSpec spec, EngineSettings settings = {});

  /// Throws NonMonotonicTimestamp or MissingJoint.
  std::optional<RepEvent> update(const SkeletonFrame& frame);

  RepCounts counts() const { return counts_; }
  const ExerciseSpec& spec() const { return spec_; }
  bool attempt_active() const { return active_; }
  std::span<const Vec3> buffered_path() const { return path_; }

 private:
  RepEvent close_attempt(Timestamp t);

  ExerciseSpec spec_;
  EngineSettings settings_;
  std::optional<Timestamp> last_t_;
  std::vector<Vec3> path_;
  bool active_ = false;
  double peak_excursion_ = 0.0;
  RepCounts counts_;
};

}  // namespace coach
