#pragma once

// Synthetic seated-exercise traces with planted ground truth.
//
// A seated subject faces the camera. The left arm performs smooth sinusoidal
// repetitions of each requested exercise and the right arm mirrors it. Facial
// landmarks are projected from a scripted head pose, and rep boundaries and
// head poses are written as annotation records.

#include <cstdint>
#include <optional>
#include <vector>

#include "coach/trace_io.hpp"

namespace coach {

struct AttentionSegment {
  Timestamp start = 0.0;
  Timestamp end = 0.0;
  AttentionDirection label = AttentionDirection::FacingAway;
};

struct GeneratorParams {
  /// Performed in order. Empty gives an idle trace of idle_seconds.
  std::vector<ExerciseKind> exercises{ExerciseKind::ShoulderPress};
  int reps = 5;            // correct reps per exercise
  int malformed_reps = 0;  // low-amplitude reps per exercise, interleaved with correct ones
  double joint_noise = 0.0;   // meters, per coordinate
  double pixel_noise = 0.0;   // pixels, per coordinate
  double frame_rate = 30.0;   // Hz
  std::uint64_t seed = 1;
  /// Peak excursion of a correct rep; the exercise default when absent.
  std::optional<double> amplitude;
  double malformed_amplitude = 0.10;
  double lead_in = 1.5;   // seconds of rest before each exercise
  double cycle = 3.0;     // seconds per rep
  double rest = 1.0;      // seconds between reps
  double idle_seconds = 0.0;  // rest appended after the last exercise
  double depth = 2.0;         // subject distance from the camera, meters
  bool landmarks = true;
  /// Frames outside every segment are facing_robot_eyes_open.
  std::vector<AttentionSegment> attention;
  std::vector<SpeechEvent> speech;
  CameraIntrinsics camera;

  /// Throws InvalidParams.
  void validate() const;
};

/// Default peak excursion of a correct rep: 0.45 m press, 0.40 m lateral raise.
double default_amplitude(ExerciseKind kind);

/// Timestamp-sorted records; deterministic for fixed params.
std::vector<TraceRecord> generate_trace(const GeneratorParams& params);

struct TraceSummary {
  std::size_t skeleton_frames = 0;
  std::size_t landmark_frames = 0;
  std::size_t speech_events = 0;
  std::size_t planted_poses = 0;
  std::vector<std::pair<ExerciseKind, int>> correct_reps;    // per exercise, in order seen
  std::vector<std::pair<ExerciseKind, int>> malformed_reps;
  Timestamp duration = 0.0;
};

TraceSummary summarize(std::span<const TraceRecord> records);

/// Face landmarks and eye contours for a head pose, before noise.
LandmarkRecord render_face(Timestamp t, const RigidPose& head, bool eyes_open,
                           const CameraIntrinsics& camera);

}  // namespace coach
