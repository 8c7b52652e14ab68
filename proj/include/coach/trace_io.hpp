#pragma once

// Line-delimited trace and session-log formats.
//
// Every line is one JSON object {"t": seconds, "type": ..., "payload": {...}}.
// Numbers are written in shortest round-trip form, so read(write(x)) == x
// bit for bit.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "coach/attention_monitor.hpp"
#include "coach/exercise_engine.hpp"
#include "coach/head_pose.hpp"
#include "coach/session_controller.hpp"
#include "coach/skeleton.hpp"

namespace coach {

struct LandmarkRecord {
  LandmarkSet2D face;
  EyeLandmarks left_eye;
  EyeLandmarks right_eye;

  Timestamp timestamp() const { return face.timestamp; }
  bool operator==(const LandmarkRecord&) const = default;
};

/// Ground-truth rep boundary planted by the generator.
struct RepMarker {
  Timestamp timestamp = 0.0;
  ExerciseKind exercise = ExerciseKind::ShoulderPress;
  int index = 0;  // 1-based within the exercise
  bool correct = true;
  bool start = true;  // false marks the end of the rep

  bool operator==(const RepMarker&) const = default;
};

/// Ground-truth head pose and attention label for the landmark frame at timestamp.
struct PlantedPose {
  Timestamp timestamp = 0.0;
  YawPitchRoll angles;
  Vec3 translation;
  AttentionDirection attention = AttentionDirection::FacingRobotEyesOpen;

  bool operator==(const PlantedPose&) const = default;
};

using TraceRecord =
    std::variant<SkeletonFrame, LandmarkRecord, SpeechEvent, RepMarker, PlantedPose>;

Timestamp record_time(const TraceRecord& r);
bool is_annotation(const TraceRecord& r);

/// One line, without the trailing newline.
std::string format_record(const TraceRecord& r);
/// Throws Error(ParseError) describing the problem.
TraceRecord parse_record(std::string_view line);

void write_trace(std::ostream& out, std::span<const TraceRecord> records);
/// Blank lines are skipped. Throws LineError with kind ParseError or
/// UnsortedTrace; records are never reordered.
std::vector<TraceRecord> read_trace(std::istream& in);

/// Throw Error(IoFailure) when the file cannot be opened or written.
void write_trace_file(const std::filesystem::path& path, std::span<const TraceRecord> records);
std::vector<TraceRecord> read_trace_file(const std::filesystem::path& path);

/// A rep event as seen by the session. consumed is false when the controller
/// discarded it (wrong phase or exercise).
struct LoggedRep {
  RepEvent event;
  bool consumed = true;

  bool operator==(const LoggedRep&) const = default;
};

using LogEntry = std::variant<BehaviorCommand, LoggedRep, InterruptionEvent, StateTransition>;

Timestamp entry_time(const LogEntry& e);

std::string format_log_entry(const LogEntry& e);
LogEntry parse_log_entry(std::string_view line);

void write_session_log(std::ostream& out, std::span<const LogEntry> entries);
std::vector<LogEntry> read_session_log(std::istream& in);

void write_session_log_file(const std::filesystem::path& path, std::span<const LogEntry> entries);
std::vector<LogEntry> read_session_log_file(const std::filesystem::path& path);

}  // namespace coach
