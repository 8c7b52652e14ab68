#pragma once

// Plain-text session configuration.
//
//   # comment
//   shoulder_press.min_path_length = 0.6
//   session.policy = turn_based
//
// Keys are prefixed with the module they configure. Every key has a default,
// so a file only needs the values it changes.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "coach/attention_monitor.hpp"
#include "coach/exercise_engine.hpp"
#include "coach/head_pose.hpp"
#include "coach/retargeting.hpp"
#include "coach/session_controller.hpp"

namespace coach {

struct CoachConfig {
  ExerciseSpec shoulder_press = ExerciseSpec::shoulder_press();
  ExerciseSpec side_lateral_raise = ExerciseSpec::side_lateral_raise();
  EngineSettings engine;
  CameraIntrinsics camera;
  LmSettings lm;
  AttentionThresholds attention;
  MonitorSettings monitor;
  double activity_min_speed = 0.05;  // m/s
  double activity_window = 0.5;      // s
  RobotArmModel robot;
  MotionThresholds motion;
  SessionConfig session;

  const ExerciseSpec& spec(ExerciseKind kind) const;
  ExerciseSpec& spec(ExerciseKind kind);

  /// Throws ConfigError naming the first invalid group.
  void validate() const;
};

/// All keys, in file order.
std::vector<std::string> config_keys();

/// Value of key formatted as it would be written. Throws ConfigError for unknown keys.
std::string get_config_value(const CoachConfig& cfg, std::string_view key);
/// Throws ConfigError for unknown keys or malformed values.
void set_config_value(CoachConfig& cfg, std::string_view key, std::string_view value);

/// Applies each key = value line on top of base. Throws LineError(ConfigError)
/// for unknown or repeated keys, malformed lines and bad values.
CoachConfig parse_config(std::istream& in, CoachConfig base = {});
/// Throws Error(IoFailure) when the file cannot be read.
CoachConfig load_config(const std::filesystem::path& path, CoachConfig base = {});

/// Every key with its current value, grouped by module.
void write_config(std::ostream& out, const CoachConfig& cfg);

}  // namespace coach
