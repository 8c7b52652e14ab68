#pragma once

// Trace replay through perception and the session controller.
//
// Records sharing a timestamp form one group, processed as: speech, then
// landmarks (head pose and attention direction), then skeleton (controller
// tick, activity, attention monitor, exercise engines, retargeting).
// Annotations are ignored here and only used by build_report.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coach/config.hpp"
#include "coach/trace_io.hpp"

namespace coach {

struct HeadPoseSample {
  Timestamp timestamp = 0.0;
  std::optional<HeadPoseEstimate> estimate;  // nullopt when the solver failed
  std::optional<AttentionDirection> direction;
};

struct RunResult {
  std::vector<LogEntry> log;
  std::vector<RepEvent> engine_events;  // every engine, in emission order
  std::vector<HeadPoseSample> head_poses;
  std::vector<double> latencies_ms;  // one per group holding a skeleton or landmark record
  std::vector<RobotJointAngles> retargeted;  // angles that passed the motion thresholds
  std::size_t skeleton_frames = 0;
  std::size_t retarget_failures = 0;
  // Passing angles delivered while the controller was in exercise_active.
  std::size_t retarget_passed_active = 0;
  int session_reps = 0;
  Phase final_phase = Phase::Intro;
  std::vector<std::string> warnings;
};

class CoachPipeline {
 public:
  /// visual_attention = false feeds the monitor activity only, for traces
  /// without landmark records. Throws ConfigError on an invalid config.
  explicit CoachPipeline(CoachConfig config, bool visual_attention = true);

  /// Records must share one timestamp, later than the previous group's.
  /// Groups after emergency_stop are ignored.
  void process_group(std::span<const TraceRecord> group);

  bool stopped() const { return controller_.phase() == Phase::EmergencyStop; }
  const SessionController& controller() const { return controller_; }

  /// Moves the accumulated result out; the pipeline is spent afterwards.
  RunResult finish();

 private:
  void handle_speech(const SpeechEvent& ev);
  std::optional<AttentionDirection> handle_landmarks(const LandmarkRecord& lm);
  void handle_skeleton(const SkeletonFrame& frame, std::optional<AttentionDirection> direction);
  void step(const ControllerInput& input);

  CoachConfig config_;
  bool visual_attention_;
  FaceModel face_ = FaceModel::generic();
  SessionController controller_;
  AttentionMonitor monitor_;
  ActivityDetector activity_;
  std::vector<ExerciseEngine> engines_;
  std::optional<RobotJointAngles> last_angles_;
  std::size_t journal_seen_ = 0;
  std::optional<Timestamp> last_group_t_;
  RunResult result_;
};

/// Runs every group of the trace in order.
RunResult run_trace(std::span<const TraceRecord> records, const CoachConfig& config);

struct Metric {
  std::string name;
  std::string value;
  std::string unit;
};

using RunReport = std::vector<Metric>;

/// Rep, head-pose and attention metrics need annotations; with
/// require_annotations set their absence throws MissingAnnotations. Latency
/// metrics are the only fields that vary between identical runs.
RunReport build_report(std::span<const TraceRecord> records, const RunResult& run,
                       bool require_annotations);

/// Header row "metric,value,unit" then one row per metric.
void write_report_csv(std::ostream& out, const RunReport& report);

/// nullopt when the metric is absent.
std::optional<std::string> find_metric(const RunReport& report, std::string_view name);

/// Nearest-rank percentile, q in [0, 100]. 0 for an empty list.
double percentile(std::vector<double> values, double q);

}  // namespace coach
