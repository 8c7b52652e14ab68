#pragma once

// Coach session state machine.
//
// The controller is a deterministic function of its configuration and the
// ordered inputs it is given. Every emitted command and phase change is
// appended to a journal that doubles as the session transcript.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "coach/attention_monitor.hpp"
#include "coach/exercise_engine.hpp"
#include "coach/retargeting.hpp"

namespace coach {

enum class FeedbackPolicy { LowStimulus, TurnBased, Mimicking };

std::string_view to_string(FeedbackPolicy p) noexcept;
/// Accepts both "turn_based" and "turn-based" spellings.
std::optional<FeedbackPolicy> parse_policy(std::string_view s) noexcept;

enum class Phase {
  Intro,
  ExerciseSetup,
  ExerciseActive,
  Feedback,
  AttentionRestore,
  Paused,
  EmergencyStop,
  SessionEnd,
};

std::string_view to_string(Phase p) noexcept;
std::optional<Phase> parse_phase(std::string_view s) noexcept;

/// Utterance table. Placeholders: {exercise}, {count}, {target}, {reason}.
struct Utterances {
  std::string benefits =
      "Exercising keeps your body strong and your mind sharp. Let's do some together.";
  std::string announce = "Next exercise: {exercise}.";
  std::string goal = "Let's do {target} {exercise} repetitions. Watch me first.";
  std::string trigger = "Now it's your turn. Go ahead.";
  std::string praise = "Good job! That's {count} of {target}.";
  std::string correction = "Let's try that one again: {reason}.";
  std::string query = "What are you doing? Let's keep exercising together.";
  std::string pause = "Okay, let's take a break. Say start when you are ready.";
  std::string resume = "Welcome back. Let's continue.";
  std::string alert = "Stopping now. I am calling for help.";
  std::string farewell = "We are done for today. Well done!";
};

/// Display name used in utterances, e.g. "shoulder press".
std::string display_name(ExerciseKind kind);
/// Spoken hint for each failure reason.
std::string correction_hint(RepFailure failure);

struct SessionConfig {
  std::vector<ExerciseKind> exercises{ExerciseKind::ShoulderPress,
                                      ExerciseKind::SideLateralRaise};
  int repetitions = 5;
  FeedbackPolicy policy = FeedbackPolicy::TurnBased;
  double pause_timeout = 120.0;  // seconds
  Utterances text;

  void validate() const;
};

enum class CommandKind { Say, Display, Demonstrate, Mirror, Wave, StopMotion };

std::string_view to_string(CommandKind k) noexcept;
std::optional<CommandKind> parse_command_kind(std::string_view s) noexcept;

struct BehaviorCommand {
  Timestamp timestamp = 0.0;
  CommandKind kind = CommandKind::Say;
  std::string text;                        // say, display
  std::optional<ExerciseKind> exercise;    // demonstrate
  std::optional<RobotJointAngles> angles;  // mirror
  Phase provenance = Phase::Intro;

  bool operator==(const BehaviorCommand&) const = default;
};

struct StateTransition {
  Timestamp timestamp = 0.0;
  Phase from = Phase::Intro;
  Phase to = Phase::Intro;
  std::string cause;

  bool operator==(const StateTransition&) const = default;
};

using JournalEntry = std::variant<StateTransition, BehaviorCommand>;

struct Tick {
  Timestamp timestamp = 0.0;
};

/// Sent by the caller when an interrupted person is attentive again.
struct AttentionRestored {
  Timestamp timestamp = 0.0;
};

using ControllerInput =
    std::variant<RepEvent, InterruptionEvent, SpeechEvent, RobotJointAngles, Tick,
                 AttentionRestored>;

Timestamp timestamp_of(const ControllerInput& input);

class SessionController {
 public:
  explicit SessionController(SessionConfig config);

  /// Returns the commands emitted by this step. Throws OutOfOrderInput when
  /// the input is older than the previous one.
  std::vector<BehaviorCommand> step(const ControllerInput& input);

  /// Leaves emergency_stop and restarts the session from the intro.
  void operator_reset(Timestamp t);

  std::vector<BehaviorCommand> command_log() const;
  const std::vector<JournalEntry>& journal() const { return journal_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  Phase phase() const { return phase_; }
  const SessionConfig& config() const { return config_; }
  std::size_t exercise_index() const { return exercise_index_; }
  /// nullopt once every exercise is done.
  std::optional<ExerciseKind> current_exercise() const;
  int reps_completed() const { return reps_; }
  int total_reps() const { return total_reps_; }

 private:
  void on_tick(Timestamp t);
  void on_rep(const RepEvent& ev);
  void on_interruption(const InterruptionEvent& ev);
  void on_speech(const SpeechEvent& ev);
  void on_angles(const RobotJointAngles& angles);
  void on_restored(Timestamp t);

  void transition(Timestamp t, Phase to, std::string cause);
  void emit(BehaviorCommand cmd);
  void say(Timestamp t, const std::string& text);
  void enter_setup(Timestamp t, bool announce);
  std::string fill(const std::string& templ, std::optional<RepFailure> reason = {}) const;

  SessionConfig config_;
  Phase phase_ = Phase::Intro;
  std::size_t exercise_index_ = 0;
  int reps_ = 0;
  int total_reps_ = 0;
  std::optional<Timestamp> last_t_;
  Phase restore_to_ = Phase::ExerciseActive;
  Phase resume_to_ = Phase::ExerciseActive;
  Timestamp paused_since_ = 0.0;
  std::vector<JournalEntry> journal_;
  std::vector<BehaviorCommand> step_out_;
  std::vector<std::string> warnings_;
};

}  // namespace coach
