#include "coach/session_controller.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "coach/error.hpp"

namespace coach {

namespace {

void replace_all(std::string& s, std::string_view key, const std::string& value) {
  for (std::size_t pos = s.find(key); pos != std::string::npos;
       pos = s.find(key, pos + value.size())) {
    s.replace(pos, key.size(), value);
  }
}

constexpr std::array<std::string_view, 8> kPhaseNames = {
    "intro",  "exercise_setup", "exercise_active", "feedback", "attention_restore",
    "paused", "emergency_stop", "session_end",
};

constexpr std::array<std::string_view, 6> kCommandNames = {
    "say", "display", "demonstrate", "mirror", "wave", "stop_motion",
};

}  // namespace

std::string_view to_string(FeedbackPolicy p) noexcept {
  switch (p) {
    case FeedbackPolicy::LowStimulus: return "low_stimulus";
    case FeedbackPolicy::TurnBased: return "turn_based";
    case FeedbackPolicy::Mimicking: return "mimicking";
  }
  return "unknown";
}

std::optional<FeedbackPolicy> parse_policy(std::string_view s) noexcept {
  if (s == "low_stimulus" || s == "low-stimulus") return FeedbackPolicy::LowStimulus;
  if (s == "turn_based" || s == "turn-based") return FeedbackPolicy::TurnBased;
  if (s == "mimicking") return FeedbackPolicy::Mimicking;
  return std::nullopt;
}

std::string_view to_string(Phase p) noexcept { return kPhaseNames[static_cast<int>(p)]; }

std::optional<Phase> parse_phase(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kPhaseNames.size(); ++i) {
    if (kPhaseNames[i] == s) return static_cast<Phase>(i);
  }
  return std::nullopt;
}

std::string_view to_string(CommandKind k) noexcept { return kCommandNames[static_cast<int>(k)]; }

std::optional<CommandKind> parse_command_kind(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kCommandNames.size(); ++i) {
    if (kCommandNames[i] == s) return static_cast<CommandKind>(i);
  }
  return std::nullopt;
}

std::string display_name(ExerciseKind kind) {
  return kind == ExerciseKind::ShoulderPress ? "shoulder press" : "side lateral raise";
}

std::string correction_hint(RepFailure failure) {
  switch (failure) {
    case RepFailure::PathTooShort: return "move your arm through the whole motion";
    case RepFailure::PathTooLong: return "keep the movement compact and controlled";
    case RepFailure::PathNotSmooth: return "move smoothly without jerking";
    case RepFailure::InsufficientExcursion: return "lift your arm higher";
  }
  return "";
}

void SessionConfig::validate() const {
  if (exercises.empty()) throw Error(ErrorKind::InvalidParams, "session needs at least one exercise");
  if (repetitions < 1) throw Error(ErrorKind::InvalidParams, "repetitions must be >= 1");
  if (!(pause_timeout > 0.0)) throw Error(ErrorKind::InvalidParams, "pause timeout must be > 0");
}

Timestamp timestamp_of(const ControllerInput& input) {
  return std::visit(
      [](const auto& v) -> Timestamp {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, RepEvent> || std::is_same_v<T, InterruptionEvent> ||
                      std::is_same_v<T, SpeechEvent> || std::is_same_v<T, RobotJointAngles> ||
                      std::is_same_v<T, Tick> || std::is_same_v<T, AttentionRestored>) {
          return v.timestamp;
        }
      },
      input);
}

SessionController::SessionController(SessionConfig config) : config_(std::move(config)) {
  config_.validate();
}

std::optional<ExerciseKind> SessionController::current_exercise() const {
  if (exercise_index_ >= config_.exercises.size()) return std::nullopt;
  return config_.exercises[exercise_index_];
}

std::vector<BehaviorCommand> SessionController::command_log() const {
  std::vector<BehaviorCommand> out;
  for (const auto& e : journal_) {
    if (const auto* c = std::get_if<BehaviorCommand>(&e)) out.push_back(*c);
  }
  return out;
}

std::vector<BehaviorCommand> SessionController::step(const ControllerInput& input) {
  const Timestamp t = timestamp_of(input);
  if (last_t_ && t < *last_t_) {
    throw Error(ErrorKind::OutOfOrderInput,
                "input at " + std::to_string(t) + " s after " + std::to_string(*last_t_) + " s");
  }
  last_t_ = t;
  step_out_.clear();

  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Tick>) on_tick(v.timestamp);
        else if constexpr (std::is_same_v<T, RepEvent>) on_rep(v);
        else if constexpr (std::is_same_v<T, InterruptionEvent>) on_interruption(v);
        else if constexpr (std::is_same_v<T, SpeechEvent>) on_speech(v);
        else if constexpr (std::is_same_v<T, RobotJointAngles>) on_angles(v);
        else if constexpr (std::is_same_v<T, AttentionRestored>) on_restored(v.timestamp);
      },
      input);
  return step_out_;
}

void SessionController::operator_reset(Timestamp t) {
  if (phase_ != Phase::EmergencyStop) return;
  transition(t, Phase::Intro, "operator_reset");
  exercise_index_ = 0;
  reps_ = 0;
  total_reps_ = 0;
  last_t_ = t;
}

void SessionController::transition(Timestamp t, Phase to, std::string cause) {
  journal_.emplace_back(StateTransition{t, phase_, to, std::move(cause)});
  phase_ = to;
}

void SessionController::emit(BehaviorCommand cmd) {
  step_out_.push_back(cmd);
  journal_.emplace_back(std::move(cmd));
}

void SessionController::say(Timestamp t, const std::string& text) {
  BehaviorCommand c;
  c.timestamp = t;
  c.kind = CommandKind::Say;
  c.text = text;
  c.provenance = phase_;
  emit(std::move(c));
}

std::string SessionController::fill(const std::string& templ,
                                    std::optional<RepFailure> reason) const {
  std::string s = templ;
  const auto ex = current_exercise();
  replace_all(s, "{exercise}", ex ? display_name(*ex) : std::string());
  replace_all(s, "{count}", std::to_string(reps_));
  replace_all(s, "{target}", std::to_string(config_.repetitions));
  replace_all(s, "{reason}", reason ? correction_hint(*reason) : std::string());
  return s;
}

void SessionController::enter_setup(Timestamp t, bool announce) {
  if (announce) say(t, fill(config_.text.announce));
  BehaviorCommand d;
  d.timestamp = t;
  d.kind = CommandKind::Display;
  d.text = display_name(*current_exercise());
  d.provenance = phase_;
  emit(std::move(d));
}

void SessionController::on_tick(Timestamp t) {
  switch (phase_) {
    case Phase::Intro:
      say(t, fill(config_.text.benefits));
      transition(t, Phase::ExerciseSetup, "intro_done");
      enter_setup(t, false);
      break;
    case Phase::ExerciseSetup: {
      say(t, fill(config_.text.goal));
      BehaviorCommand demo;
      demo.timestamp = t;
      demo.kind = CommandKind::Demonstrate;
      demo.exercise = current_exercise();
      demo.provenance = phase_;
      emit(std::move(demo));
      say(t, fill(config_.text.trigger));
      transition(t, Phase::ExerciseActive, "setup_done");
      break;
    }
    case Phase::Paused:
      if (t - paused_since_ >= config_.pause_timeout) {
        transition(t, Phase::SessionEnd, "pause_timeout");
        say(t, fill(config_.text.farewell));
      }
      break;
    default:
      break;
  }
}

void SessionController::on_rep(const RepEvent& ev) {
  if (phase_ != Phase::ExerciseActive) {
    warnings_.push_back("discarded rep event at " + std::to_string(ev.timestamp) + " s in phase " +
                        std::string(to_string(phase_)));
    return;
  }
  if (current_exercise() != ev.exercise) {
    warnings_.push_back("discarded " + std::string(to_string(ev.exercise)) + " rep event at " +
                        std::to_string(ev.timestamp) + " s during another exercise");
    return;
  }
  const Timestamp t = ev.timestamp;
  if (ev.correct() && reps_ < config_.repetitions) {
    ++reps_;
    ++total_reps_;
  }
  if (config_.policy != FeedbackPolicy::LowStimulus) {
    transition(t, Phase::Feedback, "rep_event");
    say(t, ev.correct() ? fill(config_.text.praise) : fill(config_.text.correction, ev.failure));
    transition(t, Phase::ExerciseActive, "feedback_done");
  }
  if (ev.correct() && reps_ >= config_.repetitions) {
    ++exercise_index_;
    reps_ = 0;
    if (current_exercise()) {
      transition(t, Phase::ExerciseSetup, "target_reached");
      enter_setup(t, true);
    } else {
      transition(t, Phase::SessionEnd, "target_reached");
      say(t, fill(config_.text.farewell));
    }
  }
}

void SessionController::on_interruption(const InterruptionEvent& ev) {
  const Timestamp t = ev.timestamp;
  if (ev.kind == InterruptionKind::Emergency) {
    if (phase_ != Phase::EmergencyStop) transition(t, Phase::EmergencyStop, "emergency");
    BehaviorCommand stop;
    stop.timestamp = t;
    stop.kind = CommandKind::StopMotion;
    stop.provenance = phase_;
    emit(std::move(stop));
    say(t, fill(config_.text.alert));
    return;
  }
  if (phase_ == Phase::EmergencyStop || phase_ == Phase::SessionEnd) return;

  if (ev.kind == InterruptionKind::UserStop) {
    if (phase_ == Phase::Paused) return;
    resume_to_ = phase_;
    paused_since_ = t;
    transition(t, Phase::Paused, "user_stop");
    BehaviorCommand stop;
    stop.timestamp = t;
    stop.kind = CommandKind::StopMotion;
    stop.provenance = phase_;
    emit(std::move(stop));
    say(t, fill(config_.text.pause));
    return;
  }

  // attention_lost
  if (phase_ == Phase::Paused || phase_ == Phase::AttentionRestore) return;
  restore_to_ = phase_;
  transition(t, Phase::AttentionRestore, "attention_lost");
  BehaviorCommand wave;
  wave.timestamp = t;
  wave.kind = CommandKind::Wave;
  wave.provenance = phase_;
  emit(std::move(wave));
  say(t, fill(config_.text.query));
}

void SessionController::on_speech(const SpeechEvent& ev) {
  if (ev.keyword != SpeechKeyword::Start || phase_ != Phase::Paused) return;
  transition(ev.timestamp, resume_to_, "start");
  say(ev.timestamp, fill(config_.text.resume));
}

void SessionController::on_angles(const RobotJointAngles& angles) {
  if (config_.policy != FeedbackPolicy::Mimicking || phase_ != Phase::ExerciseActive) return;
  BehaviorCommand m;
  m.timestamp = angles.timestamp;
  m.kind = CommandKind::Mirror;
  m.angles = angles;
  m.provenance = phase_;
  emit(std::move(m));
}

void SessionController::on_restored(Timestamp t) {
  if (phase_ != Phase::AttentionRestore) return;
  transition(t, restore_to_, "attention_restored");
}

}  // namespace coach
