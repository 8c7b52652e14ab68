#pragma once

#include <deque>
#include <optional>
#include <string_view>

#include "coach/geometry.hpp"
#include "coach/head_pose.hpp"
#include "coach/skeleton.hpp"

namespace coach {

enum class SpeechKeyword { Start, Stop, Help, Hurts, Emergency };

std::string_view to_string(SpeechKeyword k) noexcept;
/// Case-insensitive match of the whole token against the closed keyword set.
std::optional<SpeechKeyword> parse_keyword(std::string_view word) noexcept;

struct SpeechEvent {
  Timestamp timestamp = 0.0;
  SpeechKeyword keyword = SpeechKeyword::Start;
  bool operator==(const SpeechEvent&) const = default;
};

enum class AttentionLabel { Attentive, Distracted, Interrupted };
enum class InterruptionKind { AttentionLost, UserStop, Emergency };
enum class InterruptionSource { Visual, Speech };

std::string_view to_string(AttentionLabel l) noexcept;
std::string_view to_string(InterruptionKind k) noexcept;
std::string_view to_string(InterruptionSource s) noexcept;
std::optional<InterruptionKind> parse_interruption_kind(std::string_view s) noexcept;
std::optional<InterruptionSource> parse_interruption_source(std::string_view s) noexcept;

struct InterruptionEvent {
  Timestamp timestamp = 0.0;
  InterruptionKind kind = InterruptionKind::AttentionLost;
  InterruptionSource source = InterruptionSource::Visual;
  bool operator==(const InterruptionEvent&) const = default;
};

struct AttentionState {
  AttentionLabel label = AttentionLabel::Attentive;
  double seconds_in_label = 0.0;
  std::optional<AttentionDirection> last_observation;
};

struct MonitorSettings {
  double timeout = 5.0;  // seconds of continuous distraction before interruption

  void validate() const;
};

/// Folds per-frame attention cues and speech keywords into an engagement
/// label. Frames must arrive in non-decreasing time.
class AttentionMonitor {
 public:
  explicit AttentionMonitor(MonitorSettings settings = {});

  /// direction is nullopt when no face was found, which counts as distracted.
  /// Throws NonMonotonicTimestamp.
  std::optional<InterruptionEvent> ingest_frame(Timestamp t,
                                                std::optional<AttentionDirection> direction,
                                                bool person_moving);

  std::optional<InterruptionEvent> ingest_speech(const SpeechEvent& ev);
  /// Throws UnknownKeyword for words outside the keyword set.
  std::optional<InterruptionEvent> ingest_speech(Timestamp t, std::string_view word);

  const AttentionState& state() const { return state_; }

 private:
  void set_label(AttentionLabel label, Timestamp t);

  MonitorSettings settings_;
  AttentionState state_;
  std::optional<Timestamp> last_t_;
  Timestamp label_since_ = 0.0;
  std::optional<Timestamp> distracted_since_;
};

/// Decides whether a tracked joint is moving: displacement over the trailing
/// window divided by the window's span exceeds min_speed.
class ActivityDetector {
 public:
  explicit ActivityDetector(double min_speed = 0.05, double window = 0.5);

  bool update(Timestamp t, const Vec3& p);
  bool moving() const { return moving_; }

 private:
  double min_speed_;
  double window_;
  std::deque<std::pair<Timestamp, Vec3>> samples_;
  bool moving_ = false;
};

}  // namespace coach
