#include "coach/attention_monitor.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <string>

#include "coach/error.hpp"

namespace coach {

namespace {

constexpr std::array<std::string_view, 5> kKeywords = {"start", "stop", "help", "hurts",
                                                       "emergency"};

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != static_cast<unsigned char>(b[i])) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::string_view to_string(SpeechKeyword k) noexcept { return kKeywords[static_cast<int>(k)]; }

std::optional<SpeechKeyword> parse_keyword(std::string_view word) noexcept {
  for (std::size_t i = 0; i < kKeywords.size(); ++i) {
    if (iequals(word, kKeywords[i])) return static_cast<SpeechKeyword>(i);
  }
  return std::nullopt;
}

std::string_view to_string(AttentionLabel l) noexcept {
  switch (l) {
    case AttentionLabel::Attentive: return "attentive";
    case AttentionLabel::Distracted: return "distracted";
    case AttentionLabel::Interrupted: return "interrupted";
  }
  return "unknown";
}

std::string_view to_string(InterruptionKind k) noexcept {
  switch (k) {
    case InterruptionKind::AttentionLost: return "attention_lost";
    case InterruptionKind::UserStop: return "user_stop";
    case InterruptionKind::Emergency: return "emergency";
  }
  return "unknown";
}

std::string_view to_string(InterruptionSource s) noexcept {
  return s == InterruptionSource::Visual ? "visual" : "speech";
}

std::optional<InterruptionKind> parse_interruption_kind(std::string_view s) noexcept {
  if (s == "attention_lost") return InterruptionKind::AttentionLost;
  if (s == "user_stop") return InterruptionKind::UserStop;
  if (s == "emergency") return InterruptionKind::Emergency;
  return std::nullopt;
}

std::optional<InterruptionSource> parse_interruption_source(std::string_view s) noexcept {
  if (s == "visual") return InterruptionSource::Visual;
  if (s == "speech") return InterruptionSource::Speech;
  return std::nullopt;
}

void MonitorSettings::validate() const {
  if (!(timeout > 0.0) || !std::isfinite(timeout)) {
    throw Error(ErrorKind::InvalidParams, "attention timeout must be positive");
  }
}

AttentionMonitor::AttentionMonitor(MonitorSettings settings) : settings_(settings) {
  settings_.validate();
}

void AttentionMonitor::set_label(AttentionLabel label, Timestamp t) {
  if (label != state_.label) {
    state_.label = label;
    label_since_ = t;
  }
  state_.seconds_in_label = t - label_since_;
}

std::optional<InterruptionEvent> AttentionMonitor::ingest_frame(
    Timestamp t, std::optional<AttentionDirection> direction, bool person_moving) {
  if (last_t_ && t < *last_t_) {
    throw Error(ErrorKind::NonMonotonicTimestamp, "attention frame at " + std::to_string(t) +
                                                      " s after " + std::to_string(*last_t_) +
                                                      " s");
  }
  if (!last_t_) label_since_ = t;
  last_t_ = t;
  state_.last_observation = direction;

  const bool attentive = person_moving || direction == AttentionDirection::FacingRobotEyesOpen;
  if (attentive) {
    distracted_since_.reset();
    set_label(AttentionLabel::Attentive, t);
    return std::nullopt;
  }

  if (!distracted_since_) distracted_since_ = t;
  if (state_.label == AttentionLabel::Interrupted) {
    set_label(AttentionLabel::Interrupted, t);
    return std::nullopt;
  }
  if (t - *distracted_since_ >= settings_.timeout) {
    set_label(AttentionLabel::Interrupted, t);
    return InterruptionEvent{t, InterruptionKind::AttentionLost, InterruptionSource::Visual};
  }
  set_label(AttentionLabel::Distracted, t);
  return std::nullopt;
}

std::optional<InterruptionEvent> AttentionMonitor::ingest_speech(const SpeechEvent& ev) {
  switch (ev.keyword) {
    case SpeechKeyword::Help:
    case SpeechKeyword::Hurts:
    case SpeechKeyword::Emergency:
      return InterruptionEvent{ev.timestamp, InterruptionKind::Emergency,
                               InterruptionSource::Speech};
    case SpeechKeyword::Stop:
      return InterruptionEvent{ev.timestamp, InterruptionKind::UserStop,
                               InterruptionSource::Speech};
    case SpeechKeyword::Start:
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<InterruptionEvent> AttentionMonitor::ingest_speech(Timestamp t,
                                                                 std::string_view word) {
  const auto kw = parse_keyword(word);
  if (!kw) throw Error(ErrorKind::UnknownKeyword, "'" + std::string(word) + "'");
  return ingest_speech(SpeechEvent{t, *kw});
}

ActivityDetector::ActivityDetector(double min_speed, double window)
    : min_speed_(min_speed), window_(window) {
  if (!(min_speed >= 0.0) || !(window > 0.0)) {
    throw Error(ErrorKind::InvalidParams, "activity detector needs speed >= 0 and window > 0");
  }
}

bool ActivityDetector::update(Timestamp t, const Vec3& p) {
  samples_.emplace_back(t, p);
  while (samples_.size() > 1 && t - samples_[1].first >= window_) samples_.pop_front();
  const auto& [t0, p0] = samples_.front();
  const double span = t - t0;
  moving_ = span > 0.0 && distance(p, p0) / span > min_speed_;
  return moving_;
}

}  // namespace coach
