#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coach/attention_monitor.hpp"
#include "coach/error.hpp"
#include "support/gen.hpp"

using namespace coach;
using coach::testing::Gen;

namespace {

constexpr auto kOpen = AttentionDirection::FacingRobotEyesOpen;
constexpr auto kClosed = AttentionDirection::FacingRobotEyesClosed;
constexpr auto kAway = AttentionDirection::FacingAway;

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::IoFailure;
}

// Feeds 30 Hz frames over [from, to) and collects events.
std::vector<InterruptionEvent> feed(AttentionMonitor& m, double from, double to,
                                    std::optional<AttentionDirection> d, bool moving = false) {
  std::vector<InterruptionEvent> out;
  for (int i = 0;; ++i) {
    const double t = from + i / 30.0;
    if (t >= to - 1e-9) break;
    if (auto ev = m.ingest_frame(t, d, moving)) out.push_back(*ev);
  }
  return out;
}

}  // namespace

TEST_CASE("an attentive stream raises nothing") {
  AttentionMonitor m;
  CHECK(feed(m, 0, 60, kOpen).empty());
  CHECK(m.state().label == AttentionLabel::Attentive);
  CHECK(m.state().seconds_in_label == doctest::Approx(60 - 1 / 30.0));
}

TEST_CASE("six seconds facing away raises one event at the timeout") {
  AttentionMonitor m;
  feed(m, 0, 2, kOpen);
  const auto events = feed(m, 2, 8, kAway);
  REQUIRE(events.size() == 1);
  CHECK(events[0].kind == InterruptionKind::AttentionLost);
  CHECK(events[0].source == InterruptionSource::Visual);
  CHECK(events[0].timestamp == doctest::Approx(7.0).epsilon(1e-9));
  CHECK(m.state().label == AttentionLabel::Interrupted);
  // Still away: no repeat until attention comes back.
  CHECK(feed(m, 8, 20, kAway).empty());
  feed(m, 20, 21, kOpen);
  CHECK(m.state().label == AttentionLabel::Attentive);
  CHECK(feed(m, 21, 27, kAway).size() == 1);
}

TEST_CASE("a short look away recovers without an event") {
  AttentionMonitor m;
  CHECK(feed(m, 0, 3, kAway).empty());
  CHECK(m.state().label == AttentionLabel::Distracted);
  CHECK(feed(m, 3, 4, kOpen).empty());
  CHECK(m.state().label == AttentionLabel::Attentive);
  CHECK(m.state().seconds_in_label < 1.0);
}

TEST_CASE("closed eyes and missing faces count as distracted, movement as attentive") {
  AttentionMonitor a;
  CHECK(feed(a, 0, 6, kClosed).size() == 1);
  AttentionMonitor b;
  CHECK(feed(b, 0, 6, std::nullopt).size() == 1);
  AttentionMonitor c;
  CHECK(feed(c, 0, 30, kAway, true).empty());
  CHECK(c.state().label == AttentionLabel::Attentive);
}

TEST_CASE("the seconds counter restarts on every label change") {
  AttentionMonitor m;
  feed(m, 0, 4, kOpen);
  m.ingest_frame(4.0, kAway, false);
  CHECK(m.state().label == AttentionLabel::Distracted);
  CHECK(m.state().seconds_in_label == 0.0);
  m.ingest_frame(4.5, kAway, false);
  CHECK(m.state().seconds_in_label == doctest::Approx(0.5));
}

TEST_CASE("timeout is configurable") {
  AttentionMonitor m(MonitorSettings{2.0});
  const auto events = feed(m, 0, 3, kAway);
  REQUIRE(events.size() == 1);
  CHECK(events[0].timestamp == doctest::Approx(2.0));
  CHECK(kind_of([] { AttentionMonitor bad(MonitorSettings{0.0}); }) == ErrorKind::InvalidParams);
}

TEST_CASE("at most one event per distraction episode") {
  Gen g(41);
  for (int trial = 0; trial < 50; ++trial) {
    AttentionMonitor m;
    double t = 0;
    int episodes_long = 0;
    int events = 0;
    for (int seg = 0; seg < 10; ++seg) {
      const double len = g.uniform(0.5, 12.0);
      const bool away = seg % 2 == 1;
      if (away && len >= 5.0 + 1 / 30.0) ++episodes_long;
      events += static_cast<int>(feed(m, t, t + len, away ? kAway : kOpen).size());
      t += len;
    }
    CHECK(events == episodes_long);
  }
}

TEST_CASE("frames must not go back in time") {
  AttentionMonitor m;
  m.ingest_frame(2.0, kOpen, false);
  CHECK_NOTHROW(m.ingest_frame(2.0, kOpen, false));
  CHECK(kind_of([&] { m.ingest_frame(1.0, kOpen, false); }) == ErrorKind::NonMonotonicTimestamp);
}

TEST_CASE("speech keywords") {
  AttentionMonitor m;
  const auto e = m.ingest_speech(12.0, "emergency");
  REQUIRE(e);
  CHECK(*e == InterruptionEvent{12.0, InterruptionKind::Emergency, InterruptionSource::Speech});
  CHECK(m.ingest_speech(1.0, "hurts")->kind == InterruptionKind::Emergency);
  CHECK(m.ingest_speech(1.0, "HELP")->kind == InterruptionKind::Emergency);
  CHECK(m.ingest_speech(1.0, "Stop")->kind == InterruptionKind::UserStop);
  CHECK_FALSE(m.ingest_speech(1.0, "start"));
  CHECK(kind_of([&] { m.ingest_speech(1.0, "please"); }) == ErrorKind::UnknownKeyword);
  CHECK(kind_of([&] { m.ingest_speech(1.0, "help me"); }) == ErrorKind::UnknownKeyword);
}

TEST_CASE("only help, hurts and emergency are emergencies") {
  for (auto kw : {SpeechKeyword::Start, SpeechKeyword::Stop, SpeechKeyword::Help,
                  SpeechKeyword::Hurts, SpeechKeyword::Emergency}) {
    AttentionMonitor m;
    const auto ev = m.ingest_speech(SpeechEvent{0.0, kw});
    const bool emergency = kw == SpeechKeyword::Help || kw == SpeechKeyword::Hurts ||
                           kw == SpeechKeyword::Emergency;
    CHECK((ev && ev->kind == InterruptionKind::Emergency) == emergency);
    CHECK(parse_keyword(to_string(kw)) == kw);
  }
}

TEST_CASE("activity detector") {
  ActivityDetector still;
  for (int i = 0; i < 60; ++i) CHECK_FALSE(still.update(i / 30.0, {0, 0, 2}));

  ActivityDetector slow;
  bool any = false;
  for (int i = 0; i < 60; ++i) any |= slow.update(i / 30.0, {0.02 * i / 30.0, 0, 2});
  CHECK_FALSE(any);

  ActivityDetector fast;
  for (int i = 0; i < 60; ++i) fast.update(i / 30.0, {0.3 * i / 30.0, 0, 2});
  CHECK(fast.moving());

  CHECK(kind_of([] { ActivityDetector bad(0.05, 0.0); }) == ErrorKind::InvalidParams);
}
