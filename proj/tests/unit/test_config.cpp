#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include "coach/config.hpp"
#include "coach/error.hpp"

using namespace coach;

namespace {

std::string dump(const CoachConfig& cfg) {
  std::ostringstream out;
  write_config(out, cfg);
  return out.str();
}

CoachConfig parse(const std::string& text, CoachConfig base = {}) {
  std::istringstream in(text);
  return parse_config(in, std::move(base));
}

std::pair<ErrorKind, std::size_t> failure(const std::string& text) {
  try {
    parse(text);
  } catch (const LineError& e) {
    return {e.kind(), e.line()};
  } catch (const Error& e) {
    return {e.kind(), 0};
  }
  return {ErrorKind::IoFailure, 0};
}

}  // namespace

TEST_CASE("the shipped configuration equals the built-in defaults") {
  const CoachConfig shipped = load_config(COACH_SOURCE_DIR "/config/coach.conf");
  CHECK(dump(shipped) == dump(CoachConfig{}));
}

TEST_CASE("every key round-trips through text") {
  const CoachConfig defaults;
  const CoachConfig back = parse(dump(defaults));
  for (const auto& key : config_keys()) {
    CAPTURE(key);
    CHECK(get_config_value(back, key) == get_config_value(defaults, key));
  }
}

TEST_CASE("keys are unique and prefixed by module") {
  const auto keys = config_keys();
  CHECK(std::set<std::string>(keys.begin(), keys.end()).size() == keys.size());
  const std::set<std::string> prefixes{"shoulder_press", "side_lateral_raise", "engine", "camera",
                                       "head_pose", "attention", "retargeting", "session", "say"};
  for (const auto& k : keys) CHECK(prefixes.count(k.substr(0, k.find('.'))) == 1);
}

TEST_CASE("values are applied") {
  const CoachConfig c = parse(
      "# a comment\n"
      "\n"
      "shoulder_press.min_path_length = 0.7\n"
      "shoulder_press.roi_offset = 0.1, 0.2, -0.3\n"
      "attention.max_yaw_deg = 45\n"
      "attention.timeout = 8\n"
      "session.policy = mimicking\n"
      "session.exercises = side_lateral_raise\n"
      "retargeting.tiny_motion = 0.05\n"
      "say.praise = Nice, {count}!\n");
  CHECK(c.shoulder_press.min_path_length == 0.7);
  CHECK(c.shoulder_press.roi.offset == Vec3{0.1, 0.2, -0.3});
  CHECK(c.attention.max_yaw == doctest::Approx(M_PI / 4));
  CHECK(c.monitor.timeout == 8.0);
  CHECK(c.session.policy == FeedbackPolicy::Mimicking);
  CHECK(c.session.exercises == std::vector{ExerciseKind::SideLateralRaise});
  CHECK(c.motion.tiny == 0.05);
  CHECK(c.session.text.praise == "Nice, {count}!");
  CHECK(c.spec(ExerciseKind::ShoulderPress).min_path_length == 0.7);
}

TEST_CASE("unset keys keep the base values") {
  CoachConfig base;
  base.session.repetitions = 3;
  const CoachConfig c = parse("session.policy = low-stimulus\n", base);
  CHECK(c.session.repetitions == 3);
  CHECK(c.session.policy == FeedbackPolicy::LowStimulus);
}

TEST_CASE("bad files are rejected with the line number") {
  CHECK(failure("session.repetitions = 5\nsession.wat = 1\n") ==
        std::pair{ErrorKind::ConfigError, std::size_t{2}});
  CHECK(failure("session.repetitions = 5\nsession.repetitions = 6\n").second == 2);
  CHECK(failure("no equals sign\n").second == 1);
  CHECK(failure("engine.sample_spacing = fast\n").second == 1);
  CHECK(failure("session.policy = continuous\n").second == 1);
  CHECK(failure("shoulder_press.roi_offset = 1, 2\n").second == 1);
  CHECK(failure("shoulder_press.tracked_joint = left_knee\n").second == 1);
  CHECK(failure("session.repetitions = 0\n").first == ErrorKind::ConfigError);
  CHECK(failure("retargeting.e1_min = 3\n").first == ErrorKind::ConfigError);
}

TEST_CASE("validation names the group") {
  CoachConfig c;
  c.engine.sample_spacing = -1;
  try {
    c.validate();
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
    CHECK(std::string(e.what()).find("engine") != std::string::npos);
  }
}

TEST_CASE("unreadable files") {
  try {
    load_config("/nonexistent/coach.conf");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IoFailure);
  }
}
