#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "coach/error.hpp"
#include "coach/generator.hpp"
#include "coach/pipeline.hpp"

using namespace coach;

namespace {

GeneratorParams two_exercises(std::uint64_t seed) {
  GeneratorParams p;
  p.exercises = {ExerciseKind::ShoulderPress, ExerciseKind::SideLateralRaise};
  p.seed = seed;
  return p;
}

CoachConfig with_policy(FeedbackPolicy policy) {
  CoachConfig c;
  c.session.policy = policy;
  return c;
}

double metric(const RunReport& r, std::string_view name) {
  const auto v = find_metric(r, name);
  REQUIRE_MESSAGE(v, name);
  return std::stod(*v);
}

int count_commands(const RunResult& run, CommandKind kind) {
  int n = 0;
  for (const auto& e : run.log) {
    if (const auto* c = std::get_if<BehaviorCommand>(&e)) n += c->kind == kind;
  }
  return n;
}

std::string log_text(const RunResult& run) {
  std::ostringstream out;
  write_session_log(out, run.log);
  return out.str();
}

}  // namespace

TEST_CASE("percentile") {
  CHECK(percentile({}, 50) == 0.0);
  CHECK(percentile({3, 1, 2}, 50) == 2.0);
  CHECK(percentile({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 99) == 10.0);
  CHECK(percentile({1, 2, 3, 4}, 0) == 1.0);
  CHECK(percentile({1, 2, 3, 4}, 100) == 4.0);
}

TEST_CASE("a clean two-exercise session completes") {
  const auto trace = generate_trace(two_exercises(7));
  const RunResult run = run_trace(trace, CoachConfig{});
  CHECK(run.final_phase == Phase::SessionEnd);
  CHECK(run.session_reps == 10);
  CHECK(run.warnings.empty());
  const RunReport report = build_report(trace, run, true);
  CHECK(metric(report, "reps.shoulder_press.detected_correct") == 5);
  CHECK(metric(report, "reps.side_lateral_raise.detected_correct") == 5);
  CHECK(metric(report, "reps.shoulder_press.recall") == 1.0);
  CHECK(metric(report, "reps.side_lateral_raise.false_positives") == 0);
  CHECK(metric(report, "reps.session_total") == 10);
  CHECK(metric(report, "head_pose.failures") == 0);
  CHECK(metric(report, "head_pose.max_error") < 0.1);
  CHECK(metric(report, "attention.accuracy") == 1.0);
  CHECK(metric(report, "frames.skeleton") == run.skeleton_frames);
  CHECK(*find_metric(report, "session.final_phase") == "session_end");
}

TEST_CASE("turn-based feedback follows every rep, with no mirroring") {
  const auto trace = generate_trace(two_exercises(3));
  const RunResult run = run_trace(trace, with_policy(FeedbackPolicy::TurnBased));
  const RunReport report = build_report(trace, run, true);
  CHECK(metric(report, "commands.feedback") == 10);
  CHECK(metric(report, "commands.mirror") == 0);
}

TEST_CASE("low stimulus gives no feedback") {
  const auto trace = generate_trace(two_exercises(3));
  const RunResult run = run_trace(trace, with_policy(FeedbackPolicy::LowStimulus));
  const RunReport report = build_report(trace, run, true);
  CHECK(metric(report, "commands.feedback") == 0);
  CHECK(metric(report, "commands.mirror") == 0);
  CHECK(run.final_phase == Phase::SessionEnd);
}

TEST_CASE("mimicking mirrors every passing retarget while active") {
  const auto trace = generate_trace(two_exercises(3));
  const RunResult run = run_trace(trace, with_policy(FeedbackPolicy::Mimicking));
  CHECK(count_commands(run, CommandKind::Mirror) == static_cast<int>(run.retarget_passed_active));
  CHECK(run.retarget_passed_active > 0);
}

TEST_CASE("emergency speech stops the session") {
  GeneratorParams p = two_exercises(5);
  p.speech = {{9.3, SpeechKeyword::Help}};
  const RunResult run = run_trace(generate_trace(p), CoachConfig{});
  CHECK(run.final_phase == Phase::EmergencyStop);
  const StateTransition* last = nullptr;
  for (const auto& e : run.log) {
    if (const auto* t = std::get_if<StateTransition>(&e)) last = t;
  }
  REQUIRE(last);
  CHECK(last->to == Phase::EmergencyStop);
  CHECK(last->timestamp == 9.3);
  CHECK(entry_time(run.log.back()) <= 9.3);
}

TEST_CASE("looking away during a rest triggers one wave") {
  GeneratorParams p;
  p.reps = 2;
  p.idle_seconds = 12;
  // Rest after the last rep runs from 9.5 s onward.
  p.attention = {{10.0, 18.0, AttentionDirection::FacingAway}};
  const RunResult run = run_trace(generate_trace(p), with_policy(FeedbackPolicy::TurnBased));
  CHECK(count_commands(run, CommandKind::Wave) == 1);
  bool lost = false;
  for (const auto& e : run.log) {
    if (const auto* i = std::get_if<InterruptionEvent>(&e)) {
      lost |= i->kind == InterruptionKind::AttentionLost;
      CHECK(i->timestamp == doctest::Approx(15.0).epsilon(0.01));
    }
  }
  CHECK(lost);
}

TEST_CASE("stop and start pause and resume") {
  GeneratorParams p;
  p.reps = 3;
  p.speech = {{3.0, SpeechKeyword::Stop}, {6.0, SpeechKeyword::Start}};
  const RunResult run = run_trace(generate_trace(p), CoachConfig{});
  std::vector<Phase> to;
  for (const auto& e : run.log) {
    if (const auto* t = std::get_if<StateTransition>(&e)) to.push_back(t->to);
  }
  CHECK(std::find(to.begin(), to.end(), Phase::Paused) != to.end());
  const auto paused = std::find(to.begin(), to.end(), Phase::Paused);
  REQUIRE(paused + 1 != to.end());
  CHECK(*(paused + 1) == Phase::ExerciseActive);
}

TEST_CASE("replays are deterministic") {
  const auto trace = generate_trace(two_exercises(11));
  CHECK(log_text(run_trace(trace, CoachConfig{})) == log_text(run_trace(trace, CoachConfig{})));
}

TEST_CASE("traces without landmarks use activity alone") {
  GeneratorParams p = two_exercises(2);
  p.landmarks = false;
  const auto trace = generate_trace(p);
  const RunResult run = run_trace(trace, CoachConfig{});
  CHECK(run.head_poses.empty());
  CHECK(run.session_reps == 10);
  CHECK(count_commands(run, CommandKind::Wave) == 0);
}

TEST_CASE("evaluation needs annotations") {
  std::vector<TraceRecord> trace;
  for (const auto& r : generate_trace(two_exercises(1))) {
    if (!is_annotation(r)) trace.push_back(r);
  }
  const RunResult run = run_trace(trace, CoachConfig{});
  CHECK_NOTHROW(build_report(trace, run, false));
  try {
    build_report(trace, run, true);
    FAIL("expected MissingAnnotations");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingAnnotations);
  }
}

TEST_CASE("report CSV") {
  const auto trace = generate_trace(two_exercises(1));
  const RunReport report = build_report(trace, run_trace(trace, CoachConfig{}), true);
  std::ostringstream out;
  write_report_csv(out, report);
  const std::string csv = out.str();
  CHECK(csv.rfind("metric,value,unit\n", 0) == 0);
  CHECK(csv.find("latency.p99,") != std::string::npos);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == report.size() + 1);
}

TEST_CASE("groups must move forward in time") {
  CoachPipeline pipe(CoachConfig{});
  const std::vector<TraceRecord> a{SpeechEvent{2.0, SpeechKeyword::Start}};
  const std::vector<TraceRecord> b{SpeechEvent{1.0, SpeechKeyword::Start}};
  pipe.process_group(a);
  CHECK_THROWS_AS(pipe.process_group(b), Error);
}

TEST_CASE("an invalid configuration is refused") {
  CoachConfig c;
  c.session.repetitions = 0;
  try {
    CoachPipeline pipe(c);
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
  }
}
