#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "coach/error.hpp"
#include "coach/generator.hpp"
#include "coach/trace_io.hpp"
#include "support/gen.hpp"

using namespace coach;
using coach::testing::Gen;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::IoFailure;
}

// Awkward doubles: tiny, huge, negative zero and values with long expansions.
double awkward(Gen& g) {
  switch (g.integer(0, 5)) {
    case 0: return g.uniform(-1, 1) * 1e-300;
    case 1: return g.uniform(-1, 1) * 1e300;
    case 2: return -0.0;
    case 3: return 0.1 + 0.2;
    default: return g.uniform(-10, 10);
  }
}

Pixel pixel(Gen& g) { return {awkward(g), awkward(g)}; }

TraceRecord random_record(Gen& g, Timestamp t) {
  switch (g.integer(0, 4)) {
    case 0: {
      SkeletonFrame f(t);
      for (JointId id : kAllJoints) {
        if (g.coin()) f.set(id, {awkward(g), awkward(g), awkward(g)}, g.coin() ? 1.0 : g.uniform(0, 1));
      }
      return f;
    }
    case 1: {
      LandmarkRecord r;
      r.face.timestamp = t;
      for (auto& p : r.face.points) p = pixel(g);
      for (auto& p : r.left_eye.p) p = pixel(g);
      for (auto& p : r.right_eye.p) p = pixel(g);
      return r;
    }
    case 2:
      return SpeechEvent{t, static_cast<SpeechKeyword>(g.integer(0, 4))};
    case 3:
      return RepMarker{t, g.coin() ? ExerciseKind::ShoulderPress : ExerciseKind::SideLateralRaise,
                       g.integer(1, 20), g.coin(), g.coin()};
    default:
      return PlantedPose{t,
                         {awkward(g), awkward(g), awkward(g)},
                         {awkward(g), awkward(g), awkward(g)},
                         static_cast<AttentionDirection>(g.integer(0, 2))};
  }
}

LogEntry random_entry(Gen& g, Timestamp t) {
  switch (g.integer(0, 3)) {
    case 0: {
      BehaviorCommand c;
      c.timestamp = t;
      c.kind = static_cast<CommandKind>(g.integer(0, 5));
      c.provenance = static_cast<Phase>(g.integer(0, 7));
      if (c.kind == CommandKind::Say || c.kind == CommandKind::Display) c.text = "Good job, \"1\" of 5.\n";
      if (c.kind == CommandKind::Demonstrate) c.exercise = ExerciseKind::SideLateralRaise;
      if (c.kind == CommandKind::Mirror) c.angles = RobotJointAngles{awkward(g), awkward(g), awkward(g), awkward(g), t};
      return c;
    }
    case 1: {
      RepEvent ev;
      ev.timestamp = t;
      ev.verdict = g.coin() ? RepVerdict::Correct : RepVerdict::Incorrect;
      if (ev.verdict == RepVerdict::Incorrect) ev.failure = static_cast<RepFailure>(g.integer(0, 3));
      ev.path_length = awkward(g);
      ev.max_segment_angle = awkward(g);
      ev.excursion = awkward(g);
      ev.rep_index = g.integer(0, 9);
      return LoggedRep{ev, g.coin()};
    }
    case 2:
      return InterruptionEvent{t, static_cast<InterruptionKind>(g.integer(0, 2)),
                               static_cast<InterruptionSource>(g.integer(0, 1))};
    default:
      return StateTransition{t, static_cast<Phase>(g.integer(0, 7)),
                             static_cast<Phase>(g.integer(0, 7)), "rep_event"};
  }
}

std::string line_error(const std::string& text) {
  std::istringstream in(text);
  try {
    read_trace(in);
  } catch (const LineError& e) {
    return std::string(to_string(e.kind())) + "@" + std::to_string(e.line());
  }
  return "none";
}

}  // namespace

TEST_CASE("records round-trip exactly") {
  Gen g(71);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TraceRecord> records;
    double t = g.uniform(-5, 5);
    for (int i = 0; i < 40; ++i) {
      if (g.coin()) t += g.uniform(0, 0.1);
      records.push_back(random_record(g, t));
    }
    std::stringstream ss;
    write_trace(ss, records);
    const auto back = read_trace(ss);
    CHECK(back == records);
    for (std::size_t i = 0; i < records.size(); ++i) {
      CHECK(std::signbit(record_time(back[i])) == std::signbit(record_time(records[i])));
    }
  }
}

TEST_CASE("log entries round-trip exactly") {
  Gen g(72);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<LogEntry> entries;
    double t = 0;
    for (int i = 0; i < 40; ++i) entries.push_back(random_entry(g, t += g.uniform(0, 1)));
    std::stringstream ss;
    write_session_log(ss, entries);
    CHECK(read_session_log(ss) == entries);
  }
}

TEST_CASE("record lines use the t/type/payload envelope") {
  const std::string line = format_record(SpeechEvent{12.5, SpeechKeyword::Emergency});
  CHECK(line == R"({"t":12.5,"type":"speech","payload":{"keyword":"emergency"}})");
  CHECK(parse_record(line) == TraceRecord{SpeechEvent{12.5, SpeechKeyword::Emergency}});
  CHECK(format_record(RepMarker{1.0, ExerciseKind::ShoulderPress, 1, true, true}).find(
            R"("type":"annotation")") != std::string::npos);
  StateTransition st{3.0, Phase::Intro, Phase::ExerciseSetup, "intro_done"};
  CHECK(format_log_entry(st) ==
        R"({"t":3.0,"type":"state_transition","payload":{"from":"intro","to":"exercise_setup","cause":"intro_done"}})");
}

TEST_CASE("an unknown joint is a parse error naming the line") {
  const std::string good = format_record(SkeletonFrame(0.0));
  const std::string bad =
      R"({"t":0.1,"type":"skeleton","payload":{"joints":{"left_knee":[0,0,1]}}})";
  CHECK(line_error(good + "\n" + bad + "\n") == "ParseError@2");
  std::istringstream in(good + "\n\n" + bad + "\n");
  try {
    read_trace(in);
    FAIL("expected a LineError");
  } catch (const LineError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("left_knee") != std::string::npos);
  }
}

TEST_CASE("malformed lines") {
  CHECK(line_error("not json\n") == "ParseError@1");
  CHECK(line_error(R"({"t":0,"type":"video","payload":{}})") == "ParseError@1");
  CHECK(line_error(R"({"t":"x","type":"speech","payload":{"keyword":"stop"}})") == "ParseError@1");
  CHECK(line_error(R"({"t":0,"type":"speech","payload":{"keyword":"pardon"}})") == "ParseError@1");
  CHECK(line_error(R"({"t":0,"type":"skeleton","payload":{"joints":{"torso":[0,0]}}})") ==
        "ParseError@1");
  CHECK(line_error(R"({"t":0,"type":"skeleton","payload":{"joints":{"torso":[0,0,1]},"confidence":{"torso":2}}})") ==
        "ParseError@1");
  CHECK(line_error("\n\n") == "none");
}

TEST_CASE("out-of-order records are rejected, not sorted") {
  const std::string a = format_record(SpeechEvent{2.0, SpeechKeyword::Stop});
  const std::string b = format_record(SpeechEvent{1.0, SpeechKeyword::Start});
  CHECK(line_error(a + "\n" + b + "\n") == "UnsortedTrace@2");
  CHECK(line_error(a + "\n" + a + "\n") == "none");
}

TEST_CASE("file helpers report I/O failures") {
  const auto missing = std::filesystem::temp_directory_path() / "coach-no-such-dir" / "x.trace";
  CHECK(kind_of([&] { read_trace_file(missing); }) == ErrorKind::IoFailure);
  const std::vector<TraceRecord> none;
  CHECK(kind_of([&] { write_trace_file(missing, none); }) == ErrorKind::IoFailure);

  const auto path = std::filesystem::temp_directory_path() / "coach-trace-io-test.trace";
  GeneratorParams p;
  p.reps = 1;
  const auto records = generate_trace(p);
  write_trace_file(path, records);
  CHECK(read_trace_file(path) == records);
  std::filesystem::remove(path);
}

TEST_CASE("generator determinism") {
  GeneratorParams p;
  p.seed = 7;
  p.joint_noise = 0.01;
  p.pixel_noise = 1.0;
  p.attention = {{5.0, 10.0, AttentionDirection::FacingAway}};
  std::stringstream a, b;
  write_trace(a, generate_trace(p));
  write_trace(b, generate_trace(p));
  CHECK(a.str() == b.str());
  p.seed = 8;
  std::stringstream c;
  write_trace(c, generate_trace(p));
  CHECK(a.str() != c.str());
}

TEST_CASE("generated traces are sorted and annotated") {
  GeneratorParams p;
  p.exercises = {ExerciseKind::ShoulderPress, ExerciseKind::SideLateralRaise};
  p.reps = 5;
  p.seed = 7;
  p.malformed_reps = 2;
  p.speech = {{4.0, SpeechKeyword::Stop}};
  const auto records = generate_trace(p);
  for (std::size_t i = 1; i < records.size(); ++i) {
    CHECK(record_time(records[i - 1]) <= record_time(records[i]));
  }
  const TraceSummary s = summarize(records);
  REQUIRE(s.correct_reps.size() == 2);
  CHECK(s.correct_reps[0] == std::pair{ExerciseKind::ShoulderPress, 5});
  CHECK(s.correct_reps[1] == std::pair{ExerciseKind::SideLateralRaise, 5});
  CHECK(s.malformed_reps[0].second == 2);
  CHECK(s.speech_events == 1);
  CHECK(s.skeleton_frames == s.landmark_frames);
  CHECK(s.planted_poses == s.landmark_frames);
  // 1.5 s lead-in plus 7 reps of 4 s, per exercise.
  CHECK(s.duration == doctest::Approx(2 * (1.5 + 7 * 4.0)).epsilon(0.01));
}

TEST_CASE("noise leaves annotations unchanged") {
  GeneratorParams p;
  p.seed = 7;
  std::vector<RepMarker> clean, noisy;
  for (const auto& r : generate_trace(p))
    if (const auto* m = std::get_if<RepMarker>(&r)) clean.push_back(*m);
  p.joint_noise = 0.01;
  for (const auto& r : generate_trace(p))
    if (const auto* m = std::get_if<RepMarker>(&r)) noisy.push_back(*m);
  CHECK(clean == noisy);
  CHECK(clean.size() == 10);
}

TEST_CASE("generator parameters are validated") {
  const auto invalid = [](auto&& edit) {
    GeneratorParams p;
    edit(p);
    return kind_of([&] { generate_trace(p); }) == ErrorKind::InvalidParams;
  };
  CHECK(invalid([](GeneratorParams& p) { p.reps = 0; }));
  CHECK(invalid([](GeneratorParams& p) { p.joint_noise = -0.1; }));
  CHECK(invalid([](GeneratorParams& p) { p.frame_rate = 0; }));
  CHECK(invalid([](GeneratorParams& p) { p.pixel_noise = -1; }));
  CHECK(invalid([](GeneratorParams& p) { p.attention = {{5.0, 4.0, AttentionDirection::FacingAway}}; }));
}

TEST_CASE("idle traces") {
  GeneratorParams p;
  p.exercises.clear();
  p.idle_seconds = 10.0;
  const auto s = summarize(generate_trace(p));
  CHECK(s.correct_reps.empty());
  CHECK(s.skeleton_frames == doctest::Approx(300).epsilon(0.01));
}
