// coach: generate synthetic traces, replay them through the coaching pipeline
// and evaluate the result against the planted ground truth.
//
// Exit codes: 0 success, 1 trace or I/O error, 2 configuration or parameter error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "coach/config.hpp"
#include "coach/error.hpp"
#include "coach/generator.hpp"
#include "coach/pipeline.hpp"
#include "coach/trace_io.hpp"

namespace {

using namespace coach;

constexpr int kOk = 0;
constexpr int kTraceError = 1;
constexpr int kConfigError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<ExerciseKind> parse_exercise_list(const std::string& list) {
  std::vector<ExerciseKind> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b == std::string::npos) continue;
    item = item.substr(b, e - b + 1);
    auto kind = parse_exercise(item);
    if (!kind) throw UsageError("unknown exercise '" + item + "'");
    out.push_back(*kind);
  }
  if (out.empty()) throw UsageError("--exercise needs at least one exercise");
  return out;
}

// "start:end:label", e.g. "10:17:facing_away".
AttentionSegment parse_segment(const std::string& s) {
  const auto a = s.find(':');
  const auto b = a == std::string::npos ? a : s.find(':', a + 1);
  if (b == std::string::npos) throw UsageError("attention segment '" + s + "' is not start:end:label");
  AttentionSegment seg;
  try {
    seg.start = std::stod(s.substr(0, a));
    seg.end = std::stod(s.substr(a + 1, b - a - 1));
  } catch (const std::exception&) {
    throw UsageError("attention segment '" + s + "' has a bad time");
  }
  auto label = parse_attention_direction(s.substr(b + 1));
  if (!label) throw UsageError("unknown attention label in '" + s + "'");
  seg.label = *label;
  return seg;
}

// "t:keyword", e.g. "12.5:emergency".
SpeechEvent parse_speech(const std::string& s) {
  const auto a = s.find(':');
  if (a == std::string::npos) throw UsageError("speech event '" + s + "' is not t:keyword");
  SpeechEvent ev;
  try {
    ev.timestamp = std::stod(s.substr(0, a));
  } catch (const std::exception&) {
    throw UsageError("speech event '" + s + "' has a bad time");
  }
  auto kw = parse_keyword(s.substr(a + 1));
  if (!kw) throw UsageError("unknown keyword in '" + s + "'");
  ev.keyword = *kw;
  return ev;
}

struct SessionFlags {
  std::string trace;
  std::string config;
  std::string policy;
  std::string exercises;
  int reps = 0;
  std::string log;
  std::string report;
};

CoachConfig resolve_config(const SessionFlags& f) {
  CoachConfig cfg;
  std::string path = f.config;
  if (path.empty()) {
    if (const char* env = std::getenv("COACH_CONFIG"); env && *env) path = env;
  }
  if (!path.empty()) {
    try {
      cfg = load_config(path);
    } catch (const Error& e) {
      // An unreadable config file is a configuration problem, not a trace problem.
      throw Error(ErrorKind::ConfigError, e.what());
    }
  }
  if (!f.policy.empty()) {
    auto p = parse_policy(f.policy);
    if (!p) throw UsageError("unknown policy '" + f.policy + "'");
    cfg.session.policy = *p;
  }
  if (!f.exercises.empty()) cfg.session.exercises = parse_exercise_list(f.exercises);
  if (f.reps != 0) cfg.session.repetitions = f.reps;
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
  return cfg;
}

void print_summary(const TraceSummary& s) {
  std::cout << "skeleton frames: " << s.skeleton_frames << "\n"
            << "landmark frames: " << s.landmark_frames << "\n"
            << "speech events: " << s.speech_events << "\n"
            << "duration: " << s.duration << " s\n";
  for (const auto& [kind, n] : s.correct_reps) {
    std::cout << "planted " << to_string(kind) << ": " << n << " correct\n";
  }
  for (const auto& [kind, n] : s.malformed_reps) {
    std::cout << "planted " << to_string(kind) << ": " << n << " malformed\n";
  }
}

void print_report(const RunReport& report) {
  for (const auto& m : report) {
    if (m.name.rfind("attention.confusion", 0) == 0 || m.name.rfind("retarget.mean", 0) == 0) {
      continue;
    }
    std::cout << "  " << m.name << " = " << m.value << " " << m.unit << "\n";
  }
}

int run_session(const SessionFlags& f, bool evaluate) {
  const CoachConfig cfg = resolve_config(f);
  const auto records = read_trace_file(f.trace);
  const RunResult run = run_trace(records, cfg);
  RunReport report = build_report(records, run, evaluate);
  if (!f.log.empty()) {
    write_session_log_file(f.log, run.log);
    report.push_back({"session.log_path", f.log, "path"});
  }
  if (!f.report.empty()) {
    std::ofstream out(f.report, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot open '" + f.report + "' for writing");
    write_report_csv(out, report);
    if (!out.flush()) throw Error(ErrorKind::IoFailure, "write to '" + f.report + "' failed");
  }
  std::cout << (evaluate ? "evaluation" : "simulation") << " of " << f.trace << " ("
            << to_string(cfg.session.policy) << ")\n";
  print_report(report);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exercise coach: trace generation, replay and evaluation"};
  app.require_subcommand(1);

  GeneratorParams gen;
  std::string gen_out, gen_exercises = "shoulder_press";
  std::vector<std::string> gen_attention, gen_speech;
  bool no_landmarks = false;
  double amplitude = 0.0;
  auto* generate = app.add_subcommand("generate", "Write a synthetic trace with ground truth");
  generate->add_option("--out", gen_out, "Trace file to write")->required();
  generate->add_option("--exercise", gen_exercises, "Comma-separated exercises, or 'none'");
  generate->add_option("--reps", gen.reps, "Correct reps per exercise");
  generate->add_option("--malformed", gen.malformed_reps, "Malformed reps per exercise");
  generate->add_option("--seed", gen.seed, "Random seed");
  generate->add_option("--noise-joints", gen.joint_noise, "Joint noise sigma, meters");
  generate->add_option("--noise-pixels", gen.pixel_noise, "Landmark noise sigma, pixels");
  generate->add_option("--frame-rate", gen.frame_rate, "Frames per second");
  generate->add_option("--amplitude", amplitude, "Peak excursion of correct reps, meters");
  generate->add_option("--idle", gen.idle_seconds, "Seconds of rest after the exercises");
  generate->add_option("--attention", gen_attention, "Attention segment start:end:label");
  generate->add_option("--speech", gen_speech, "Speech event t:keyword");
  generate->add_flag("--no-landmarks", no_landmarks, "Omit facial landmark records");

  SessionFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Replay a trace through the full pipeline");
  simulate->add_option("--trace", sim.trace, "Trace file")->required();
  simulate->add_option("--out,--log", sim.log, "Session log to write")->required();
  simulate->add_option("--report", sim.report, "Metrics CSV to write");
  simulate->add_option("--policy", sim.policy, "low-stimulus, turn-based or mimicking");
  simulate->add_option("--config", sim.config, "Configuration file (default: $COACH_CONFIG)");
  simulate->add_option("--exercise", sim.exercises, "Override the session's exercise list");
  simulate->add_option("--reps", sim.reps, "Override repetitions per exercise");

  SessionFlags eval;
  auto* evaluate = app.add_subcommand("evaluate", "Score a replay against trace annotations");
  evaluate->add_option("--trace", eval.trace, "Annotated trace file")->required();
  evaluate->add_option("--report,--out", eval.report, "Metrics CSV to write")->required();
  evaluate->add_option("--log", eval.log, "Session log to write");
  evaluate->add_option("--policy", eval.policy, "low-stimulus, turn-based or mimicking");
  evaluate->add_option("--config", eval.config, "Configuration file (default: $COACH_CONFIG)");
  evaluate->add_option("--exercise", eval.exercises, "Override the session's exercise list");
  evaluate->add_option("--reps", eval.reps, "Override repetitions per exercise");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (generate->parsed()) {
      gen.exercises = gen_exercises == "none" ? std::vector<ExerciseKind>{}
                                              : parse_exercise_list(gen_exercises);
      if (amplitude != 0.0) gen.amplitude = amplitude;
      gen.landmarks = !no_landmarks;
      for (const auto& s : gen_attention) gen.attention.push_back(parse_segment(s));
      for (const auto& s : gen_speech) gen.speech.push_back(parse_speech(s));
      const auto records = generate_trace(gen);
      write_trace_file(gen_out, records);
      std::cout << "wrote " << gen_out << "\n";
      print_summary(summarize(records));
      return kOk;
    }
    if (simulate->parsed()) return run_session(sim, false);
    return run_session(eval, true);
  } catch (const UsageError& e) {
    std::cerr << "coach: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "coach: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::ConfigError:
      case ErrorKind::InvalidParams:
        return kConfigError;
      default:
        return kTraceError;
    }
  }
}
