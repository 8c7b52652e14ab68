#include "coach/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "coach/error.hpp"

namespace coach {

namespace {

SessionConfig session_from(const CoachConfig& c) {
  c.validate();
  return c.session;
}

bool recoverable(ErrorKind k) {
  return k == ErrorKind::DegenerateConfiguration || k == ErrorKind::DivergedPose ||
         k == ErrorKind::BehindCamera || k == ErrorKind::DegenerateEye ||
         k == ErrorKind::DegenerateArm || k == ErrorKind::DegenerateVector ||
         k == ErrorKind::MissingJoint;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

CoachPipeline::CoachPipeline(CoachConfig config, bool visual_attention)
    : config_(std::move(config)),
      visual_attention_(visual_attention),
      controller_(session_from(config_)),
      monitor_(config_.monitor),
      activity_(config_.activity_min_speed, config_.activity_window) {
  for (ExerciseKind kind : {ExerciseKind::ShoulderPress, ExerciseKind::SideLateralRaise}) {
    ExerciseSpec spec = config_.spec(kind);
    spec.target_repetitions = config_.session.repetitions;
    engines_.emplace_back(spec, config_.engine);
  }
}

void CoachPipeline::step(const ControllerInput& input) {
  controller_.step(input);
  const auto& journal = controller_.journal();
  for (; journal_seen_ < journal.size(); ++journal_seen_) {
    std::visit([this](const auto& e) { result_.log.emplace_back(e); }, journal[journal_seen_]);
  }
}

void CoachPipeline::handle_speech(const SpeechEvent& ev) {
  if (auto irq = monitor_.ingest_speech(ev)) {
    result_.log.emplace_back(*irq);
    step(*irq);
  }
  if (!stopped()) step(ev);
}

std::optional<AttentionDirection> CoachPipeline::handle_landmarks(const LandmarkRecord& lm) {
  HeadPoseSample sample;
  sample.timestamp = lm.timestamp();
  try {
    sample.estimate = estimate_head_pose(lm.face, face_, config_.camera, config_.lm);
    sample.direction =
        classify_attention_direction(*sample.estimate, eye_aspect_ratio(lm.left_eye),
                                     eye_aspect_ratio(lm.right_eye), config_.attention);
  } catch (const Error& e) {
    if (!recoverable(e.kind())) throw;
    result_.warnings.push_back("landmarks at " + std::to_string(lm.timestamp()) +
                               " s: " + e.what());
  }
  result_.head_poses.push_back(sample);
  return sample.direction;
}

void CoachPipeline::handle_skeleton(const SkeletonFrame& frame,
                                    std::optional<AttentionDirection> direction) {
  const Timestamp t = frame.timestamp();
  ++result_.skeleton_frames;
  step(Tick{t});

  const auto current = controller_.current_exercise();
  const JointId tracked = config_.spec(current.value_or(config_.session.exercises.front())).tracked_joint;
  bool moving = false;
  if (const auto p = frame.position(tracked)) moving = activity_.update(t, *p);

  const AttentionLabel before = monitor_.state().label;
  std::optional<InterruptionEvent> irq;
  if (visual_attention_) {
    irq = monitor_.ingest_frame(t, direction, moving);
  } else {
    irq = monitor_.ingest_frame(t, AttentionDirection::FacingRobotEyesOpen, moving);
  }
  if (irq) {
    result_.log.emplace_back(*irq);
    step(*irq);
  }
  if (before == AttentionLabel::Interrupted &&
      monitor_.state().label == AttentionLabel::Attentive) {
    step(AttentionRestored{t});
  }

  for (auto& engine : engines_) {
    std::optional<RepEvent> ev;
    try {
      ev = engine.update(frame);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::MissingJoint) throw;
      continue;
    }
    if (!ev) continue;
    result_.engine_events.push_back(*ev);
    if (ev->exercise != controller_.current_exercise()) continue;
    const bool consumed = controller_.phase() == Phase::ExerciseActive;
    result_.log.emplace_back(LoggedRep{*ev, consumed});
    step(*ev);
  }

  try {
    const ArmObservation obs = ArmObservation::from_frame(frame, ArmSide::Left);
    if (auto angles = retarget(obs, config_.robot, last_angles_, config_.motion)) {
      angles->timestamp = t;
      last_angles_ = angles;
      result_.retargeted.push_back(*angles);
      if (controller_.phase() == Phase::ExerciseActive) ++result_.retarget_passed_active;
      step(*angles);
    }
  } catch (const Error& e) {
    if (!recoverable(e.kind())) throw;
    ++result_.retarget_failures;
  }
}

void CoachPipeline::process_group(std::span<const TraceRecord> group) {
  if (group.empty() || stopped()) return;
  const Timestamp t = record_time(group.front());
  for (const auto& r : group) {
    if (record_time(r) != t) throw Error(ErrorKind::InvalidParams, "group mixes timestamps");
  }
  if (last_group_t_ && !(t > *last_group_t_)) {
    throw Error(ErrorKind::OutOfOrderInput, "group at " + std::to_string(t) + " s");
  }
  last_group_t_ = t;

  const auto start = std::chrono::steady_clock::now();
  bool timed = false;
  for (const auto& r : group) {
    if (stopped()) break;
    if (const auto* s = std::get_if<SpeechEvent>(&r)) handle_speech(*s);
  }
  std::optional<AttentionDirection> direction;
  for (const auto& r : group) {
    if (stopped()) break;
    if (const auto* lm = std::get_if<LandmarkRecord>(&r)) {
      direction = handle_landmarks(*lm);
      timed = true;
    }
  }
  for (const auto& r : group) {
    if (stopped()) break;
    if (const auto* f = std::get_if<SkeletonFrame>(&r)) {
      handle_skeleton(*f, direction);
      timed = true;
    }
  }
  if (timed) {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    result_.latencies_ms.push_back(std::chrono::duration<double, std::milli>(elapsed).count());
  }
}

RunResult CoachPipeline::finish() {
  result_.session_reps = controller_.total_reps();
  result_.final_phase = controller_.phase();
  const auto& w = controller_.warnings();
  result_.warnings.insert(result_.warnings.end(), w.begin(), w.end());
  return std::move(result_);
}

RunResult run_trace(std::span<const TraceRecord> records, const CoachConfig& config) {
  const bool visual = std::any_of(records.begin(), records.end(), [](const TraceRecord& r) {
    return std::holds_alternative<LandmarkRecord>(r);
  });
  CoachPipeline pipeline(config, visual);
  std::vector<TraceRecord> group;
  for (std::size_t i = 0; i < records.size() && !pipeline.stopped();) {
    const Timestamp t = record_time(records[i]);
    if (i > 0 && t < record_time(records[i - 1])) {
      throw Error(ErrorKind::UnsortedTrace, "record " + std::to_string(i + 1) + " out of order");
    }
    group.clear();
    for (; i < records.size() && record_time(records[i]) == t; ++i) {
      if (!is_annotation(records[i])) group.push_back(records[i]);
    }
    pipeline.process_group(group);
  }
  return pipeline.finish();
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double rank = std::ceil(std::clamp(q, 0.0, 100.0) / 100.0 * values.size());
  const auto idx = static_cast<std::size_t>(std::max(1.0, rank)) - 1;
  return values[std::min(idx, values.size() - 1)];
}

RunReport build_report(std::span<const TraceRecord> records, const RunResult& run,
                       bool require_annotations) {
  RunReport report;
  const auto add = [&](std::string name, std::string value, std::string unit) {
    report.push_back({std::move(name), std::move(value), std::move(unit)});
  };
  const auto add_n = [&](std::string name, double value, std::string unit) {
    add(std::move(name), num(value), std::move(unit));
  };

  std::size_t landmark_frames = 0;
  bool annotated = false;
  struct Planted {
    Timestamp start = 0.0, end = 0.0;
    bool correct = true;
    bool has_end = false;
  };
  std::map<std::tuple<ExerciseKind, int, bool>, Planted> planted;
  std::map<Timestamp, PlantedPose> poses;
  for (const auto& r : records) {
    if (std::holds_alternative<LandmarkRecord>(r)) ++landmark_frames;
    if (const auto* m = std::get_if<RepMarker>(&r)) {
      annotated = true;
      auto& p = planted[{m->exercise, m->index, m->correct}];
      p.correct = m->correct;
      if (m->start) {
        p.start = m->timestamp;
      } else {
        p.end = m->timestamp;
        p.has_end = true;
      }
    } else if (const auto* pp = std::get_if<PlantedPose>(&r)) {
      annotated = true;
      poses[pp->timestamp] = *pp;
    }
  }
  if (require_annotations && !annotated) {
    throw Error(ErrorKind::MissingAnnotations, "trace carries no annotation records");
  }

  add_n("frames.skeleton", static_cast<double>(run.skeleton_frames), "count");
  add_n("frames.landmarks", static_cast<double>(landmark_frames), "count");

  for (ExerciseKind kind : {ExerciseKind::ShoulderPress, ExerciseKind::SideLateralRaise}) {
    const std::string prefix = "reps." + std::string(to_string(kind)) + ".";
    std::vector<Timestamp> correct_hits, incorrect_hits;
    for (const auto& ev : run.engine_events) {
      if (ev.exercise != kind) continue;
      (ev.correct() ? correct_hits : incorrect_hits).push_back(ev.timestamp);
    }
    add_n(prefix + "detected_correct", static_cast<double>(correct_hits.size()), "count");
    add_n(prefix + "detected_incorrect", static_cast<double>(incorrect_hits.size()), "count");
    if (!annotated) continue;

    // Greedy in time order: each planted rep claims the first unclaimed
    // detection inside [start, end + 0.5 s].
    const auto match = [&](bool want_correct, const std::vector<Timestamp>& hits) {
      std::vector<bool> used(hits.size(), false);
      int planted_n = 0, matched = 0;
      std::vector<Planted> list;
      for (const auto& [key, p] : planted) {
        if (std::get<0>(key) == kind && p.correct == want_correct && p.has_end) list.push_back(p);
      }
      std::sort(list.begin(), list.end(),
                [](const Planted& a, const Planted& b) { return a.start < b.start; });
      for (const auto& p : list) {
        ++planted_n;
        for (std::size_t i = 0; i < hits.size(); ++i) {
          if (!used[i] && hits[i] >= p.start && hits[i] <= p.end + 0.5) {
            used[i] = true;
            ++matched;
            break;
          }
        }
      }
      return std::pair{planted_n, matched};
    };
    const auto [planted_c, matched_c] = match(true, correct_hits);
    const auto [planted_m, matched_m] = match(false, incorrect_hits);
    add_n(prefix + "planted_correct", planted_c, "count");
    add_n(prefix + "planted_malformed", planted_m, "count");
    add_n(prefix + "recall", planted_c ? static_cast<double>(matched_c) / planted_c : 1.0, "ratio");
    add_n(prefix + "precision",
          correct_hits.empty() ? 1.0 : static_cast<double>(matched_c) / correct_hits.size(),
          "ratio");
    add_n(prefix + "false_positives", static_cast<double>(correct_hits.size()) - matched_c,
          "count");
    add_n(prefix + "spurious_attempts", static_cast<double>(incorrect_hits.size()) - matched_m,
          "count");
  }
  add_n("reps.session_total", run.session_reps, "count");

  std::size_t failures = 0;
  double err_sum = 0.0, err_max = 0.0;
  std::size_t err_n = 0;
  std::map<std::pair<AttentionDirection, AttentionDirection>, int> confusion;
  std::size_t attention_n = 0, attention_ok = 0;
  for (const auto& s : run.head_poses) {
    if (!s.estimate) ++failures;
    auto it = poses.find(s.timestamp);
    if (it == poses.end()) continue;
    const PlantedPose& truth = it->second;
    if (s.estimate) {
      const Eigen::Matrix3d r =
          rotation_from_ypr(truth.angles.yaw, truth.angles.pitch, truth.angles.roll);
      const double err = rotation_distance(s.estimate->pose.rotation, r) * 180.0 / M_PI;
      err_sum += err;
      err_max = std::max(err_max, err);
      ++err_n;
    }
    const AttentionDirection predicted = s.direction.value_or(AttentionDirection::FacingAway);
    ++confusion[{truth.attention, predicted}];
    ++attention_n;
    if (predicted == truth.attention) ++attention_ok;
  }
  add_n("head_pose.samples", static_cast<double>(run.head_poses.size()), "count");
  add_n("head_pose.failures", static_cast<double>(failures), "count");
  if (annotated) {
    add_n("head_pose.mean_error", err_n ? err_sum / err_n : 0.0, "deg");
    add_n("head_pose.max_error", err_max, "deg");
    add_n("attention.accuracy", attention_n ? static_cast<double>(attention_ok) / attention_n : 1.0,
          "ratio");
    for (auto truth : {AttentionDirection::FacingRobotEyesOpen,
                       AttentionDirection::FacingRobotEyesClosed, AttentionDirection::FacingAway}) {
      for (auto pred : {AttentionDirection::FacingRobotEyesOpen,
                        AttentionDirection::FacingRobotEyesClosed,
                        AttentionDirection::FacingAway}) {
        add_n("attention.confusion." + std::string(to_string(truth)) + "." +
                  std::string(to_string(pred)),
              confusion[{truth, pred}], "count");
      }
    }
  }

  add_n("latency.p50", percentile(run.latencies_ms, 50.0), "ms");
  add_n("latency.p99", percentile(run.latencies_ms, 99.0), "ms");
  add_n("latency.max", percentile(run.latencies_ms, 100.0), "ms");

  std::map<CommandKind, int> kinds;
  int feedback = 0;
  for (const auto& e : run.log) {
    if (const auto* c = std::get_if<BehaviorCommand>(&e)) {
      ++kinds[c->kind];
      if (c->provenance == Phase::Feedback) ++feedback;
    }
  }
  for (auto k : {CommandKind::Say, CommandKind::Display, CommandKind::Demonstrate,
                 CommandKind::Mirror, CommandKind::Wave, CommandKind::StopMotion}) {
    add_n("commands." + std::string(to_string(k)), kinds[k], "count");
  }
  add_n("commands.feedback", feedback, "count");

  add_n("retarget.passed", static_cast<double>(run.retargeted.size()), "count");
  add_n("retarget.passed_active", static_cast<double>(run.retarget_passed_active), "count");
  add_n("retarget.failures", static_cast<double>(run.retarget_failures), "count");
  if (!run.retargeted.empty()) {
    double s0 = 0, s1 = 0, e0 = 0, e1 = 0;
    for (const auto& a : run.retargeted) {
      s0 += a.s0;
      s1 += a.s1;
      e0 += a.e0;
      e1 += a.e1;
    }
    const double n = static_cast<double>(run.retargeted.size());
    add_n("retarget.mean_s0", s0 / n, "rad");
    add_n("retarget.mean_s1", s1 / n, "rad");
    add_n("retarget.mean_e0", e0 / n, "rad");
    add_n("retarget.mean_e1", e1 / n, "rad");
  }
  add("session.final_phase", std::string(to_string(run.final_phase)), "phase");
  add_n("session.warnings", static_cast<double>(run.warnings.size()), "count");
  return report;
}

void write_report_csv(std::ostream& out, const RunReport& report) {
  out << "metric,value,unit\n";
  for (const auto& m : report) out << m.name << ',' << m.value << ',' << m.unit << '\n';
}

std::optional<std::string> find_metric(const RunReport& report, std::string_view name) {
  for (const auto& m : report) {
    if (m.name == name) return m.value;
  }
  return std::nullopt;
}

}  // namespace coach
