#include "coach/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "coach/error.hpp"

namespace coach {

namespace {

constexpr double kDeg = M_PI / 180.0;
constexpr double kUpperArm = 0.28;
constexpr double kForearm = 0.26;
constexpr double kHandOffset = 0.08;
constexpr double kLateralRadius = 0.5;
constexpr double kEyeWidth = 0.03;
constexpr double kLidOpen = 0.0045;
constexpr double kLidClosed = 0.0005;

struct Body {
  Vec3 torso, neck, head, left_shoulder, right_shoulder, left_hip, right_hip;
};

Body seated_body(double depth) {
  return {
      {0.0, 0.0, depth},     {0.0, 0.30, depth},     {0.0, 0.45, depth},
      {0.20, 0.20, depth},   {-0.20, 0.20, depth},   {0.12, -0.25, depth},
      {-0.12, -0.25, depth},
  };
}

// Wrist offset from the shoulder at cycle phase phi in [0, 2 pi]. phi = 0 is rest.
Vec3 wrist_offset(ExerciseKind kind, double amplitude, double phi) {
  const double lift = (1.0 - std::cos(phi)) / 2.0;
  if (kind == ExerciseKind::ShoulderPress) {
    return {0.0, -0.05 + (amplitude + 0.05) * lift, -0.15 + 0.12 * std::sin(phi)};
  }
  const double alpha_max = std::asin(std::min(1.0, (amplitude + 0.05) / kLateralRadius));
  const double alpha = alpha_max * lift;
  return {kLateralRadius * std::sin(alpha), -kLateralRadius * std::cos(alpha),
          -0.05 + 0.12 * std::sin(phi)};
}

// Two-link elbow placement with the elbow bent toward pole.
Vec3 place_elbow(const Vec3& shoulder, const Vec3& wrist) {
  const Vec3 d = wrist - shoulder;
  const double dist = std::clamp(d.norm(), 1e-6, kUpperArm + kForearm - 1e-6);
  const Vec3 axis = d / std::max(d.norm(), 1e-12);
  const double along = (kUpperArm * kUpperArm - kForearm * kForearm + dist * dist) / (2.0 * dist);
  const double off = std::sqrt(std::max(0.0, kUpperArm * kUpperArm - along * along));
  Vec3 pole{0.5, -1.0, 0.3};
  pole = pole - axis * dot(pole, axis);
  if (pole.norm() < 1e-6) pole = cross(axis, Vec3{0.0, 0.0, 1.0});
  return shoulder + axis * along + normalize(pole) * off;
}

struct ArmPose {
  Vec3 elbow, wrist, hand;
};

ArmPose left_arm(const Body& b, ExerciseKind kind, double amplitude, double phi) {
  ArmPose a;
  a.wrist = b.left_shoulder + wrist_offset(kind, amplitude, phi);
  a.elbow = place_elbow(b.left_shoulder, a.wrist);
  a.hand = a.wrist + normalize(a.wrist - a.elbow) * kHandOffset;
  return a;
}

Vec3 mirror_x(const Vec3& v) { return {-v.x, v.y, v.z}; }

struct Rep {
  ExerciseKind exercise;
  int index;  // 1-based within its exercise and verdict
  bool correct;
  Timestamp start;
  Timestamp end;
  double amplitude;
};

struct Schedule {
  std::vector<Rep> reps;
  // Rest pose between exercises follows the most recent exercise.
  std::vector<std::pair<Timestamp, ExerciseKind>> exercise_starts;
  Timestamp duration = 0.0;
};

Schedule plan(const GeneratorParams& p) {
  Schedule s;
  Timestamp t = 0.0;
  for (ExerciseKind kind : p.exercises) {
    s.exercise_starts.emplace_back(t, kind);
    t += p.lead_in;
    const double amp = p.amplitude.value_or(default_amplitude(kind));
    int correct = 0;
    int malformed = 0;
    while (correct < p.reps || malformed < p.malformed_reps) {
      // Alternate correct and malformed while both remain, starting with correct.
      const bool make_correct =
          malformed >= p.malformed_reps || (correct < p.reps && correct <= malformed);
      Rep r{kind, make_correct ? ++correct : ++malformed, make_correct, t, t + p.cycle,
            make_correct ? amp : p.malformed_amplitude};
      s.reps.push_back(r);
      t += p.cycle + p.rest;
    }
  }
  s.duration = t + p.idle_seconds;
  return s;
}

struct HeadScript {
  std::vector<YawPitchRoll> segment_angles;
};

HeadScript script_head(const GeneratorParams& p, std::mt19937_64& rng) {
  HeadScript h;
  std::uniform_real_distribution<double> away(40.0, 60.0);
  std::uniform_real_distribution<double> small(-10.0, 10.0);
  std::bernoulli_distribution left(0.5);
  for (const auto& seg : p.attention) {
    if (seg.label == AttentionDirection::FacingAway) {
      const double yaw = away(rng) * (left(rng) ? -1.0 : 1.0);
      h.segment_angles.push_back({yaw * kDeg, small(rng) * kDeg, small(rng) * 0.5 * kDeg});
    } else {
      h.segment_angles.push_back({small(rng) * kDeg, small(rng) * 0.5 * kDeg, 0.0});
    }
  }
  return h;
}

}  // namespace

double default_amplitude(ExerciseKind kind) {
  return kind == ExerciseKind::ShoulderPress ? 0.45 : 0.40;
}

void GeneratorParams::validate() const {
  const auto bad = [](const std::string& msg) { throw Error(ErrorKind::InvalidParams, msg); };
  if (!exercises.empty() && reps < 1) bad("reps must be >= 1");
  if (exercises.empty() && !(idle_seconds > 0.0)) bad("an idle trace needs idle_seconds > 0");
  if (malformed_reps < 0) bad("malformed_reps must be >= 0");
  if (!(joint_noise >= 0.0) || !std::isfinite(joint_noise)) bad("joint noise must be >= 0");
  if (!(pixel_noise >= 0.0) || !std::isfinite(pixel_noise)) bad("pixel noise must be >= 0");
  if (!(frame_rate > 0.0) || !std::isfinite(frame_rate)) bad("frame rate must be > 0");
  if (amplitude && !(*amplitude > 0.0 && *amplitude <= 0.49)) bad("amplitude must be in (0, 0.49]");
  if (!(malformed_amplitude > 0.0 && malformed_amplitude <= 0.49)) {
    bad("malformed amplitude must be in (0, 0.49]");
  }
  if (!(lead_in >= 0.0) || !(cycle > 0.0) || !(rest >= 0.0) || !(idle_seconds >= 0.0)) {
    bad("timing values must be non-negative and cycle positive");
  }
  if (!(depth >= 0.5 && depth <= 6.0)) bad("depth must be in [0.5, 6] m");
  for (const auto& seg : attention) {
    if (!(seg.start < seg.end)) bad("attention segment must have start < end");
  }
  for (const auto& s : speech) {
    if (!(s.timestamp >= 0.0) || !std::isfinite(s.timestamp)) bad("speech time must be >= 0");
  }
  camera.validate();
}

LandmarkRecord render_face(Timestamp t, const RigidPose& head, bool eyes_open,
                           const CameraIntrinsics& camera) {
  const FaceModel model = FaceModel::generic();
  LandmarkRecord r;
  r.face.timestamp = t;
  for (std::size_t i = 0; i < kFacePointCount; ++i) {
    r.face.points[i] = project_point(model.points[i], head, camera);
  }
  const double lid = eyes_open ? kLidOpen : kLidClosed;
  const auto eye = [&](const Vec3& outer, double inward) {
    const Vec3 inner = outer + Vec3{inward * kEyeWidth, 0.0, 0.0};
    const Vec3 a = outer + Vec3{inward * kEyeWidth / 3.0, 0.0, 0.0};
    const Vec3 b = outer + Vec3{inward * 2.0 * kEyeWidth / 3.0, 0.0, 0.0};
    const Vec3 up{0.0, lid, 0.0};
    EyeLandmarks e;
    const std::array<Vec3, 6> pts = {outer, a + up, b + up, inner, b - up, a - up};
    for (std::size_t i = 0; i < 6; ++i) e.p[i] = project_point(pts[i], head, camera);
    return e;
  };
  r.left_eye = eye(model[FacePoint::LeftEyeCorner], 1.0);
  r.right_eye = eye(model[FacePoint::RightEyeCorner], -1.0);
  return r;
}

std::vector<TraceRecord> generate_trace(const GeneratorParams& p) {
  p.validate();
  std::mt19937_64 rng(p.seed);
  const Schedule schedule = plan(p);
  const HeadScript head_script = script_head(p, rng);
  const Body body = seated_body(p.depth);
  std::normal_distribution<double> unit(0.0, 1.0);
  const auto jitter = [&](const Vec3& v) {
    if (p.joint_noise == 0.0) return v;
    const double x = unit(rng), y = unit(rng), z = unit(rng);
    return v + Vec3{x, y, z} * p.joint_noise;
  };
  const auto jitter_px = [&](Pixel px) {
    if (p.pixel_noise == 0.0) return px;
    const double du = unit(rng), dv = unit(rng);
    return Pixel{px.u + du * p.pixel_noise, px.v + dv * p.pixel_noise};
  };

  std::vector<TraceRecord> out;
  for (const auto& r : schedule.reps) {
    out.emplace_back(RepMarker{r.start, r.exercise, r.index, r.correct, true});
    out.emplace_back(RepMarker{r.end, r.exercise, r.index, r.correct, false});
  }
  for (const auto& s : p.speech) out.emplace_back(s);

  const auto frames = static_cast<std::size_t>(std::floor(schedule.duration * p.frame_rate + 1e-9)) + 1;
  std::size_t rep_cursor = 0;
  for (std::size_t k = 0; k < frames; ++k) {
    const Timestamp t = static_cast<double>(k) / p.frame_rate;

    // Arm pose: the active rep if any, otherwise rest for the current exercise.
    while (rep_cursor < schedule.reps.size() && schedule.reps[rep_cursor].end < t) ++rep_cursor;
    ExerciseKind kind = p.exercises.empty() ? ExerciseKind::ShoulderPress : p.exercises.front();
    for (const auto& [start, ex] : schedule.exercise_starts) {
      if (start <= t) kind = ex;
    }
    double phi = 0.0;
    double amp = default_amplitude(kind);
    if (rep_cursor < schedule.reps.size()) {
      const Rep& r = schedule.reps[rep_cursor];
      if (t >= r.start && t <= r.end) {
        kind = r.exercise;
        amp = r.amplitude;
        phi = 2.0 * M_PI * (t - r.start) / (r.end - r.start);
      }
    }
    const ArmPose arm = left_arm(body, kind, amp, phi);

    SkeletonFrame f(t);
    f.set(JointId::Head, jitter(body.head));
    f.set(JointId::Neck, jitter(body.neck));
    f.set(JointId::Torso, jitter(body.torso));
    f.set(JointId::LeftShoulder, jitter(body.left_shoulder));
    f.set(JointId::RightShoulder, jitter(body.right_shoulder));
    f.set(JointId::LeftElbow, jitter(arm.elbow));
    f.set(JointId::RightElbow, jitter(mirror_x(arm.elbow)));
    f.set(JointId::LeftWrist, jitter(arm.wrist));
    f.set(JointId::RightWrist, jitter(mirror_x(arm.wrist)));
    f.set(JointId::LeftHand, jitter(arm.hand));
    f.set(JointId::RightHand, jitter(mirror_x(arm.hand)));
    f.set(JointId::LeftHip, jitter(body.left_hip));
    f.set(JointId::RightHip, jitter(body.right_hip));
    out.emplace_back(std::move(f));

    if (!p.landmarks) continue;
    AttentionDirection label = AttentionDirection::FacingRobotEyesOpen;
    YawPitchRoll ypr{8.0 * kDeg * std::sin(2.0 * M_PI * 0.05 * t),
                     5.0 * kDeg * std::sin(2.0 * M_PI * 0.07 * t),
                     3.0 * kDeg * std::sin(2.0 * M_PI * 0.04 * t)};
    for (std::size_t i = 0; i < p.attention.size(); ++i) {
      const auto& seg = p.attention[i];
      if (t >= seg.start && t < seg.end) {
        label = seg.label;
        const YawPitchRoll& base = head_script.segment_angles[i];
        ypr = {base.yaw + 0.5 * ypr.yaw, base.pitch + 0.5 * ypr.pitch, base.roll + ypr.roll};
      }
    }
    RigidPose head;
    head.rotation = rotation_from_ypr(ypr.yaw, ypr.pitch, ypr.roll);
    head.translation = body.head + Vec3{0.0, 0.0, -0.10};
    LandmarkRecord lm =
        render_face(t, head, label != AttentionDirection::FacingRobotEyesClosed, p.camera);
    for (auto& px : lm.face.points) px = jitter_px(px);
    for (auto& px : lm.left_eye.p) px = jitter_px(px);
    for (auto& px : lm.right_eye.p) px = jitter_px(px);
    out.emplace_back(std::move(lm));
    out.emplace_back(PlantedPose{t, ypr, head.translation, label});
  }

  std::stable_sort(out.begin(), out.end(), [](const TraceRecord& a, const TraceRecord& b) {
    return record_time(a) < record_time(b);
  });
  return out;
}

TraceSummary summarize(std::span<const TraceRecord> records) {
  TraceSummary s;
  const auto bump = [](std::vector<std::pair<ExerciseKind, int>>& v, ExerciseKind k) {
    for (auto& [kind, n] : v) {
      if (kind == k) {
        ++n;
        return;
      }
    }
    v.emplace_back(k, 1);
  };
  for (const auto& r : records) {
    s.duration = std::max(s.duration, record_time(r));
    if (std::holds_alternative<SkeletonFrame>(r)) ++s.skeleton_frames;
    else if (std::holds_alternative<LandmarkRecord>(r)) ++s.landmark_frames;
    else if (std::holds_alternative<SpeechEvent>(r)) ++s.speech_events;
    else if (std::holds_alternative<PlantedPose>(r)) ++s.planted_poses;
    else if (const auto* m = std::get_if<RepMarker>(&r); m && m->start) {
      bump(m->correct ? s.correct_reps : s.malformed_reps, m->exercise);
    }
  }
  return s;
}

}  // namespace coach
