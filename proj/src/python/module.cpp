// Python bindings: trace generation, replay and a few perception helpers.

#include <sstream>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "coach/config.hpp"
#include "coach/error.hpp"
#include "coach/generator.hpp"
#include "coach/head_pose.hpp"
#include "coach/pipeline.hpp"
#include "coach/retargeting.hpp"

namespace py = pybind11;
using namespace coach;

namespace {

std::vector<ExerciseKind> exercises_from(const std::vector<std::string>& names) {
  std::vector<ExerciseKind> out;
  for (const auto& n : names) {
    const auto k = parse_exercise(n);
    if (!k) throw Error(ErrorKind::InvalidParams, "unknown exercise '" + n + "'");
    out.push_back(*k);
  }
  return out;
}

CameraIntrinsics camera_from(const std::optional<std::array<double, 4>>& c) {
  if (!c) return {};
  CameraIntrinsics k{(*c)[0], (*c)[1], (*c)[2], (*c)[3]};
  k.validate();
  return k;
}

CoachConfig config_from(const std::optional<std::filesystem::path>& path,
                        const std::optional<std::string>& policy,
                        const std::optional<std::vector<std::string>>& exercises,
                        std::optional<int> reps) {
  CoachConfig cfg = path ? load_config(*path) : CoachConfig{};
  if (policy) {
    const auto p = parse_policy(*policy);
    if (!p) throw Error(ErrorKind::ConfigError, "unknown policy '" + *policy + "'");
    cfg.session.policy = *p;
  }
  if (exercises) cfg.session.exercises = exercises_from(*exercises);
  if (reps) cfg.session.repetitions = *reps;
  cfg.validate();
  return cfg;
}

py::dict report_dict(const RunReport& report) {
  py::dict d;
  for (const auto& m : report) {
    char* end = nullptr;
    const double v = std::strtod(m.value.c_str(), &end);
    if (!m.value.empty() && end && *end == '\0') {
      d[py::str(m.name)] = v;
    } else {
      d[py::str(m.name)] = m.value;
    }
  }
  return d;
}

py::dict angles_dict(const RobotJointAngles& a) {
  py::dict d;
  d["s0"] = a.s0;
  d["s1"] = a.s1;
  d["e0"] = a.e0;
  d["e1"] = a.e1;
  return d;
}

Vec3 vec(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

ArmObservation arm(const std::array<double, 3>& torso, const std::array<double, 3>& shoulder,
                   const std::array<double, 3>& opposite_shoulder,
                   const std::array<double, 3>& elbow, const std::array<double, 3>& hand,
                   const std::string& side) {
  ArmObservation o;
  o.torso = vec(torso);
  o.shoulder = vec(shoulder);
  o.opposite_shoulder = vec(opposite_shoulder);
  o.elbow = vec(elbow);
  o.hand = vec(hand);
  if (side == "left") {
    o.side = ArmSide::Left;
  } else if (side == "right") {
    o.side = ArmSide::Right;
  } else {
    throw Error(ErrorKind::InvalidParams, "side must be 'left' or 'right'");
  }
  return o;
}

RunResult replay(const std::filesystem::path& trace, const CoachConfig& cfg,
                 std::vector<TraceRecord>& records) {
  records = read_trace_file(trace);
  return run_trace(records, cfg);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exercise coach core";

  static py::exception<Error> coach_error(m, "CoachError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = coach_error;
      py::object inst = err(e.what());
      inst.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(coach_error.ptr(), inst.ptr());
    }
  });

  m.def(
      "generate",
      [](const std::filesystem::path& out, const std::vector<std::string>& exercises, int reps,
         int malformed_reps, std::uint64_t seed, double joint_noise, double pixel_noise,
         double frame_rate, double idle_seconds, bool landmarks) {
        GeneratorParams p;
        p.exercises = exercises_from(exercises);
        p.reps = reps;
        p.malformed_reps = malformed_reps;
        p.seed = seed;
        p.joint_noise = joint_noise;
        p.pixel_noise = pixel_noise;
        p.frame_rate = frame_rate;
        p.idle_seconds = idle_seconds;
        p.landmarks = landmarks;
        const auto records = generate_trace(p);
        write_trace_file(out, records);
        const TraceSummary s = summarize(records);
        py::dict d;
        d["skeleton_frames"] = s.skeleton_frames;
        d["landmark_frames"] = s.landmark_frames;
        d["duration"] = s.duration;
        py::dict correct;
        for (const auto& [k, n] : s.correct_reps) correct[py::str(std::string(to_string(k)))] = n;
        d["correct_reps"] = correct;
        return d;
      },
      py::arg("out"), py::arg("exercises") = std::vector<std::string>{"shoulder_press"},
      py::arg("reps") = 5, py::arg("malformed_reps") = 0, py::arg("seed") = 1,
      py::arg("joint_noise") = 0.0, py::arg("pixel_noise") = 0.0, py::arg("frame_rate") = 30.0,
      py::arg("idle_seconds") = 0.0, py::arg("landmarks") = true,
      "Write a synthetic trace and return its annotation summary.");

  m.def(
      "simulate",
      [](const std::filesystem::path& trace, const std::filesystem::path& log,
         std::optional<std::string> policy, std::optional<std::filesystem::path> config,
         std::optional<std::vector<std::string>> exercises, std::optional<int> reps) {
        const CoachConfig cfg = config_from(config, policy, exercises, reps);
        std::vector<TraceRecord> records;
        const RunResult run = replay(trace, cfg, records);
        write_session_log_file(log, run.log);
        return report_dict(build_report(records, run, false));
      },
      py::arg("trace"), py::arg("log"), py::arg("policy") = py::none(),
      py::arg("config") = py::none(), py::arg("exercises") = py::none(),
      py::arg("reps") = py::none(), "Replay a trace, write the session log, return metrics.");

  m.def(
      "evaluate",
      [](const std::filesystem::path& trace, std::optional<std::string> policy,
         std::optional<std::filesystem::path> config,
         std::optional<std::vector<std::string>> exercises, std::optional<int> reps) {
        const CoachConfig cfg = config_from(config, policy, exercises, reps);
        std::vector<TraceRecord> records;
        const RunResult run = replay(trace, cfg, records);
        return report_dict(build_report(records, run, true));
      },
      py::arg("trace"), py::arg("policy") = py::none(), py::arg("config") = py::none(),
      py::arg("exercises") = py::none(), py::arg("reps") = py::none(),
      "Replay an annotated trace and score it against the annotations.");

  m.def(
      "project_face",
      [](double yaw, double pitch, double roll, const std::array<double, 3>& translation,
         std::optional<std::array<double, 4>> camera) {
        RigidPose pose;
        pose.rotation = rotation_from_ypr(yaw, pitch, roll);
        pose.translation = vec(translation);
        const CameraIntrinsics k = camera_from(camera);
        const FaceModel face = FaceModel::generic();
        py::array_t<double> out({static_cast<py::ssize_t>(kFacePointCount), py::ssize_t{2}});
        auto r = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < kFacePointCount; ++i) {
          const Pixel p = project_point(face.points[i], pose, k);
          r(i, 0) = p.u;
          r(i, 1) = p.v;
        }
        return out;
      },
      py::arg("yaw"), py::arg("pitch"), py::arg("roll"), py::arg("translation"),
      py::arg("camera") = py::none(),
      "Pixels of the six generic face points (nose, chin, eye corners, mouth corners).");

  m.def(
      "estimate_head_pose",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> landmarks,
         std::optional<std::array<double, 4>> camera) {
        if (landmarks.ndim() != 2 || landmarks.shape(0) != 6 || landmarks.shape(1) != 2) {
          throw Error(ErrorKind::InvalidParams, "landmarks must have shape (6, 2)");
        }
        const auto r = landmarks.unchecked<2>();
        LandmarkSet2D lm;
        for (std::size_t i = 0; i < kFacePointCount; ++i) lm.points[i] = {r(i, 0), r(i, 1)};
        const HeadPoseEstimate est =
            estimate_head_pose(lm, FaceModel::generic(), camera_from(camera));
        py::dict d;
        d["yaw"] = est.angles.yaw;
        d["pitch"] = est.angles.pitch;
        d["roll"] = est.angles.roll;
        const Vec3& t = est.pose.translation;
        d["translation"] = std::array<double, 3>{t.x, t.y, t.z};
        d["rms_error"] = est.rms_error;
        d["iterations"] = est.iterations;
        d["converged"] = est.converged;
        d["accepted_costs"] = est.accepted_costs;
        return d;
      },
      py::arg("landmarks"), py::arg("camera") = py::none(),
      "Head pose from six landmarks; angles in radians.");

  m.def(
      "eye_aspect_ratio",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> points) {
        if (points.ndim() != 2 || points.shape(0) != 6 || points.shape(1) != 2) {
          throw Error(ErrorKind::InvalidParams, "eye points must have shape (6, 2)");
        }
        const auto r = points.unchecked<2>();
        EyeLandmarks eye;
        for (int i = 0; i < 6; ++i) eye.p[i] = {r(i, 0), r(i, 1)};
        return eye_aspect_ratio(eye);
      },
      py::arg("points"));

  m.def(
      "joint_angles",
      [](const std::array<double, 3>& torso, const std::array<double, 3>& shoulder,
         const std::array<double, 3>& opposite_shoulder, const std::array<double, 3>& elbow,
         const std::array<double, 3>& hand, const std::string& side) {
        return angles_dict(
            compute_joint_angles(arm(torso, shoulder, opposite_shoulder, elbow, hand, side)));
      },
      py::arg("torso"), py::arg("shoulder"), py::arg("opposite_shoulder"), py::arg("elbow"),
      py::arg("hand"), py::arg("side") = "left", "Unclamped robot joint angles, radians.");

  m.def(
      "retarget",
      [](const std::array<double, 3>& torso, const std::array<double, 3>& shoulder,
         const std::array<double, 3>& opposite_shoulder, const std::array<double, 3>& elbow,
         const std::array<double, 3>& hand, const std::string& side) -> py::object {
        const auto out = retarget(arm(torso, shoulder, opposite_shoulder, elbow, hand, side),
                                  RobotArmModel{}, std::nullopt);
        if (!out) return py::none();
        return angles_dict(*out);
      },
      py::arg("torso"), py::arg("shoulder"), py::arg("opposite_shoulder"), py::arg("elbow"),
      py::arg("hand"), py::arg("side") = "left",
      "Scaled and clamped angles for a first frame with the default robot model.");

  m.def("default_config", [] {
    std::ostringstream out;
    write_config(out, CoachConfig{});
    return out.str();
  });
}
