#include "coach/trace_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "coach/error.hpp"

namespace coach {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& reason) { throw Error(ErrorKind::ParseError, reason); }

const Json& field(const Json& obj, const char* key) {
  if (!obj.is_object()) fail("expected an object holding '" + std::string(key) + "'");
  auto it = obj.find(key);
  if (it == obj.end()) fail("missing field '" + std::string(key) + "'");
  return *it;
}

double number(const Json& v, const char* what) {
  if (!v.is_number()) fail(std::string(what) + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(std::string(what) + " must be finite");
  return d;
}

double number_field(const Json& obj, const char* key) { return number(field(obj, key), key); }

std::string string_field(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (!v.is_string()) fail(std::string(key) + " must be a string");
  return v.get<std::string>();
}

bool bool_field(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (!v.is_boolean()) fail(std::string(key) + " must be a boolean");
  return v.get<bool>();
}

int int_field(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (!v.is_number_integer()) fail(std::string(key) + " must be an integer");
  return v.get<int>();
}

template <typename T, typename Parser>
T enum_field(const Json& obj, const char* key, Parser parse) {
  const std::string s = string_field(obj, key);
  auto parsed = parse(s);
  if (!parsed) fail("unknown " + std::string(key) + " '" + s + "'");
  return *parsed;
}

Json vec_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

Vec3 vec_from(const Json& v, const char* what) {
  if (!v.is_array() || v.size() != 3) fail(std::string(what) + " must be [x, y, z]");
  return {number(v[0], what), number(v[1], what), number(v[2], what)};
}

Json pixel_json(const Pixel& p) { return Json::array({p.u, p.v}); }

Pixel pixel_from(const Json& v, const char* what) {
  if (!v.is_array() || v.size() != 2) fail(std::string(what) + " must be [u, v]");
  return {number(v[0], what), number(v[1], what)};
}

Json eye_json(const EyeLandmarks& eye) {
  Json a = Json::array();
  for (const auto& p : eye.p) a.push_back(pixel_json(p));
  return a;
}

EyeLandmarks eye_from(const Json& v, const char* what) {
  if (!v.is_array() || v.size() != 6) fail(std::string(what) + " must hold 6 points");
  EyeLandmarks eye;
  for (std::size_t i = 0; i < 6; ++i) eye.p[i] = pixel_from(v[i], what);
  return eye;
}

Json envelope(Timestamp t, std::string_view type, Json payload) {
  Json j;
  j["t"] = t;
  j["type"] = type;
  j["payload"] = std::move(payload);
  return j;
}

struct Envelope {
  Timestamp t;
  std::string type;
  Json payload;
};

Envelope open_envelope(std::string_view line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) fail("record must be a JSON object");
  Envelope env{number_field(j, "t"), string_field(j, "type"), field(j, "payload")};
  if (!env.payload.is_object()) fail("payload must be an object");
  return env;
}

// ---- trace records ----

Json skeleton_payload(const SkeletonFrame& f) {
  Json joints = Json::object();
  Json conf = Json::object();
  for (JointId id : kAllJoints) {
    if (!f.has(id)) continue;
    const std::string name(to_string(id));
    joints[name] = vec_json(f.at(id));
    if (f.confidence(id) != 1.0) conf[name] = f.confidence(id);
  }
  Json p;
  p["joints"] = std::move(joints);
  if (!conf.empty()) p["confidence"] = std::move(conf);
  return p;
}

SkeletonFrame skeleton_from(Timestamp t, const Json& p) {
  SkeletonFrame f(t);
  const Json& joints = field(p, "joints");
  if (!joints.is_object()) fail("joints must be an object");
  const Json* conf = nullptr;
  if (auto it = p.find("confidence"); it != p.end()) {
    if (!it->is_object()) fail("confidence must be an object");
    conf = &*it;
  }
  for (const auto& [name, value] : joints.items()) {
    auto id = parse_joint(name);
    if (!id) fail("unknown joint '" + name + "'");
    double c = 1.0;
    if (conf) {
      if (auto it = conf->find(name); it != conf->end()) c = number(*it, "confidence");
    }
    if (c < 0.0 || c > 1.0) fail("confidence of " + name + " outside [0, 1]");
    f.set(*id, vec_from(value, name.c_str()), c);
  }
  if (conf) {
    for (const auto& [name, value] : conf->items()) {
      if (!joints.contains(name)) fail("confidence given for absent joint '" + name + "'");
    }
  }
  return f;
}

Json landmarks_payload(const LandmarkRecord& r) {
  Json points = Json::object();
  for (std::size_t i = 0; i < kFacePointCount; ++i) {
    points[std::string(to_string(static_cast<FacePoint>(i)))] = pixel_json(r.face.points[i]);
  }
  Json p;
  p["points"] = std::move(points);
  p["left_eye"] = eye_json(r.left_eye);
  p["right_eye"] = eye_json(r.right_eye);
  return p;
}

LandmarkRecord landmarks_from(Timestamp t, const Json& p) {
  LandmarkRecord r;
  r.face.timestamp = t;
  const Json& points = field(p, "points");
  if (!points.is_object()) fail("points must be an object");
  std::array<bool, kFacePointCount> seen{};
  for (const auto& [name, value] : points.items()) {
    auto fp = parse_face_point(name);
    if (!fp) fail("unknown face point '" + name + "'");
    const auto i = static_cast<std::size_t>(*fp);
    r.face.points[i] = pixel_from(value, name.c_str());
    seen[i] = true;
  }
  for (std::size_t i = 0; i < kFacePointCount; ++i) {
    if (!seen[i]) fail("missing face point '" + std::string(to_string(static_cast<FacePoint>(i))) + "'");
  }
  r.left_eye = eye_from(field(p, "left_eye"), "left_eye");
  r.right_eye = eye_from(field(p, "right_eye"), "right_eye");
  return r;
}

Json annotation_payload(const RepMarker& m) {
  Json p;
  p["kind"] = m.start ? "rep_start" : "rep_end";
  p["exercise"] = to_string(m.exercise);
  p["index"] = m.index;
  p["correct"] = m.correct;
  return p;
}

Json annotation_payload(const PlantedPose& pp) {
  Json p;
  p["kind"] = "planted_pose";
  p["yaw"] = pp.angles.yaw;
  p["pitch"] = pp.angles.pitch;
  p["roll"] = pp.angles.roll;
  p["translation"] = vec_json(pp.translation);
  p["attention"] = to_string(pp.attention);
  return p;
}

TraceRecord annotation_from(Timestamp t, const Json& p) {
  const std::string kind = string_field(p, "kind");
  if (kind == "rep_start" || kind == "rep_end") {
    RepMarker m;
    m.timestamp = t;
    m.start = kind == "rep_start";
    m.exercise = enum_field<ExerciseKind>(p, "exercise", parse_exercise);
    m.index = int_field(p, "index");
    m.correct = bool_field(p, "correct");
    return m;
  }
  if (kind == "planted_pose") {
    PlantedPose pp;
    pp.timestamp = t;
    pp.angles = {number_field(p, "yaw"), number_field(p, "pitch"), number_field(p, "roll")};
    pp.translation = vec_from(field(p, "translation"), "translation");
    pp.attention = enum_field<AttentionDirection>(p, "attention", parse_attention_direction);
    return pp;
  }
  fail("unknown annotation kind '" + kind + "'");
}

// ---- session log ----

Json command_payload(const BehaviorCommand& c) {
  Json p;
  p["kind"] = to_string(c.kind);
  if (!c.text.empty()) p["text"] = c.text;
  if (c.exercise) p["exercise"] = to_string(*c.exercise);
  if (c.angles) {
    Json a;
    a["s0"] = c.angles->s0;
    a["s1"] = c.angles->s1;
    a["e0"] = c.angles->e0;
    a["e1"] = c.angles->e1;
    a["t"] = c.angles->timestamp;
    p["angles"] = std::move(a);
  }
  p["provenance"] = to_string(c.provenance);
  return p;
}

BehaviorCommand command_from(Timestamp t, const Json& p) {
  BehaviorCommand c;
  c.timestamp = t;
  c.kind = enum_field<CommandKind>(p, "kind", parse_command_kind);
  if (p.contains("text")) c.text = string_field(p, "text");
  if (p.contains("exercise")) c.exercise = enum_field<ExerciseKind>(p, "exercise", parse_exercise);
  if (p.contains("angles")) {
    const Json& a = p["angles"];
    c.angles = RobotJointAngles{number_field(a, "s0"), number_field(a, "s1"),
                                number_field(a, "e0"), number_field(a, "e1"),
                                number_field(a, "t")};
  }
  c.provenance = enum_field<Phase>(p, "provenance", parse_phase);
  return c;
}

Json rep_payload(const LoggedRep& r) {
  Json p;
  p["exercise"] = to_string(r.event.exercise);
  p["verdict"] = to_string(r.event.verdict);
  if (r.event.failure) p["failure"] = to_string(*r.event.failure);
  p["path_length"] = r.event.path_length;
  p["max_segment_angle"] = r.event.max_segment_angle;
  p["excursion"] = r.event.excursion;
  p["rep_index"] = r.event.rep_index;
  p["consumed"] = r.consumed;
  return p;
}

LoggedRep rep_from(Timestamp t, const Json& p) {
  LoggedRep r;
  r.event.timestamp = t;
  r.event.exercise = enum_field<ExerciseKind>(p, "exercise", parse_exercise);
  r.event.verdict = enum_field<RepVerdict>(p, "verdict", parse_verdict);
  if (p.contains("failure")) r.event.failure = enum_field<RepFailure>(p, "failure", parse_failure);
  r.event.path_length = number_field(p, "path_length");
  r.event.max_segment_angle = number_field(p, "max_segment_angle");
  r.event.excursion = number_field(p, "excursion");
  r.event.rep_index = int_field(p, "rep_index");
  r.consumed = bool_field(p, "consumed");
  return r;
}

template <typename Parse, typename TimeOf>
auto read_lines(std::istream& in, Parse parse, TimeOf time_of) {
  std::vector<std::invoke_result_t<Parse, std::string_view>> out;
  std::string line;
  std::size_t line_no = 0;
  std::optional<Timestamp> last;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      out.push_back(parse(line));
    } catch (const Error& e) {
      // Value errors raised while building domain objects are reported as parse errors.
      if (e.kind() != ErrorKind::ParseError && e.kind() != ErrorKind::DegenerateVector &&
          e.kind() != ErrorKind::InvalidParams) {
        throw;
      }
      std::string reason = e.what();
      const std::string prefix = std::string(to_string(e.kind())) + ": ";
      if (reason.rfind(prefix, 0) == 0) reason.erase(0, prefix.size());
      throw LineError(ErrorKind::ParseError, line_no, reason);
    }
    const Timestamp t = time_of(out.back());
    if (last && t < *last) {
      throw LineError(ErrorKind::UnsortedTrace, line_no,
                      "timestamp " + std::to_string(t) + " precedes " + std::to_string(*last));
    }
    last = t;
  }
  if (in.bad()) throw Error(ErrorKind::IoFailure, "read failed");
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open '" + path.string() + "'");
  return in;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::IoFailure, "write to '" + path.string() + "' failed");
}

}  // namespace

Timestamp record_time(const TraceRecord& r) {
  return std::visit(
      [](const auto& v) -> Timestamp {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SkeletonFrame> || std::is_same_v<T, LandmarkRecord>) {
          return v.timestamp();
        } else {
          return v.timestamp;
        }
      },
      r);
}

bool is_annotation(const TraceRecord& r) {
  return std::holds_alternative<RepMarker>(r) || std::holds_alternative<PlantedPose>(r);
}

std::string format_record(const TraceRecord& r) {
  const Timestamp t = record_time(r);
  const Json j = std::visit(
      [t](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SkeletonFrame>) {
          return envelope(t, "skeleton", skeleton_payload(v));
        } else if constexpr (std::is_same_v<T, LandmarkRecord>) {
          return envelope(t, "landmarks", landmarks_payload(v));
        } else if constexpr (std::is_same_v<T, SpeechEvent>) {
          return envelope(t, "speech", Json{{"keyword", to_string(v.keyword)}});
        } else {
          return envelope(t, "annotation", annotation_payload(v));
        }
      },
      r);
  return j.dump();
}

TraceRecord parse_record(std::string_view line) {
  const Envelope env = open_envelope(line);
  if (env.type == "skeleton") return skeleton_from(env.t, env.payload);
  if (env.type == "landmarks") return landmarks_from(env.t, env.payload);
  if (env.type == "speech") {
    return SpeechEvent{env.t, enum_field<SpeechKeyword>(env.payload, "keyword", parse_keyword)};
  }
  if (env.type == "annotation") return annotation_from(env.t, env.payload);
  fail("unknown record type '" + env.type + "'");
}

void write_trace(std::ostream& out, std::span<const TraceRecord> records) {
  for (const auto& r : records) out << format_record(r) << '\n';
}

std::vector<TraceRecord> read_trace(std::istream& in) { return read_lines(in, parse_record, record_time); }

void write_trace_file(const std::filesystem::path& path, std::span<const TraceRecord> records) {
  auto out = open_out(path);
  write_trace(out, records);
  finish(out, path);
}

std::vector<TraceRecord> read_trace_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_trace(in);
}

Timestamp entry_time(const LogEntry& e) {
  return std::visit(
      [](const auto& v) -> Timestamp {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, LoggedRep>) {
          return v.event.timestamp;
        } else {
          return v.timestamp;
        }
      },
      e);
}

std::string format_log_entry(const LogEntry& e) {
  const Timestamp t = entry_time(e);
  const Json j = std::visit(
      [t](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, BehaviorCommand>) {
          return envelope(t, "command", command_payload(v));
        } else if constexpr (std::is_same_v<T, LoggedRep>) {
          return envelope(t, "rep_event", rep_payload(v));
        } else if constexpr (std::is_same_v<T, InterruptionEvent>) {
          return envelope(t, "interruption",
                          Json{{"kind", to_string(v.kind)}, {"source", to_string(v.source)}});
        } else {
          return envelope(t, "state_transition",
                          Json{{"from", to_string(v.from)},
                               {"to", to_string(v.to)},
                               {"cause", v.cause}});
        }
      },
      e);
  return j.dump();
}

LogEntry parse_log_entry(std::string_view line) {
  const Envelope env = open_envelope(line);
  const Json& p = env.payload;
  if (env.type == "command") return command_from(env.t, p);
  if (env.type == "rep_event") return rep_from(env.t, p);
  if (env.type == "interruption") {
    return InterruptionEvent{
        env.t, enum_field<InterruptionKind>(p, "kind", parse_interruption_kind),
        enum_field<InterruptionSource>(p, "source", parse_interruption_source)};
  }
  if (env.type == "state_transition") {
    return StateTransition{env.t, enum_field<Phase>(p, "from", parse_phase),
                           enum_field<Phase>(p, "to", parse_phase), string_field(p, "cause")};
  }
  fail("unknown log entry type '" + env.type + "'");
}

void write_session_log(std::ostream& out, std::span<const LogEntry> entries) {
  for (const auto& e : entries) out << format_log_entry(e) << '\n';
}

std::vector<LogEntry> read_session_log(std::istream& in) {
  return read_lines(in, parse_log_entry, entry_time);
}

void write_session_log_file(const std::filesystem::path& path,
                            std::span<const LogEntry> entries) {
  auto out = open_out(path);
  write_session_log(out, entries);
  finish(out, path);
}

std::vector<LogEntry> read_session_log_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_session_log(in);
}

}  // namespace coach
