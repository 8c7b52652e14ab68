#include "coach/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "coach/error.hpp"

namespace coach {

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
  throw Error(ErrorKind::ConfigError,
              std::string(key) + " = '" + std::string(value) + "': " + std::string(why));
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = s.find(',');
    parts.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return parts;
}

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double to_double(std::string_view key, std::string_view s) {
  s = trim(s);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    bad_value(key, s, "expected a finite number");
  }
  return v;
}

int to_int(std::string_view key, std::string_view s) {
  s = trim(s);
  int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) bad_value(key, s, "expected an integer");
  return v;
}

struct Entry {
  std::string key;
  std::function<std::string(const CoachConfig&)> get;
  std::function<void(CoachConfig&, std::string_view key, std::string_view value)> set;
};

template <typename Member>
Entry number(std::string key, Member member) {
  return {std::move(key), [member](const CoachConfig& c) { return fmt(member(c)); },
          [member](CoachConfig& c, std::string_view k, std::string_view v) { member(c) = to_double(k, v); }};
}

template <typename Member>
Entry integer(std::string key, Member member) {
  return {std::move(key),
          [member](const CoachConfig& c) { return std::to_string(member(c)); },
          [member](CoachConfig& c, std::string_view k, std::string_view v) { member(c) = to_int(k, v); }};
}

template <typename Member>
Entry vec3(std::string key, Member member) {
  return {std::move(key),
          [member](const CoachConfig& c) {
            const Vec3& v = member(c);
            return fmt(v.x) + ", " + fmt(v.y) + ", " + fmt(v.z);
          },
          [member](CoachConfig& c, std::string_view k, std::string_view v) {
            const auto parts = split_commas(v);
            if (parts.size() != 3) bad_value(k, v, "expected x, y, z");
            member(c) = Vec3{to_double(k, parts[0]), to_double(k, parts[1]), to_double(k, parts[2])};
          }};
}

template <typename Member>
Entry degrees(std::string key, Member member) {
  return {std::move(key),
          [member](const CoachConfig& c) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.12g", member(c) * 180.0 / M_PI);
            return std::string(buf);
          },
          [member](CoachConfig& c, std::string_view k, std::string_view v) {
            member(c) = to_double(k, v) * M_PI / 180.0;
          }};
}

template <typename Member>
Entry text(std::string key, Member member) {
  return {std::move(key), [member](const CoachConfig& c) { return member(c); },
          [member](CoachConfig& c, std::string_view, std::string_view v) { member(c) = std::string(v); }};
}

template <typename Member>
Entry joint(std::string key, Member member) {
  return {std::move(key),
          [member](const CoachConfig& c) { return std::string(to_string(member(c))); },
          [member](CoachConfig& c, std::string_view k, std::string_view v) {
            auto id = parse_joint(trim(v));
            if (!id) bad_value(k, v, "unknown joint");
            member(c) = *id;
          }};
}

void add_exercise(std::vector<Entry>& out, ExerciseKind kind) {
  const std::string p = std::string(to_string(kind)) + ".";
  auto spec = [kind](auto& c) -> auto& { return c.spec(kind); };
  out.push_back(joint(p + "tracked_joint", [spec](auto& c) -> auto& { return spec(c).tracked_joint; }));
  out.push_back(joint(p + "roi_anchor", [spec](auto& c) -> auto& { return spec(c).roi.anchor; }));
  out.push_back(vec3(p + "roi_offset", [spec](auto& c) -> auto& { return spec(c).roi.offset; }));
  out.push_back(vec3(p + "roi_extents", [spec](auto& c) -> auto& { return spec(c).roi.extents; }));
  out.push_back(number(p + "min_path_length", [spec](auto& c) -> auto& { return spec(c).min_path_length; }));
  out.push_back(number(p + "max_path_length", [spec](auto& c) -> auto& { return spec(c).max_path_length; }));
  out.push_back(number(p + "max_segment_angle", [spec](auto& c) -> auto& { return spec(c).max_segment_angle; }));
  out.push_back(number(p + "min_excursion", [spec](auto& c) -> auto& { return spec(c).min_excursion; }));
  out.push_back(vec3(p + "excursion_axis", [spec](auto& c) -> auto& { return spec(c).excursion_axis; }));
  out.push_back(vec3(p + "excursion_origin", [spec](auto& c) -> auto& { return spec(c).excursion_origin; }));
}

#define FIELD(expr) [](auto& c) -> auto& { return expr; }

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> e;
    add_exercise(e, ExerciseKind::ShoulderPress);
    add_exercise(e, ExerciseKind::SideLateralRaise);
    e.push_back(number("engine.min_confidence", FIELD(c.engine.min_confidence)));
    e.push_back(number("engine.sample_spacing", FIELD(c.engine.sample_spacing)));
    e.push_back(number("engine.start_fraction", FIELD(c.engine.start_fraction)));
    e.push_back(number("engine.end_fraction", FIELD(c.engine.end_fraction)));

    e.push_back(number("camera.fx", FIELD(c.camera.fx)));
    e.push_back(number("camera.fy", FIELD(c.camera.fy)));
    e.push_back(number("camera.cx", FIELD(c.camera.cx)));
    e.push_back(number("camera.cy", FIELD(c.camera.cy)));

    e.push_back(number("head_pose.initial_lambda", FIELD(c.lm.initial_lambda)));
    e.push_back(number("head_pose.lambda_factor", FIELD(c.lm.lambda_factor)));
    e.push_back(number("head_pose.max_lambda", FIELD(c.lm.max_lambda)));
    e.push_back(number("head_pose.gradient_tolerance", FIELD(c.lm.gradient_tolerance)));
    e.push_back(number("head_pose.cost_change_tolerance", FIELD(c.lm.cost_change_tolerance)));
    e.push_back(integer("head_pose.max_iterations", FIELD(c.lm.max_iterations)));
    e.push_back(number("head_pose.convergence_rms", FIELD(c.lm.convergence_rms)));

    e.push_back(degrees("attention.max_yaw_deg", FIELD(c.attention.max_yaw)));
    e.push_back(degrees("attention.max_pitch_deg", FIELD(c.attention.max_pitch)));
    e.push_back(number("attention.min_ear", FIELD(c.attention.min_ear)));
    e.push_back(number("attention.timeout", FIELD(c.monitor.timeout)));
    e.push_back(number("attention.activity_min_speed", FIELD(c.activity_min_speed)));
    e.push_back(number("attention.activity_window", FIELD(c.activity_window)));

    e.push_back(number("retargeting.s0_min", FIELD(c.robot.s0.min)));
    e.push_back(number("retargeting.s0_max", FIELD(c.robot.s0.max)));
    e.push_back(number("retargeting.s1_min", FIELD(c.robot.s1.min)));
    e.push_back(number("retargeting.s1_max", FIELD(c.robot.s1.max)));
    e.push_back(number("retargeting.e0_min", FIELD(c.robot.e0.min)));
    e.push_back(number("retargeting.e0_max", FIELD(c.robot.e0.max)));
    e.push_back(number("retargeting.e1_min", FIELD(c.robot.e1.min)));
    e.push_back(number("retargeting.e1_max", FIELD(c.robot.e1.max)));
    e.push_back(number("retargeting.upper_arm", FIELD(c.robot.upper_arm)));
    e.push_back(number("retargeting.forearm", FIELD(c.robot.forearm)));
    e.push_back(number("retargeting.tiny_motion", FIELD(c.motion.tiny)));
    e.push_back(number("retargeting.large_motion", FIELD(c.motion.large)));

    e.push_back({"session.exercises",
                 [](const CoachConfig& c) {
                   std::string s;
                   for (ExerciseKind k : c.session.exercises) {
                     if (!s.empty()) s += ", ";
                     s += to_string(k);
                   }
                   return s;
                 },
                 [](CoachConfig& c, std::string_view k, std::string_view v) {
                   std::vector<ExerciseKind> list;
                   for (auto part : split_commas(v)) {
                     auto ex = parse_exercise(part);
                     if (!ex) bad_value(k, v, "unknown exercise '" + std::string(part) + "'");
                     list.push_back(*ex);
                   }
                   c.session.exercises = std::move(list);
                 }});
    e.push_back(integer("session.repetitions", FIELD(c.session.repetitions)));
    e.push_back({"session.policy",
                 [](const CoachConfig& c) { return std::string(to_string(c.session.policy)); },
                 [](CoachConfig& c, std::string_view k, std::string_view v) {
                   auto p = parse_policy(trim(v));
                   if (!p) bad_value(k, v, "expected low_stimulus, turn_based or mimicking");
                   c.session.policy = *p;
                 }});
    e.push_back(number("session.pause_timeout", FIELD(c.session.pause_timeout)));
    e.push_back(text("say.benefits", FIELD(c.session.text.benefits)));
    e.push_back(text("say.announce", FIELD(c.session.text.announce)));
    e.push_back(text("say.goal", FIELD(c.session.text.goal)));
    e.push_back(text("say.trigger", FIELD(c.session.text.trigger)));
    e.push_back(text("say.praise", FIELD(c.session.text.praise)));
    e.push_back(text("say.correction", FIELD(c.session.text.correction)));
    e.push_back(text("say.query", FIELD(c.session.text.query)));
    e.push_back(text("say.pause", FIELD(c.session.text.pause)));
    e.push_back(text("say.resume", FIELD(c.session.text.resume)));
    e.push_back(text("say.alert", FIELD(c.session.text.alert)));
    e.push_back(text("say.farewell", FIELD(c.session.text.farewell)));
    return e;
  }();
  return entries;
}

#undef FIELD

const Entry& find_entry(std::string_view key) {
  static const std::map<std::string, const Entry*, std::less<>> index = [] {
    std::map<std::string, const Entry*, std::less<>> m;
    for (const auto& e : registry()) m.emplace(e.key, &e);
    return m;
  }();
  auto it = index.find(key);
  if (it == index.end()) throw Error(ErrorKind::ConfigError, "unknown key '" + std::string(key) + "'");
  return *it->second;
}

}  // namespace

const ExerciseSpec& CoachConfig::spec(ExerciseKind kind) const {
  return kind == ExerciseKind::ShoulderPress ? shoulder_press : side_lateral_raise;
}

ExerciseSpec& CoachConfig::spec(ExerciseKind kind) {
  return kind == ExerciseKind::ShoulderPress ? shoulder_press : side_lateral_raise;
}

void CoachConfig::validate() const {
  const auto group = [](const char* name, auto&& check) {
    try {
      check();
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigError, std::string(name) + ": " + e.what());
    }
  };
  group("shoulder_press", [&] { shoulder_press.validate(); });
  group("side_lateral_raise", [&] { side_lateral_raise.validate(); });
  if (shoulder_press.kind != ExerciseKind::ShoulderPress ||
      side_lateral_raise.kind != ExerciseKind::SideLateralRaise) {
    throw Error(ErrorKind::ConfigError, "exercise spec stored under the wrong name");
  }
  group("engine", [&] { engine.validate(); });
  group("camera", [&] { camera.validate(); });
  group("head_pose", [&] {
    if (!(lm.initial_lambda > 0.0) || !(lm.lambda_factor > 1.0) ||
        !(lm.max_lambda >= lm.initial_lambda) || !(lm.gradient_tolerance >= 0.0) ||
        !(lm.cost_change_tolerance >= 0.0) || lm.max_iterations < 1 ||
        !(lm.convergence_rms > 0.0)) {
      throw Error(ErrorKind::InvalidParams, "solver settings out of range");
    }
  });
  group("attention", [&] {
    monitor.validate();
    if (!(attention.max_yaw > 0.0 && attention.max_yaw < M_PI) ||
        !(attention.max_pitch > 0.0 && attention.max_pitch < M_PI / 2.0) ||
        !(attention.min_ear > 0.0) || !(activity_min_speed >= 0.0) || !(activity_window > 0.0)) {
      throw Error(ErrorKind::InvalidParams, "thresholds out of range");
    }
  });
  group("retargeting", [&] {
    robot.validate();
    motion.validate();
  });
  group("session", [&] { session.validate(); });
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& e : registry()) keys.push_back(e.key);
  return keys;
}

std::string get_config_value(const CoachConfig& cfg, std::string_view key) {
  return find_entry(key).get(cfg);
}

void set_config_value(CoachConfig& cfg, std::string_view key, std::string_view value) {
  find_entry(key).set(cfg, key, trim(value));
}

CoachConfig parse_config(std::istream& in, CoachConfig base) {
  std::set<std::string, std::less<>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw LineError(ErrorKind::ConfigError, line_no, "expected key = value");
    }
    const std::string_view key = trim(body.substr(0, eq));
    if (!seen.insert(std::string(key)).second) {
      throw LineError(ErrorKind::ConfigError, line_no, "repeated key '" + std::string(key) + "'");
    }
    try {
      set_config_value(base, key, body.substr(eq + 1));
    } catch (const Error& e) {
      std::string reason = e.what();
      const std::string prefix = std::string(to_string(e.kind())) + ": ";
      if (reason.rfind(prefix, 0) == 0) reason.erase(0, prefix.size());
      throw LineError(ErrorKind::ConfigError, line_no, reason);
    }
  }
  base.validate();
  return base;
}

CoachConfig load_config(const std::filesystem::path& path, CoachConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open config '" + path.string() + "'");
  return parse_config(in, std::move(base));
}

void write_config(std::ostream& out, const CoachConfig& cfg) {
  std::string group;
  for (const auto& e : registry()) {
    const std::string g = e.key.substr(0, e.key.find('.'));
    if (g != group) {
      if (!group.empty()) out << '\n';
      out << "# " << g << '\n';
      group = g;
    }
    out << e.key << " = " << e.get(cfg) << '\n';
  }
}

}  // namespace coach
