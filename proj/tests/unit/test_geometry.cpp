#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "coach/error.hpp"
#include "coach/geometry.hpp"
#include "coach/skeleton.hpp"
#include "support/gen.hpp"

using namespace coach;
using coach::testing::Gen;

namespace {

void check_vec(const Vec3& got, const Vec3& want, double tol = 1e-12) {
  CHECK(got.x == doctest::Approx(want.x).epsilon(tol));
  CHECK(got.y == doctest::Approx(want.y).epsilon(tol));
  CHECK(got.z == doctest::Approx(want.z).epsilon(tol));
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::IoFailure;
}

}  // namespace

TEST_CASE("normalize") {
  check_vec(normalize({3, 0, 4}), {0.6, 0, 0.8});
  check_vec(normalize({0, 1, 0}), {0, 1, 0});
  CHECK(kind_of([] { normalize({0, 0, 0}); }) == ErrorKind::DegenerateVector);
  CHECK(kind_of([] { normalize({1e-10, 0, 0}); }) == ErrorKind::DegenerateVector);
  CHECK(normalize({2e-9, 0, 0}).x == doctest::Approx(1.0));
}

TEST_CASE("normalize yields unit length") {
  Gen g(11);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v = g.vec_with_norm(1e-6, 1e3);
    CHECK(std::abs(normalize(v).norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("cross products") {
  CHECK(cross({1, 0, 0}, {0, 1, 0}) == Vec3{0, 0, 1});
  CHECK(cross({1, 0, 0}, {2, 0, 0}) == Vec3{0, 0, 0});
  CHECK(cross({0, 0, -1}, {1, 0, 0}) == Vec3{0, -1, 0});
}

TEST_CASE("cross is orthogonal to its inputs and satisfies the Lagrange identity") {
  Gen g(12);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 a = g.vec_with_norm(1e-3, 10.0);
    const Vec3 b = g.vec_with_norm(1e-3, 10.0);
    const Vec3 c = cross(a, b);
    const double scale = a.norm() * b.norm();
    CHECK(std::abs(dot(c, a)) <= 1e-9 * scale * a.norm());
    CHECK(std::abs(dot(c, b)) <= 1e-9 * scale * b.norm());
    const double lhs = c.squared_norm() + dot(a, b) * dot(a, b);
    const double rhs = a.squared_norm() * b.squared_norm();
    CHECK(std::abs(lhs - rhs) <= 1e-9 * rhs);
  }
}

TEST_CASE("angle_between") {
  CHECK(angle_between({1, 0, 0}, {2, 0, 0}) == 0.0);
  CHECK(angle_between({1, 0, 0}, {0, 1, 0}) == doctest::Approx(M_PI / 2));
  CHECK(angle_between({1, 0, 0}, {-1, 0, 0}) == doctest::Approx(M_PI));
  CHECK(kind_of([] { angle_between({0, 0, 0}, {1, 0, 0}); }) == ErrorKind::DegenerateVector);
  CHECK(kind_of([] { angle_between({1, 0, 0}, {0, 0, 0}); }) == ErrorKind::DegenerateVector);
}

TEST_CASE("angle_between is symmetric, scale invariant and within [0, pi]") {
  Gen g(13);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 a = g.vec_with_norm(1e-3, 10.0);
    const Vec3 b = g.vec_with_norm(1e-3, 10.0);
    const double ab = angle_between(a, b);
    CHECK(ab >= 0.0);
    CHECK(ab <= M_PI);
    CHECK(ab == doctest::Approx(angle_between(b, a)).epsilon(1e-12));
    const double s = g.uniform(1e-3, 1e3);
    CHECK(std::abs(angle_between(a * s, b) - ab) <= 1e-12);
    CHECK(std::abs(angle_between(a, b * s) - ab) <= 1e-12);
    // Independent check through the clamped arccos form.
    const double c = std::clamp(dot(a, b) / (a.norm() * b.norm()), -1.0, 1.0);
    CHECK(std::abs(std::acos(c) - ab) <= 1e-7);
  }
}

TEST_CASE("project_point") {
  CameraIntrinsics k{500, 500, 320, 240};
  RigidPose pose;
  pose.translation = {0, 0, 1.5};
  const Pixel a = project_point({0, 0, 0}, pose, k);
  CHECK(a.u == 320.0);
  CHECK(a.v == 240.0);
  const Pixel b = project_point({0.15, 0, 0}, pose, k);
  CHECK(b.u == doctest::Approx(370.0));
  CHECK(b.v == doctest::Approx(240.0));
  CHECK(kind_of([&] { project_point({0, 0, -2}, pose, k); }) == ErrorKind::BehindCamera);
  CHECK(kind_of([&] { project_point({0, 0, -1.5}, pose, k); }) == ErrorKind::BehindCamera);
}

TEST_CASE("project_point maps the model origin to the principal point at any depth") {
  Gen g(14);
  for (int i = 0; i < 200; ++i) {
    CameraIntrinsics k{g.uniform(100, 2000), g.uniform(100, 2000), g.uniform(0, 1920),
                       g.uniform(0, 1080)};
    RigidPose pose;
    pose.translation = {0, 0, g.uniform(1e-3, 100.0)};
    const Pixel p = project_point({0, 0, 0}, pose, k);
    CHECK(p.u == k.cx);
    CHECK(p.v == k.cy);
  }
}

TEST_CASE("camera intrinsics validation") {
  CHECK_NOTHROW(CameraIntrinsics{}.validate());
  CHECK(kind_of([] { CameraIntrinsics{0, 1, 0, 0}.validate(); }) == ErrorKind::InvalidParams);
  CHECK(kind_of([] { CameraIntrinsics{1, -1, 0, 0}.validate(); }) == ErrorKind::InvalidParams);
  CHECK(kind_of([] {
          CameraIntrinsics{1, 1, std::numeric_limits<double>::quiet_NaN(), 0}.validate();
        }) == ErrorKind::InvalidParams);
}

TEST_CASE("yaw, pitch and roll round-trip and give proper rotations") {
  Gen g(15);
  for (int i = 0; i < 500; ++i) {
    const double yaw = g.uniform(-3.0, 3.0);
    const double pitch = g.uniform(-1.5, 1.5);
    const double roll = g.uniform(-3.0, 3.0);
    const Eigen::Matrix3d r = rotation_from_ypr(yaw, pitch, roll);
    CHECK(is_rotation(r));
    const YawPitchRoll back = ypr_from_rotation(r);
    CHECK(back.yaw == doctest::Approx(yaw).epsilon(1e-9));
    CHECK(back.pitch == doctest::Approx(pitch).epsilon(1e-9));
    CHECK(back.roll == doctest::Approx(roll).epsilon(1e-9));
  }
}

TEST_CASE("yaw turns about y, pitch about x") {
  const Eigen::Matrix3d yaw = rotation_from_ypr(M_PI / 2, 0, 0);
  // +z (toward the subject) turns to +x under a positive yaw.
  CHECK((yaw * Eigen::Vector3d::UnitZ() - Eigen::Vector3d::UnitX()).norm() < 1e-12);
  const Eigen::Matrix3d pitch = rotation_from_ypr(0, M_PI / 2, 0);
  CHECK((pitch * Eigen::Vector3d::UnitY() - Eigen::Vector3d::UnitZ()).norm() < 1e-12);
}

TEST_CASE("rotation helpers") {
  Gen g(16);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Matrix3d a = g.rotation();
    CHECK(is_rotation(a));
    CHECK(rotation_distance(a, a) < 1e-7);
    const double angle = g.uniform(0.01, 3.0);
    const Eigen::Vector3d axis = to_eigen(normalize(g.vec(1.0)));
    const Eigen::Matrix3d b = rotation_from_axis_angle(axis * angle) * a;
    CHECK(rotation_distance(a, b) == doctest::Approx(angle).epsilon(1e-9));
  }
  Eigen::Matrix3d reflect = Eigen::Matrix3d::Identity();
  reflect(0, 0) = -1;
  CHECK_FALSE(is_rotation(reflect));
  CHECK_FALSE(is_rotation(2.0 * Eigen::Matrix3d::Identity()));
}

TEST_CASE("joint names") {
  for (JointId id : kAllJoints) CHECK(parse_joint(to_string(id)) == id);
  CHECK(parse_joint("left_wrist") == JointId::LeftWrist);
  CHECK_FALSE(parse_joint("Left_Wrist"));
  CHECK_FALSE(parse_joint("elbow"));
  CHECK_FALSE(parse_joint(""));
}

TEST_CASE("skeleton frame") {
  SkeletonFrame f(1.25);
  CHECK(f.timestamp() == 1.25);
  CHECK_FALSE(f.has(JointId::Torso));
  CHECK(f.confidence(JointId::Torso) == 0.0);
  CHECK_FALSE(f.position(JointId::Torso));
  CHECK(kind_of([&] { (void)f.at(JointId::Torso); }) == ErrorKind::MissingJoint);

  f.set(JointId::Torso, {1, 2, 3}, 0.5);
  CHECK(f.at(JointId::Torso) == Vec3{1, 2, 3});
  CHECK(f.confidence(JointId::Torso) == 0.5);
  f.set(JointId::Head, {0, 1, 0});
  CHECK(f.confidence(JointId::Head) == 1.0);
  f.erase(JointId::Head);
  CHECK_FALSE(f.has(JointId::Head));

  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK(kind_of([&] { f.set(JointId::Neck, {nan, 0, 0}); }) == ErrorKind::DegenerateVector);
  CHECK(kind_of([&] { f.set(JointId::Neck, {0, 0, 0}, 1.5); }) == ErrorKind::InvalidParams);
  CHECK(kind_of([&] { f.set(JointId::Neck, {0, 0, 0}, -0.1); }) == ErrorKind::InvalidParams);
}

TEST_CASE("error messages carry kind and line") {
  const Error e(ErrorKind::MissingJoint, "frame lacks torso");
  CHECK(std::string(e.what()) == "MissingJoint: frame lacks torso");
  const LineError le(ErrorKind::ParseError, 7, "bad number");
  CHECK(le.line() == 7);
  CHECK(le.kind() == ErrorKind::ParseError);
  CHECK(std::string(le.what()) == "ParseError: line 7: bad number");
}
