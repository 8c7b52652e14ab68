#pragma once

// Seeded random generators for property tests.

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "coach/geometry.hpp"

namespace coach::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal(double sigma) { return std::normal_distribution<double>(0.0, sigma)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return std::bernoulli_distribution(0.5)(rng_); }

  Vec3 vec(double half_width) {
    const double x = uniform(-half_width, half_width);
    const double y = uniform(-half_width, half_width);
    const double z = uniform(-half_width, half_width);
    return {x, y, z};
  }

  /// A vector with norm in [lo, hi] and uniform direction.
  Vec3 vec_with_norm(double lo, double hi) {
    Vec3 v;
    do {
      v = vec(1.0);
    } while (v.norm() < 1e-3 || v.norm() > 1.0);
    return v * (uniform(lo, hi) / v.norm());
  }

  Eigen::Matrix3d rotation() {
    const Vec3 axis = vec_with_norm(1.0, 1.0);
    return rotation_from_axis_angle(to_eigen(axis) * uniform(0.0, M_PI));
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double deg(double radians) { return radians * 180.0 / M_PI; }
inline double rad(double degrees) { return degrees * M_PI / 180.0; }

}  // namespace coach::testing
