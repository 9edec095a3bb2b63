#pragma once

// Points, rotations and Haar sampling on SO(3).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "arlab/numeric.hpp"
#include "arlab/rng.hpp"

namespace arlab {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr bool operator==(const Vec3&) const = default;

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr double norm2() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double distance2(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Element of SO(3) stored as a unit quaternion (w, x, y, z).
class Rotation {
 public:
  Rotation() = default;

  /// Normalizes the given quaternion; throws on a zero or non-finite input.
  static Rotation from_quaternion(double w, double x, double y, double z) {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (!(n > 0.0) || !std::isfinite(n)) throw Error("Rotation: quaternion must be finite and nonzero");
    return Rotation(w / n, x / n, y / n, z / n);
  }

  /// Rotation by `angle` radians about `axis` (right-hand rule).
  static Rotation about_axis(const Vec3& axis, double angle) {
    const double n = axis.norm();
    if (!(n > 0.0)) throw Error("Rotation: axis must be nonzero");
    const double s = std::sin(angle / 2.0) / n;
    return from_quaternion(std::cos(angle / 2.0), axis.x * s, axis.y * s, axis.z * s);
  }

  static Rotation identity() { return {}; }

  const std::array<double, 4>& quaternion() const { return q_; }

  Mat3 matrix() const {
    const auto [w, x, y, z] = q_;
    return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
             {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
             {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
  }

  /// Hamilton product: (a * b)(p) == a(b(p)).
  Rotation operator*(const Rotation& b) const {
    const auto [w1, x1, y1, z1] = q_;
    const auto [w2, x2, y2, z2] = b.q_;
    return from_quaternion(w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2, w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
                           w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2, w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2);
  }

  Rotation inverse() const { return Rotation(q_[0], -q_[1], -q_[2], -q_[3]); }

 private:
  Rotation(double w, double x, double y, double z) : q_{w, x, y, z} {}
  std::array<double, 4> q_{1.0, 0.0, 0.0, 0.0};
};

inline Vec3 mul(const Mat3& r, const Vec3& p) {
  return {r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z, r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z,
          r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z};
}

/// Returns r(p).
inline Vec3 apply_rotation(const Rotation& r, const Vec3& p) { return mul(r.matrix(), p); }

/// Haar-distributed rotation: a 4-vector of independent standard Gaussians,
/// normalized. Zero vectors are redrawn.
inline Rotation sample_haar_rotation(RngState& rng) {
  for (;;) {
    const double w = rng.normal();
    const double x = rng.normal();
    const double y = rng.normal();
    const double z = rng.normal();
    const double n2 = w * w + x * x + y * y + z * z;
    if (n2 > 1e-300) return Rotation::from_quaternion(w, x, y, z);
  }
}

inline std::vector<Rotation> sample_haar_rotations(std::size_t count, RngState& rng) {
  std::vector<Rotation> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample_haar_rotation(rng));
  return out;
}

/// Kolmogorov–Smirnov distance between the z-coordinates of theta(v), theta
/// drawn from Haar measure, and Uniform[-1, 1]. A uniform pushforward onto S^2
/// has uniformly distributed heights (Archimedes), so small values mean the
/// orbit density of v under Haar measure is constant on the sphere.
inline double pushforward_uniformity_stat(std::size_t samples, const Vec3& v, RngState& rng) {
  if (samples < 100) throw Error("pushforward_uniformity_stat: need at least 100 samples");
  if (std::abs(v.norm() - 1.0) > 1e-9) throw Error("pushforward_uniformity_stat: v must be a unit vector");
  std::vector<double> heights(samples);
  for (auto& h : heights) h = apply_rotation(sample_haar_rotation(rng), v).z;
  return ks_distance(std::move(heights), [](double z) { return std::clamp((z + 1.0) / 2.0, 0.0, 1.0); });
}

/// Same statistic for an arbitrary list of rotations (used to exercise
/// degenerate samplers).
inline double pushforward_uniformity_stat(const std::vector<Rotation>& rotations, const Vec3& v) {
  if (rotations.empty()) throw Error("pushforward_uniformity_stat: no rotations");
  std::vector<double> heights;
  heights.reserve(rotations.size());
  for (const auto& r : rotations) heights.push_back(apply_rotation(r, v).z);
  return ks_distance(std::move(heights), [](double z) { return std::clamp((z + 1.0) / 2.0, 0.0, 1.0); });
}

}  // namespace arlab
