#pragma once

// Builders for the discrete measures used in the experiments: surface graphs,
// finite stages of the lattice-neighborhood Cantor set, the unit sphere and
// explicit atoms. Every builder returns a probability measure.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "arlab/geometry.hpp"
#include "arlab/measure.hpp"
#include "arlab/profiles.hpp"
#include "arlab/rng.hpp"

namespace arlab {

namespace detail {

/// Cell-centered nodes -r + (k + 1/2) * 2r/n, k = 0..n-1.
inline double grid_node(double radius, int n, int k) {
  return -radius + (static_cast<double>(k) + 0.5) * (2.0 * radius / static_cast<double>(n));
}

inline std::string node_label(double a, double b) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

}  // namespace detail

/// Graph measure of `profile` on an n x n grid clipped to the profile's disk.
/// Weights are base-plane cell areas (uniform), normalized to mass 1.
inline DiscreteMeasure build_graph_measure(const SurfaceProfile& profile, int n) {
  if (n < 8) throw Error("build_graph_measure: resolution must be >= 8");
  const double r = profile.domain_radius;
  std::vector<Vec3> points;
  points.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double a = detail::grid_node(r, n, i);
    for (int j = 0; j < n; ++j) {
      const double b = detail::grid_node(r, n, j);
      if (a * a + b * b >= r * r) continue;
      const double g = profile.evaluate(a, b);
      if (!std::isfinite(g)) {
        throw Error("build_graph_measure: profile '" + profile.name + "' is not finite at node " +
                    detail::node_label(a, b));
      }
      points.push_back({a, b, g});
    }
  }
  if (points.empty()) throw Error("build_graph_measure: no grid node inside the domain");
  std::vector<double> weights(points.size(), 1.0);
  MeasureMeta meta{"graph",
                   {{"profile", profile.name},
                    {"n", n},
                    {"domain_radius", r},
                    {"weighting", "base-plane cell area"},
                    {"resolution", 2.0 * r / n}}};
  return DiscreteMeasure::normalized(std::move(points), std::move(weights), std::move(meta));
}

/// Midpoint-rule estimate of the W^1_1 seminorm, the integral of |grad G| over
/// the profile's disk.
inline double w11_norm_estimate(const SurfaceProfile& profile, int n) {
  if (n < 32) throw Error("w11_norm_estimate: resolution must be >= 32");
  const double r = profile.domain_radius;
  const double cell = (2.0 * r / n) * (2.0 * r / n);
  CompensatedSum total;
  for (int i = 0; i < n; ++i) {
    const double a = detail::grid_node(r, n, i);
    for (int j = 0; j < n; ++j) {
      const double b = detail::grid_node(r, n, j);
      if (a * a + b * b >= r * r) continue;
      const auto g = profile.gradient(a, b);
      const double mag = std::hypot(g[0], g[1]);
      if (!std::isfinite(mag)) {
        throw Error("w11_norm_estimate: gradient of '" + profile.name + "' is not finite at node " +
                    detail::node_label(a, b));
      }
      total.add(mag * cell);
    }
  }
  return total.value();
}

enum class SphereLayout { fibonacci, haar_random };

/// n points on the unit sphere with weights 1/n. The Fibonacci layout is
/// deterministic and near equal-area; the random layout draws iid points
/// theta(e3) with theta Haar, so pair statistics are unbiased at all scales.
inline DiscreteMeasure build_sphere_measure(int n, SphereLayout layout = SphereLayout::fibonacci,
                                            std::uint64_t seed = 0) {
  if (n < 12) throw Error("build_sphere_measure: need at least 12 points");
  std::vector<Vec3> points;
  points.reserve(static_cast<std::size_t>(n));
  MeasureMeta meta{"sphere", {{"n", n}}};
  if (layout == SphereLayout::fibonacci) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / n;
      const double rho = std::sqrt(1.0 - z * z);
      const double phi = golden * i;
      points.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
    }
    meta.params["layout"] = "fibonacci";
  } else {
    RngState rng(seed);
    for (int i = 0; i < n; ++i) points.push_back(apply_rotation(sample_haar_rotation(rng), {0.0, 0.0, 1.0}));
    meta.params["layout"] = "haar-random";
    meta.params["seed"] = seed;
  }
  std::vector<double> weights(points.size(), 1.0);
  return DiscreteMeasure::normalized(std::move(points), std::move(weights), std::move(meta));
}

struct Atom {
  Vec3 position;
  double weight = 1.0;
};

/// Exactly the given atoms, in order, normalized to mass 1.
inline DiscreteMeasure build_atomic_measure(const std::vector<Atom>& atoms) {
  if (atoms.empty()) throw Error("build_atomic_measure: no atoms");
  std::vector<Vec3> points;
  std::vector<double> weights;
  for (const auto& a : atoms) {
    points.push_back(a.position);
    weights.push_back(a.weight);
  }
  MeasureMeta meta{"atoms", {{"count", atoms.size()}}};
  return DiscreteMeasure::normalized(std::move(points), std::move(weights), std::move(meta));
}

// ---------------------------------------------------------------------------
// Lattice-neighborhood Cantor sets.
//
// E_q is the q^(-d/s) neighborhood (Euclidean balls) of the lattice
// q^-1 (Z^d cap [0, q]^d). Stage k of the construction is the intersection of
// E_{q_1}, ..., E_{q_k}. Its discrete skeleton is the set of q_k-lattice points
// that survive every earlier neighborhood test.

struct FractalSpec {
  int d = 3;
  double s = 2.0;
  std::vector<std::int64_t> q_sequence;  // empty: canonical sequence
  int stage = 1;
  int fill = 0;  // samples per surviving center; 0 places atoms at the centers
  std::uint64_t fill_seed = 0;
};

/// q_1 = 2, q_{i+1} = q_i^i + 1: the smallest sequence with q_{i+1} > q_i^i.
inline std::vector<std::int64_t> canonical_q_sequence(int count) {
  std::vector<std::int64_t> q{2};
  for (int i = 1; i < count; ++i) {
    std::int64_t p = 1;
    for (int k = 0; k < i; ++k) p *= q.back();
    q.push_back(p + 1);
  }
  return q;
}

/// Validates `spec` and returns the q-sequence to use (at least `stage` long).
inline std::vector<std::int64_t> resolve_q_sequence(const FractalSpec& spec) {
  if (spec.d != 3) throw Error("FractalSpec: only d = 3 is supported");
  if (!(spec.s > 0.0 && spec.s <= spec.d)) throw Error("FractalSpec: s must lie in (0, d]");
  if (spec.stage < 1) throw Error("FractalSpec: stage must be >= 1");
  if (spec.fill < 0) throw Error("FractalSpec: fill must be >= 0");
  auto q = spec.q_sequence.empty() ? canonical_q_sequence(spec.stage) : spec.q_sequence;
  if (q.front() != 2) throw Error("FractalSpec: q_1 must equal 2");
  for (std::size_t i = 1; i < q.size(); ++i) {
    // q_{i+1} > q_i^i with 1-based i
    double bound = 1.0;
    for (std::size_t k = 0; k < i; ++k) bound *= static_cast<double>(q[i - 1]);
    if (!(static_cast<double>(q[i]) > bound)) {
      throw Error("FractalSpec: q_" + std::to_string(i + 1) + " must exceed q_" + std::to_string(i) + "^" +
                  std::to_string(i));
    }
  }
  if (static_cast<int>(q.size()) < spec.stage) throw Error("FractalSpec: q_sequence shorter than stage");
  q.resize(static_cast<std::size_t>(spec.stage));
  return q;
}

/// Squared neighborhood radius q^(-2d/s).
inline double neighborhood_radius_sq(std::int64_t q, int d, double s) {
  return std::pow(static_cast<double>(q), -2.0 * d / s);
}

/// Membership test for a lattice point a / q_fine in the closed ball of
/// radius q^(-d/s) about the lattice point b / q, written with the integer
/// numerator of the squared distance.
inline bool lattice_within(std::int64_t dist2_numerator, std::int64_t q_fine, std::int64_t q, int d, double s) {
  const double denom = static_cast<double>(q_fine) * static_cast<double>(q);
  return static_cast<double>(dist2_numerator) <= denom * denom * neighborhood_radius_sq(q, d, s);
}

struct FractalBuild {
  DiscreteMeasure measure;
  std::vector<Vec3> centers;                // surviving finest-stage lattice points
  std::vector<std::size_t> survivors;       // candidates left after each stage test
  std::vector<std::int64_t> q_sequence;
};

namespace detail {

inline bool point_in_stage(const Vec3& p, std::int64_t q, int d, double s) {
  const double qd = static_cast<double>(q);
  auto nearest = [qd](double c) { return std::clamp(std::round(c * qd), 0.0, qd) / qd; };
  const Vec3 b{nearest(p.x), nearest(p.y), nearest(p.z)};
  return distance2(p, b) <= neighborhood_radius_sq(q, d, s);
}

}  // namespace detail

inline FractalBuild build_fractal(const FractalSpec& spec) {
  if (spec.stage > 3) throw Error("build_fractal_measure: stage must be <= 3");
  const auto q = resolve_q_sequence(spec);
  const std::int64_t qk = q.back();
  const auto k = static_cast<std::size_t>(spec.stage);

  std::vector<std::array<std::int64_t, 3>> alive;
  for (std::int64_t a = 0; a <= qk; ++a)
    for (std::int64_t b = 0; b <= qk; ++b)
      for (std::int64_t c = 0; c <= qk; ++c) alive.push_back({a, b, c});

  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const std::int64_t qi = q[i];
    std::vector<std::array<std::int64_t, 3>> next;
    for (const auto& cell : alive) {
      std::int64_t num = 0;
      for (std::int64_t a : cell) {
        // nearest q_i-lattice index to a / qk, rounding half up
        const std::int64_t b = std::clamp<std::int64_t>((2 * a * qi + qk) / (2 * qk), 0, qi);
        const std::int64_t diff = a * qi - b * qk;
        num += diff * diff;
      }
      if (lattice_within(num, qk, qi, spec.d, spec.s)) next.push_back(cell);
    }
    alive = std::move(next);
    survivors.push_back(alive.size());
    if (alive.empty()) throw Error("build_fractal_measure: intersection emptied at stage " + std::to_string(i + 1));
  }
  survivors.push_back(alive.size());  // the finest stage keeps all its own lattice points

  std::vector<Vec3> centers;
  centers.reserve(alive.size());
  const double qkd = static_cast<double>(qk);
  for (const auto& cell : alive) {
    centers.push_back({static_cast<double>(cell[0]) / qkd, static_cast<double>(cell[1]) / qkd,
                       static_cast<double>(cell[2]) / qkd});
  }

  MeasureMeta meta{"fractal",
                   {{"d", spec.d},
                    {"s", spec.s},
                    {"stage", spec.stage},
                    {"q_sequence", q},
                    {"neighborhood", "euclidean ball"},
                    {"fill", spec.fill}}};

  if (spec.fill == 0) {
    std::vector<double> weights(centers.size(), 1.0);
    return {DiscreteMeasure::normalized(centers, std::move(weights), std::move(meta)), centers, survivors, q};
  }

  meta.params["fill_seed"] = spec.fill_seed;
  const double radius = std::sqrt(neighborhood_radius_sq(qk, spec.d, spec.s));
  RngState rng(spec.fill_seed);
  std::vector<Vec3> points;
  points.reserve(centers.size() * static_cast<std::size_t>(spec.fill));
  const long max_attempts = 10000L * spec.fill;
  for (const auto& c : centers) {
    int accepted = 0;
    long attempts = 0;
    while (accepted < spec.fill) {
      if (++attempts > max_attempts) {
        throw Error("build_fractal_measure: rejection sampling stalled near a stage-" + std::to_string(spec.stage) +
                    " center");
      }
      Vec3 dir{rng.normal(), rng.normal(), rng.normal()};
      const double n = dir.norm();
      if (!(n > 0.0)) continue;
      const Vec3 p = c + dir * (radius * std::cbrt(rng.uniform()) / n);
      bool inside = true;
      for (std::size_t i = 0; i + 1 < k && inside; ++i) inside = detail::point_in_stage(p, q[i], spec.d, spec.s);
      if (!inside) continue;
      points.push_back(p);
      ++accepted;
    }
  }
  std::vector<double> weights(points.size(), 1.0);
  return {DiscreteMeasure::normalized(std::move(points), std::move(weights), std::move(meta)), centers, survivors, q};
}

inline DiscreteMeasure build_fractal_measure(const FractalSpec& spec) { return build_fractal(spec).measure; }

}  // namespace arlab
