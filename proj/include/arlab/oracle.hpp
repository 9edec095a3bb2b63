#pragma once

// Brute-force references for the fast paths. Nothing in here shares code with
// the kernels it checks beyond the membership predicates that define the
// quantities.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "arlab/annulus.hpp"
#include "arlab/builders.hpp"
#include "arlab/measure.hpp"

namespace arlab {

struct OracleReport {
  std::string name;
  double fast_value = 0.0;
  double oracle_value = 0.0;
  double abs_diff = 0.0;
  double rel_diff = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  static OracleReport compare(std::string name, double fast, double oracle, double abs_tolerance) {
    OracleReport r;
    r.name = std::move(name);
    r.fast_value = fast;
    r.oracle_value = oracle;
    r.abs_diff = std::abs(fast - oracle);
    r.rel_diff = oracle != 0.0 ? r.abs_diff / std::abs(oracle) : r.abs_diff;
    r.tolerance = abs_tolerance;
    r.pass = r.abs_diff <= abs_tolerance;
    return r;
  }
};

inline void to_json(nlohmann::json& j, const OracleReport& r) {
  j = {{"name", r.name},         {"fast_value", r.fast_value}, {"oracle_value", r.oracle_value},
       {"abs_diff", r.abs_diff}, {"rel_diff", r.rel_diff},     {"tolerance", r.tolerance},
       {"pass", r.pass}};
}

/// O(N^2) annulus measure over ordered pairs, source-index order.
inline double brute_force_annulus(const DiscreteMeasure& m, const AnnulusQuery& q) {
  q.validate();
  if (m.size() > 10000) throw Error("brute_force_annulus: limited to 10^4 points");
  const double lo2 = q.t * q.t;
  const double hi2 = q.outer() * q.outer();
  const auto& p = m.points();
  const auto& w = m.weights();
  CompensatedSum total;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double inner = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j == i) continue;
      const double dx = p[j].x - p[i].x, dy = p[j].y - p[i].y, dz = p[j].z - p[i].z;
      if (in_annulus(dx * dx + dy * dy + dz * dz, lo2, hi2)) inner += w[j];
    }
    if (inner != 0.0) total.add(w[i] * inner);
  }
  return total.value();
}

/// Fibonacci-lattice quadrature of the unnormalized sphere transform
/// integral over S^2 of exp(-2 pi i x.xi) dsigma(x) (mass 4 pi). Real part.
inline double quadrature_sphere_ft(const Vec3& xi, int n) {
  if (n < 1000) throw Error("quadrature_sphere_ft: need at least 1000 nodes");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  CompensatedSum re;
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double rho = std::sqrt(1.0 - z * z);
    const double phi = golden * i;
    const Vec3 x{rho * std::cos(phi), rho * std::sin(phi), z};
    re.add(std::cos(2.0 * std::numbers::pi * x.dot(xi)));
  }
  return re.value() * 4.0 * std::numbers::pi / n;
}

/// Every q_k-lattice point of [0,1]^3 tested against every earlier stage by a
/// full scan of that stage's lattice. Returns the survivors in lexicographic
/// order of their integer coordinates.
inline std::vector<Vec3> exhaustive_fractal_scan(const FractalSpec& spec) {
  if (spec.stage > 2) throw Error("exhaustive_fractal_scan: stage must be <= 2");
  const auto q = resolve_q_sequence(spec);
  const std::int64_t qk = q.back();
  std::vector<Vec3> out;
  for (std::int64_t a = 0; a <= qk; ++a)
    for (std::int64_t b = 0; b <= qk; ++b)
      for (std::int64_t c = 0; c <= qk; ++c) {
        bool keep = true;
        for (std::size_t i = 0; i + 1 < q.size() && keep; ++i) {
          const std::int64_t qi = q[i];
          bool near = false;
          for (std::int64_t u = 0; u <= qi && !near; ++u)
            for (std::int64_t v = 0; v <= qi && !near; ++v)
              for (std::int64_t w = 0; w <= qi && !near; ++w) {
                const std::int64_t ex = a * qi - u * qk, ey = b * qi - v * qk, ez = c * qi - w * qk;
                near = lattice_within(ex * ex + ey * ey + ez * ez, qk, qi, spec.d, spec.s);
              }
          keep = near;
        }
        if (keep) {
          const double d = static_cast<double>(qk);
          out.push_back({static_cast<double>(a) / d, static_cast<double>(b) / d, static_cast<double>(c) / d});
        }
      }
  return out;
}

/// O(N^2) nearest-neighbor sets for checking CellIndex::query_ball.
inline std::vector<std::size_t> brute_force_ball(const DiscreteMeasure& m, const Vec3& p, double r) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (distance2(m.points()[j], p) <= r * r) out.push_back(j);
  }
  return out;
}

}  // namespace arlab
