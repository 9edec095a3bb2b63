#pragma once

// Mixed L^4(R^3, L^2(SO(3))) norm of the extension transform on a truncated
// grid, the restriction ratio against ||f||_{L^2(mu)}, and discrete Riesz
// energies.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "arlab/geometry.hpp"
#include "arlab/measure.hpp"
#include "arlab/numeric.hpp"
#include "arlab/oscillatory.hpp"
#include "arlab/parallel.hpp"
#include "arlab/rng.hpp"

namespace arlab {

/// Cube [-R, R]^3 sampled at n cell centers per axis.
struct GridSpec {
  double R = 8.0;
  int n = 48;

  void validate() const {
    if (!(R > 0.0)) throw Error("GridSpec: R must be positive");
    if (n < 8) throw Error("GridSpec: need at least 8 nodes per axis");
  }
  double spacing() const { return 2.0 * R / n; }
  double weight() const { return spacing() * spacing() * spacing(); }
  double node(int k) const { return -R + (static_cast<double>(k) + 0.5) * spacing(); }
};

/// Per-node rotation average (1/M) sum_theta |(f mu_theta)^(x)|^2 on the full
/// grid, node-major (index (k * n + l) * n + m for node (x_k, y_l, z_m)).
struct InnerField {
  GridSpec grid;
  std::vector<double> values;
};

namespace detail {

inline void phase_row(double coord_scale, const GridSpec& grid, int count, std::complex<double>* out) {
  for (int k = 0; k < count; ++k) {
    const double phase = -kTwoPi * grid.node(k) * coord_scale;
    out[k] = {std::cos(phase), std::sin(phase)};
  }
}

}  // namespace detail

/// Evaluates the inner L^2(SO(3)) average at every grid node for the given
/// rotations. The transform is summed directly; its phase factorizes over
/// the three axes, so each rotation costs one complex matrix product of
/// (n^2 x points) by (points x n/2). f is real, so |F(-x)| = |F(x)| and only
/// the lower half of the z-planes is computed.
inline InnerField inner_l2_field(const DensityMeasure& dm, const GridSpec& grid, const std::vector<Rotation>& rotations) {
  grid.validate();
  if (rotations.empty()) throw Error("inner_l2_field: no rotations");
  using CMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>;

  const int n = grid.n;
  const int half = (n + 1) / 2;
  const std::size_t rows = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  const auto& pts = dm.measure.points();
  const auto& w = dm.measure.weights();

  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (dm.values[j] * w[j] != 0.0) active.push_back(j);
  }

  std::vector<double> half_field(rows * static_cast<std::size_t>(half), 0.0);
  if (!active.empty()) {
    const auto points_count = static_cast<Eigen::Index>(active.size());
    // Fixed row blocks keep every product's shape independent of the worker count.
    constexpr std::size_t kRowBlock = 256;
    const std::size_t blocks = (rows + kRowBlock - 1) / kRowBlock;
    const double inv_m = 1.0 / static_cast<double>(rotations.size());

    CMatrix xphase(points_count, n), yphase(points_count, n), zphase(points_count, half);
    std::vector<double> coeff(active.size());
    for (std::size_t a = 0; a < active.size(); ++a) coeff[a] = dm.values[active[a]] * w[active[a]];

    for (const auto& theta : rotations) {
      const Mat3 r = theta.matrix();
      std::vector<std::complex<double>> row(static_cast<std::size_t>(n));
      for (std::size_t a = 0; a < active.size(); ++a) {
        const Vec3 q = mul(r, pts[active[a]]);
        const auto ia = static_cast<Eigen::Index>(a);
        detail::phase_row(q.x, grid, n, row.data());
        for (int k = 0; k < n; ++k) xphase(ia, k) = row[static_cast<std::size_t>(k)] * coeff[a];
        detail::phase_row(q.y, grid, n, row.data());
        for (int k = 0; k < n; ++k) yphase(ia, k) = row[static_cast<std::size_t>(k)];
        detail::phase_row(q.z, grid, half, row.data());
        for (int k = 0; k < half; ++k) zphase(ia, k) = row[static_cast<std::size_t>(k)];
      }

      parallel_chunks(blocks, [&](std::size_t b_begin, std::size_t b_end) {
        CMatrix lhs;
        CMatrix field;
        for (std::size_t b = b_begin; b < b_end; ++b) {
          const std::size_t r0 = b * kRowBlock;
          const std::size_t r1 = std::min(rows, r0 + kRowBlock);
          const auto block_rows = static_cast<Eigen::Index>(r1 - r0);
          lhs.resize(block_rows, points_count);
          for (std::size_t rr = r0; rr < r1; ++rr) {
            const auto k = static_cast<Eigen::Index>(rr / static_cast<std::size_t>(n));
            const auto l = static_cast<Eigen::Index>(rr % static_cast<std::size_t>(n));
            lhs.row(static_cast<Eigen::Index>(rr - r0)) =
                (xphase.col(k).array() * yphase.col(l).array()).transpose();
          }
          field.noalias() = lhs * zphase;
          for (std::size_t rr = r0; rr < r1; ++rr) {
            for (int m = 0; m < half; ++m) {
              half_field[rr * static_cast<std::size_t>(half) + static_cast<std::size_t>(m)] +=
                  std::norm(field(static_cast<Eigen::Index>(rr - r0), m)) * inv_m;
            }
          }
        }
      });
    }
  }

  InnerField out{grid, std::vector<double>(rows * static_cast<std::size_t>(n))};
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int m = 0; m < n; ++m) {
        // Nodes with m >= half are mirror images of (n-1-k, n-1-l, n-1-m).
        const bool lower = m < half;
        const int kk = lower ? k : n - 1 - k;
        const int ll = lower ? l : n - 1 - l;
        const int mm = lower ? m : n - 1 - m;
        const std::size_t src = (static_cast<std::size_t>(kk) * n + ll) * half + mm;
        out.values[(static_cast<std::size_t>(k) * n + l) * n + m] = half_field[src];
      }
  return out;
}

/// (sum over nodes of weight * inner^2)^(1/4), node-major compensated.
inline double mixed_norm_from_field(const InnerField& field) {
  CompensatedSum total;
  const double weight = field.grid.weight();
  for (double v : field.values) total.add(weight * v * v);
  return std::pow(total.value(), 0.25);
}

/// Truncated mixed norm for an explicit rotation sample.
inline double mixed_norm_lhs(const DensityMeasure& dm, const GridSpec& grid, const std::vector<Rotation>& rotations) {
  return mixed_norm_from_field(inner_l2_field(dm, grid, rotations));
}

/// Truncated mixed norm with M Haar rotations drawn from rng. The same
/// rotations serve every node.
inline double mixed_norm_lhs(const DensityMeasure& dm, const GridSpec& grid, std::size_t rotations_count,
                             RngState& rng) {
  if (rotations_count < 16) throw Error("mixed_norm_lhs: need at least 16 rotation samples");
  return mixed_norm_lhs(dm, grid, sample_haar_rotations(rotations_count, rng));
}

struct MixedNormReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  GridSpec grid;
  std::size_t rotations = 0;
  std::uint64_t seed = 0;
};

inline MixedNormReport restriction_ratio(const DensityMeasure& dm, const GridSpec& grid,
                                         const std::vector<Rotation>& rotations, std::uint64_t seed = 0) {
  MixedNormReport rep;
  rep.rhs = l2_norm(dm);
  if (!(rep.rhs > 0.0)) throw Error("restriction_ratio: f vanishes on the support of mu");
  rep.lhs = mixed_norm_lhs(dm, grid, rotations);
  rep.ratio = rep.lhs / rep.rhs;
  rep.grid = grid;
  rep.rotations = rotations.size();
  rep.seed = seed;
  return rep;
}

/// ratio = mixed norm / ||f||_{L^2(mu)}, rotations drawn from rng.
inline MixedNormReport restriction_ratio(const DensityMeasure& dm, const GridSpec& grid, std::size_t rotations_count,
                                         RngState& rng) {
  if (rotations_count < 16) throw Error("restriction_ratio: need at least 16 rotation samples");
  const std::uint64_t seed = rng.seed();
  return restriction_ratio(dm, grid, sample_haar_rotations(rotations_count, rng), seed);
}

/// Discrete Riesz s-energy: sum over ordered pairs i != j of
/// w_i w_j |p_i - p_j|^-s. Diagonal terms are excluded.
inline double riesz_energy(const DiscreteMeasure& m, double s_exp) {
  if (!(s_exp > 0.0)) throw Error("riesz_energy: exponent must be positive");
  const auto& p = m.points();
  const auto& w = m.weights();
  const std::size_t n = p.size();
  std::vector<double> rows(n, 0.0);
  const double half_s = s_exp / 2.0;
  parallel_chunks(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double inner = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d2 = distance2(p[i], p[j]);
        if (d2 == 0.0) {
          throw Error("riesz_energy: points " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
        }
        double k;
        if (s_exp == 2.0) {
          k = 1.0 / d2;
        } else if (s_exp == 1.0) {
          k = 1.0 / std::sqrt(d2);
        } else {
          k = std::pow(d2, -half_s);
        }
        inner += w[j] * k;
      }
      rows[i] = w[i] * inner;
    }
  });
  return 2.0 * compensated_total(rows);
}

}  // namespace arlab
