#pragma once

// Weighted annulus pair measure
//
//   A(t, eps) = sum over ordered pairs i != j of w_i w_j [t <= |p_i - p_j| <= t(1+eps)]
//
// evaluated with a cell list, its supremum over a grid of radii, and the
// log-log scaling fit of A against eps.
//
// Summation contract (shared with the brute-force oracle): for each source
// point i the hits are accumulated into a plain per-point sum of w_j, and the
// per-point sums are reduced in source-index order with Neumaier compensation
// as sum_i w_i * inner_i. Only the order inside inner_i differs between the
// indexed and brute-force paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "arlab/cell_index.hpp"
#include "arlab/measure.hpp"
#include "arlab/numeric.hpp"
#include "arlab/parallel.hpp"

namespace arlab {

struct AnnulusQuery {
  double t = 1.0;    // inner radius
  double eps = 0.1;  // relative width

  void validate() const {
    if (!(t > 0.0) || !std::isfinite(t)) throw Error("AnnulusQuery: t must be positive");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw Error("AnnulusQuery: eps must be positive");
  }
  double outer() const { return t * (1.0 + eps); }
};

/// Shared membership predicate on squared distances.
inline bool in_annulus(double d2, double lo2, double hi2) { return d2 >= lo2 && d2 <= hi2; }

/// Cell size used for a query: half the outer radius.
inline double default_cell_size(double t, double eps) { return t * (1.0 + eps) / 2.0; }

inline CellIndex build_spatial_index(const DiscreteMeasure& m, double h) { return CellIndex(m, h); }

/// A(t, eps_k) for every eps_k in one sweep over candidate pairs.
inline std::vector<double> annulus_measures(const DiscreteMeasure& m, double t, std::span<const double> eps,
                                            const CellIndex& idx) {
  if (eps.empty()) return {};
  for (double e : eps) AnnulusQuery{t, e}.validate();
  if (idx.size() != m.size()) throw Error("annulus_measures: index was built over a different measure");

  const std::size_t k_count = eps.size();
  // Bins sorted by outer radius so a hit fills a suffix of them.
  std::vector<std::size_t> by_width(k_count);
  for (std::size_t k = 0; k < k_count; ++k) by_width[k] = k;
  std::sort(by_width.begin(), by_width.end(), [&](std::size_t a, std::size_t b) { return eps[a] < eps[b]; });
  std::vector<double> hi2(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const double r = t * (1.0 + eps[by_width[k]]);
    hi2[k] = r * r;
  }
  const double lo2 = t * t;
  const double hi2_max = hi2.back();
  const double outer = t * (1.0 + eps[by_width.back()]);

  const double h = idx.cell_size();
  const auto reach = static_cast<std::int64_t>(std::ceil(outer / h)) + 1;
  const auto& xs = idx.xs();
  const auto& ys = idx.ys();
  const auto& zs = idx.zs();
  const auto& ws = idx.ws();
  const auto& cells = idx.cells();

  // inner[s * k_count + k]: hits of sorted point s in bin k.
  std::vector<double> inner(idx.size() * k_count, 0.0);

  parallel_chunks(cells.size(), [&](std::size_t c_begin, std::size_t c_end) {
    std::vector<double> acc(k_count);
    for (std::size_t ci = c_begin; ci < c_end; ++ci) {
      const auto& a = cells[ci];
      for (std::int64_t dx = -reach; dx <= reach; ++dx) {
        const double gx = std::max<double>(0.0, static_cast<double>(std::abs(dx)) - 1.0) * h;
        const double ex = (static_cast<double>(std::abs(dx)) + 1.0) * h;
        for (std::int64_t dy = -reach; dy <= reach; ++dy) {
          const double gy = std::max<double>(0.0, static_cast<double>(std::abs(dy)) - 1.0) * h;
          const double ey = (static_cast<double>(std::abs(dy)) + 1.0) * h;
          for (std::int64_t dz = -reach; dz <= reach; ++dz) {
            const double gz = std::max<double>(0.0, static_cast<double>(std::abs(dz)) - 1.0) * h;
            const double ez = (static_cast<double>(std::abs(dz)) + 1.0) * h;
            // Box-to-box distance bounds, padded against rounding in cell assignment.
            const double min2 = (gx * gx + gy * gy + gz * gz) * (1.0 - 1e-9);
            const double max2 = (ex * ex + ey * ey + ez * ez) * (1.0 + 1e-9);
            if (min2 > hi2_max || max2 < lo2) continue;
            const CellIndex::Cell* b = idx.find({a.key[0] + dx, a.key[1] + dy, a.key[2] + dz});
            if (!b) continue;
            for (auto s = a.begin; s < a.end; ++s) {
              const double px = xs[s], py = ys[s], pz = zs[s];
              std::fill(acc.begin(), acc.end(), 0.0);
              bool any = false;
              for (auto u = b->begin; u < b->end; ++u) {
                const double qx = xs[u] - px, qy = ys[u] - py, qz = zs[u] - pz;
                const double d2 = qx * qx + qy * qy + qz * qz;
                if (!in_annulus(d2, lo2, hi2_max) || u == s) continue;
                any = true;
                for (std::size_t k = k_count; k-- > 0;) {
                  if (d2 > hi2[k]) break;
                  acc[k] += ws[u];
                }
              }
              if (any) {
                for (std::size_t k = 0; k < k_count; ++k) inner[s * k_count + k] += acc[k];
              }
            }
          }
        }
      }
    }
  });

  // Reduce in source-index order.
  std::vector<std::size_t> pos(idx.size());
  for (std::size_t s = 0; s < idx.size(); ++s) pos[idx.order()[s]] = s;
  std::vector<CompensatedSum> totals(k_count);
  const auto& w = m.weights();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const std::size_t s = pos[i];
    for (std::size_t k = 0; k < k_count; ++k) {
      const double v = inner[s * k_count + k];
      if (v != 0.0) totals[k].add(w[i] * v);
    }
  }
  std::vector<double> out(k_count);
  for (std::size_t k = 0; k < k_count; ++k) out[by_width[k]] = totals[k].value();
  return out;
}

inline double annulus_measure(const DiscreteMeasure& m, const AnnulusQuery& q, const CellIndex& idx) {
  q.validate();
  const double e[1] = {q.eps};
  return annulus_measures(m, q.t, e, idx).front();
}

/// Convenience overload that builds an index with the default cell size.
inline double annulus_measure(const DiscreteMeasure& m, const AnnulusQuery& q) {
  q.validate();
  return annulus_measure(m, q, CellIndex(m, default_cell_size(q.t, q.eps)));
}

/// eps^-1 A(t, eps): the finite-eps stand-in for the rotation-averaged
/// self-convolution of the measure evaluated at radius t.
inline double averaged_convolution_value(const DiscreteMeasure& m, double t, double eps, const CellIndex& idx) {
  return annulus_measure(m, {t, eps}, idx) / eps;
}

inline double averaged_convolution_value(const DiscreteMeasure& m, double t, double eps) {
  return annulus_measure(m, {t, eps}) / eps;
}

struct SupAnnulusResult {
  double value = 0.0;    // max_t A(t, eps)/eps
  double t_at_max = 0.0;
  std::vector<double> t_grid;
  std::vector<double> ratios;
};

/// max over t in t_grid of A(t, eps)/eps. Radii below t_min are rejected:
/// the supremum is only taken away from a neighborhood of the origin.
inline SupAnnulusResult sup_annulus_ratio(const DiscreteMeasure& m, std::span<const double> t_grid, double eps,
                                          double t_min = 0.5) {
  if (t_grid.empty()) throw Error("sup_annulus_ratio: empty t grid");
  SupAnnulusResult r;
  r.t_grid.assign(t_grid.begin(), t_grid.end());
  r.value = -1.0;
  for (double t : t_grid) {
    if (t < t_min) throw Error("sup_annulus_ratio: t = " + std::to_string(t) + " is below t_min");
    const double ratio = averaged_convolution_value(m, t, eps);
    r.ratios.push_back(ratio);
    if (ratio > r.value) {
      r.value = ratio;
      r.t_at_max = t;
    }
  }
  return r;
}

enum class FloorPolicy {
  exclude,  // eps below 4 * mesh floor are flagged and left out of the fit
  keep,     // flagged but fitted anyway
};

struct ScalingFit {
  std::vector<double> eps_values;
  std::vector<double> A_values;
  std::vector<bool> below_floor;
  std::vector<bool> used;
  double mesh_floor = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

/// Least-squares fit of log A against log eps over the entries marked used.
inline void fit_scaling(ScalingFit& fit) {
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < fit.eps_values.size(); ++k) {
    if (!fit.used[k]) continue;
    if (!(fit.A_values[k] > 0.0)) {
      throw Error("scaling_exponent: annulus is empty at eps = " + std::to_string(fit.eps_values[k]) +
                  "; widen the eps window");
    }
    lx.push_back(std::log(fit.eps_values[k]));
    ly.push_back(std::log(fit.A_values[k]));
  }
  if (lx.size() < 2) throw Error("scaling_exponent: fewer than two admissible eps values");
  const LineFit lf = fit_line(lx, ly);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.residual = lf.residual;
}

/// Fit for externally supplied (eps, A) data; every entry is used.
inline ScalingFit fit_scaling(std::span<const double> eps, std::span<const double> values) {
  if (eps.size() != values.size()) throw Error("fit_scaling: size mismatch");
  ScalingFit fit;
  fit.eps_values.assign(eps.begin(), eps.end());
  fit.A_values.assign(values.begin(), values.end());
  fit.below_floor.assign(eps.size(), false);
  fit.used.assign(eps.size(), true);
  fit_scaling(fit);
  return fit;
}

/// Slope of log A(t, eps) against log eps. Slope near 1 is the A <~ eps
/// behavior; slope near 0 means mass concentrates on a sphere of radius t.
inline ScalingFit scaling_exponent(const DiscreteMeasure& m, double t, std::span<const double> eps_list,
                                   FloorPolicy policy = FloorPolicy::exclude) {
  if (eps_list.empty()) throw Error("scaling_exponent: empty eps list");
  for (std::size_t k = 1; k < eps_list.size(); ++k) {
    if (!(eps_list[k] < eps_list[k - 1])) throw Error("scaling_exponent: eps list must be strictly decreasing");
  }
  ScalingFit fit;
  fit.eps_values.assign(eps_list.begin(), eps_list.end());
  fit.mesh_floor = mesh_floor(m);
  for (double e : eps_list) {
    const bool below = e < 4.0 * fit.mesh_floor;
    fit.below_floor.push_back(below);
    fit.used.push_back(!below || policy == FloorPolicy::keep);
  }
  const CellIndex idx(m, default_cell_size(t, eps_list.front()));
  fit.A_values = annulus_measures(m, t, eps_list, idx);
  fit_scaling(fit);
  return fit;
}

}  // namespace arlab
