#pragma once

// Uniform-grid cell list over a point cloud.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "arlab/geometry.hpp"
#include "arlab/measure.hpp"

namespace arlab {

class CellIndex {
 public:
  struct Cell {
    std::array<std::int64_t, 3> key{};
    std::uint32_t begin = 0;  // range into the cell-sorted arrays
    std::uint32_t end = 0;
  };

  CellIndex(const DiscreteMeasure& m, double h) : h_(h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw Error("CellIndex: cell size must be positive");
    const auto& pts = m.points();
    if (pts.size() >= std::numeric_limits<std::uint32_t>::max()) throw Error("CellIndex: too many points");
    lo_ = pts.front();
    Vec3 hi = pts.front();
    for (const auto& p : pts) {
      lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y), std::min(lo_.z, p.z)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    for (double extent : {hi.x - lo_.x, hi.y - lo_.y, hi.z - lo_.z}) {
      if (extent / h_ > static_cast<double>(kAxisLimit - 2)) throw Error("CellIndex: cell size too small for the scene");
    }

    const std::size_t n = pts.size();
    std::vector<std::int64_t> keys(n);
    for (std::size_t i = 0; i < n; ++i) keys[i] = pack(coords_of(pts[i]));
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0u);
    std::stable_sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b]; });

    xs_.resize(n);
    ys_.resize(n);
    zs_.resize(n);
    ws_.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
      const auto i = order_[s];
      xs_[s] = pts[i].x;
      ys_[s] = pts[i].y;
      zs_[s] = pts[i].z;
      ws_[s] = m.weights()[i];
    }
    for (std::size_t s = 0; s < n;) {
      std::size_t e = s;
      while (e < n && keys[order_[e]] == keys[order_[s]]) ++e;
      Cell c;
      c.key = coords_of(pts[order_[s]]);
      c.begin = static_cast<std::uint32_t>(s);
      c.end = static_cast<std::uint32_t>(e);
      lookup_.emplace(keys[order_[s]], cells_.size());
      cells_.push_back(c);
      s = e;
    }
#ifdef ARLAB_FAULT_INJECTION
    // Deliberately corrupt the index: the first cell loses its last member.
    if (!cells_.empty() && cells_.front().end > cells_.front().begin) --cells_.front().end;
#endif
  }

  double cell_size() const { return h_; }
  std::size_t size() const { return order_.size(); }
  const std::vector<Cell>& cells() const { return cells_; }

  // Cell-sorted structure-of-arrays copies of the measure.
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  const std::vector<double>& zs() const { return zs_; }
  const std::vector<double>& ws() const { return ws_; }
  /// Sorted position -> index in the source measure.
  const std::vector<std::uint32_t>& order() const { return order_; }

  std::array<std::int64_t, 3> coords_of(const Vec3& p) const {
    return {static_cast<std::int64_t>(std::floor((p.x - lo_.x) / h_)),
            static_cast<std::int64_t>(std::floor((p.y - lo_.y) / h_)),
            static_cast<std::int64_t>(std::floor((p.z - lo_.z) / h_))};
  }

  /// Position of the cell with these integer coordinates in cells(), if occupied.
  const Cell* find(const std::array<std::int64_t, 3>& key) const {
    for (auto c : key) {
      if (c < 0 || c >= kAxisLimit) return nullptr;
    }
    const auto it = lookup_.find(pack(key));
    return it == lookup_.end() ? nullptr : &cells_[it->second];
  }

  /// Source indices j with |p - p_j| <= r, ascending.
  std::vector<std::size_t> query_ball(const Vec3& p, double r) const {
    std::vector<std::size_t> out;
    const auto c = coords_of(p);
    const auto reach = static_cast<std::int64_t>(std::ceil(r / h_));
    const double r2 = r * r;
    for (std::int64_t dx = -reach; dx <= reach; ++dx)
      for (std::int64_t dy = -reach; dy <= reach; ++dy)
        for (std::int64_t dz = -reach; dz <= reach; ++dz) {
          const Cell* cell = find({c[0] + dx, c[1] + dy, c[2] + dz});
          if (!cell) continue;
          for (auto s = cell->begin; s < cell->end; ++s) {
            const double ex = xs_[s] - p.x, ey = ys_[s] - p.y, ez = zs_[s] - p.z;
            if (ex * ex + ey * ey + ez * ez <= r2) out.push_back(order_[s]);
          }
        }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static constexpr std::int64_t kAxisLimit = std::int64_t{1} << 21;

  static std::int64_t pack(const std::array<std::int64_t, 3>& c) {
    return (c[0] << 42) | (c[1] << 21) | c[2];
  }

  double h_;
  Vec3 lo_;
  std::vector<std::uint32_t> order_;
  std::vector<double> xs_, ys_, zs_, ws_;
  std::vector<Cell> cells_;
  std::unordered_map<std::int64_t, std::size_t> lookup_;
};

/// Distance from every point to its nearest distinct neighbor (source order).
/// Coincident points report 0. Single-point measures report +inf.
inline std::vector<double> nearest_neighbor_distances(const DiscreteMeasure& m) {
  const std::size_t n = m.size();
  std::vector<double> out(n, std::numeric_limits<double>::infinity());
  if (n < 2) return out;
  const auto& pts = m.points();
  Vec3 lo = pts.front(), hi = pts.front();
  for (const auto& p : pts) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  const double extent = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
  if (!(extent > 0.0)) {
    std::fill(out.begin(), out.end(), 0.0);
    return out;
  }
  // About one point per cell for surface-like clouds.
  const double h = extent / std::max(1.0, std::sqrt(static_cast<double>(n)));
  const CellIndex idx(m, h);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = idx.coords_of(pts[i]);
    double best2 = std::numeric_limits<double>::infinity();
    for (std::int64_t ring = 0;; ++ring) {
      // Points in ring r or beyond are at least (r-1)*h away.
      const double reach = static_cast<double>(ring - 1) * h;
      if (ring > 0 && best2 <= reach * reach) break;
      if (ring > 0 && reach > 2.0 * extent) break;
      for (std::int64_t dx = -ring; dx <= ring; ++dx)
        for (std::int64_t dy = -ring; dy <= ring; ++dy)
          for (std::int64_t dz = -ring; dz <= ring; ++dz) {
            if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring) continue;
            const auto* cell = idx.find({c[0] + dx, c[1] + dy, c[2] + dz});
            if (!cell) continue;
            for (auto s = cell->begin; s < cell->end; ++s) {
              if (idx.order()[s] == i) continue;
              const double ex = idx.xs()[s] - pts[i].x, ey = idx.ys()[s] - pts[i].y, ez = idx.zs()[s] - pts[i].z;
              best2 = std::min(best2, ex * ex + ey * ey + ez * ez);
            }
          }
    }
    out[i] = std::sqrt(best2);
  }
  return out;
}

/// Median nearest-neighbor distance: the discretization floor of a measure.
inline double mesh_floor(const DiscreteMeasure& m) {
  auto d = nearest_neighbor_distances(m);
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  if (d.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(d.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace arlab
