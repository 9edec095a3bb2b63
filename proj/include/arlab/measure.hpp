#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "arlab/geometry.hpp"
#include "arlab/numeric.hpp"

namespace arlab {

/// Provenance of a measure: which builder produced it and with what inputs.
struct MeasureMeta {
  std::string builder;
  nlohmann::json params = nlohmann::json::object();
};

/// Weighted point cloud standing in for a finite Borel measure.
///
/// Invariants: at least one point, one nonnegative finite weight per point,
/// finite coordinates, and mass() equal to the compensated weight total.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<Vec3> points, std::vector<double> weights, MeasureMeta meta = {})
      : points_(std::move(points)), weights_(std::move(weights)), meta_(std::move(meta)) {
    if (points_.empty()) throw Error("DiscreteMeasure: needs at least one point");
    if (points_.size() != weights_.size()) throw Error("DiscreteMeasure: points/weights size mismatch");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!points_[i].finite()) throw Error("DiscreteMeasure: non-finite point at index " + std::to_string(i));
      if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
        throw Error("DiscreteMeasure: invalid weight at index " + std::to_string(i));
      }
    }
    mass_ = compensated_total(weights_);
  }

  /// Builds a probability measure from nonnegative weights.
  static DiscreteMeasure normalized(std::vector<Vec3> points, std::vector<double> weights, MeasureMeta meta = {}) {
    CompensatedSum total;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw Error("DiscreteMeasure: weights must be finite and >= 0");
      total.add(w);
    }
    const double t = total.value();
    if (!(t > 0.0)) throw Error("DiscreteMeasure: weights are all zero");
    for (double& w : weights) w /= t;
    return DiscreteMeasure(std::move(points), std::move(weights), std::move(meta));
  }

  std::size_t size() const { return points_.size(); }
  const std::vector<Vec3>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  double mass() const { return mass_; }
  const MeasureMeta& meta() const { return meta_; }

  /// Image of the measure under one global rotation.
  DiscreteMeasure rotated(const Rotation& r) const {
    const Mat3 m = r.matrix();
    std::vector<Vec3> pts;
    pts.reserve(points_.size());
    for (const auto& p : points_) pts.push_back(mul(m, p));
    MeasureMeta meta = meta_;
    meta.params["rotated"] = true;
    return DiscreteMeasure(std::move(pts), weights_, std::move(meta));
  }

  Vec3 centroid() const {
    CompensatedSum x, y, z;
    for (std::size_t i = 0; i < size(); ++i) {
      x.add(weights_[i] * points_[i].x);
      y.add(weights_[i] * points_[i].y);
      z.add(weights_[i] * points_[i].z);
    }
    return Vec3{x.value(), y.value(), z.value()} / mass_;
  }

 private:
  std::vector<Vec3> points_;
  std::vector<double> weights_;
  MeasureMeta meta_;
  double mass_ = 0.0;
};

/// A measure with a real density f carried alongside the weights; together
/// they represent f dmu.
struct DensityMeasure {
  DiscreteMeasure measure;
  std::vector<double> values;  // f(p_j)
  std::string density_name;
};

/// Attaches the density f to m. The weights are left untouched.
inline DensityMeasure density_apply(const DiscreteMeasure& m, const std::function<double(const Vec3&)>& f,
                                    std::string name = "custom") {
  std::vector<double> values;
  values.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double v = f(m.points()[i]);
    if (!std::isfinite(v)) throw Error("density_apply: non-finite density at point " + std::to_string(i));
    values.push_back(v);
  }
  return DensityMeasure{m, std::move(values), std::move(name)};
}

/// ||f||_{L^2(mu)}^2 = sum_j w_j f_j^2.
inline double l2_norm_squared(const DensityMeasure& dm) {
  CompensatedSum s;
  const auto& w = dm.measure.weights();
  for (std::size_t j = 0; j < w.size(); ++j) s.add(w[j] * dm.values[j] * dm.values[j]);
  return s.value();
}

inline double l2_norm(const DensityMeasure& dm) { return std::sqrt(l2_norm_squared(dm)); }

/// ||f||_{L^1(mu)} = sum_j w_j |f_j|, the trivial bound for the extension transform.
inline double l1_norm(const DensityMeasure& dm) {
  CompensatedSum s;
  const auto& w = dm.measure.weights();
  for (std::size_t j = 0; j < w.size(); ++j) s.add(w[j] * std::abs(dm.values[j]));
  return s.value();
}

}  // namespace arlab
