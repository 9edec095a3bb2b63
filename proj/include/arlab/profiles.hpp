#pragma once

// Graphing functions G over a disk in the base plane, with pointwise gradients.

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arlab/numeric.hpp"

namespace arlab {

enum class ProfileKind { flat, paraboloid, cone, sqrt_cusp, flat_bump, sphere_cap, custom };

struct SurfaceProfile {
  using Scalar2 = std::function<double(double, double)>;
  using Gradient2 = std::function<std::array<double, 2>(double, double)>;

  ProfileKind kind = ProfileKind::custom;
  std::string name;
  Scalar2 evaluate;
  Gradient2 gradient;
  double domain_radius = 1.0;
  // Isolated points where the gradient is undefined. Grid nodes never land
  // on them for even resolutions (half-cell offset).
  std::vector<std::array<double, 2>> singular_points;
  bool lipschitz = true;
};

namespace detail {
inline double radius(double y1, double y2) { return std::hypot(y1, y2); }
}  // namespace detail

/// The built-in experiment profiles, all over the unit disk:
///   flat        G = 0
///   paraboloid  G = |y|^2
///   cone        G = |y|            Lipschitz, not C^1 at 0
///   sqrt        G = |y|^(1/2)      W^1_1 but unbounded gradient at 0
///   flat-bump   G = exp(-1/|y|^2)  vanishes to infinite order at 0
///   sphere-cap  G = sqrt(1-|y|^2)  upper unit hemisphere
inline SurfaceProfile make_profile(ProfileKind kind) {
  SurfaceProfile p;
  p.kind = kind;
  switch (kind) {
    case ProfileKind::flat:
      p.name = "flat";
      p.evaluate = [](double, double) { return 0.0; };
      p.gradient = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
      break;
    case ProfileKind::paraboloid:
      p.name = "paraboloid";
      p.evaluate = [](double a, double b) { return a * a + b * b; };
      p.gradient = [](double a, double b) { return std::array<double, 2>{2.0 * a, 2.0 * b}; };
      break;
    case ProfileKind::cone:
      p.name = "cone";
      p.evaluate = [](double a, double b) { return detail::radius(a, b); };
      p.gradient = [](double a, double b) {
        const double r = detail::radius(a, b);
        return std::array<double, 2>{a / r, b / r};
      };
      p.singular_points = {{0.0, 0.0}};
      break;
    case ProfileKind::sqrt_cusp:
      p.name = "sqrt";
      p.evaluate = [](double a, double b) { return std::sqrt(detail::radius(a, b)); };
      p.gradient = [](double a, double b) {
        const double r = detail::radius(a, b);
        const double scale = 0.5 / (r * std::sqrt(r));
        return std::array<double, 2>{a * scale, b * scale};
      };
      p.singular_points = {{0.0, 0.0}};
      p.lipschitz = false;
      break;
    case ProfileKind::flat_bump:
      p.name = "flat-bump";
      p.evaluate = [](double a, double b) {
        const double r2 = a * a + b * b;
        return r2 == 0.0 ? 0.0 : std::exp(-1.0 / r2);
      };
      p.gradient = [](double a, double b) {
        const double r2 = a * a + b * b;
        if (r2 == 0.0) return std::array<double, 2>{0.0, 0.0};
        const double scale = std::exp(-1.0 / r2) * 2.0 / (r2 * r2);
        return std::array<double, 2>{a * scale, b * scale};
      };
      break;
    case ProfileKind::sphere_cap:
      p.name = "sphere-cap";
      p.evaluate = [](double a, double b) { return std::sqrt(std::max(0.0, 1.0 - (a * a + b * b))); };
      p.gradient = [](double a, double b) {
        const double h = std::sqrt(1.0 - (a * a + b * b));
        return std::array<double, 2>{-a / h, -b / h};
      };
      p.lipschitz = false;  // gradient blows up at the rim
      break;
    case ProfileKind::custom:
      throw Error("make_profile: custom profiles are assembled by the caller");
  }
  return p;
}

inline std::optional<ProfileKind> parse_profile_kind(std::string_view name) {
  if (name == "flat") return ProfileKind::flat;
  if (name == "paraboloid") return ProfileKind::paraboloid;
  if (name == "cone") return ProfileKind::cone;
  if (name == "sqrt") return ProfileKind::sqrt_cusp;
  if (name == "flat-bump") return ProfileKind::flat_bump;
  if (name == "sphere-cap") return ProfileKind::sphere_cap;
  return std::nullopt;
}

inline SurfaceProfile make_profile(std::string_view name) {
  const auto kind = parse_profile_kind(name);
  if (!kind) throw Error("unknown profile '" + std::string(name) + "'");
  return make_profile(*kind);
}

}  // namespace arlab
