#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "arlab/builders.hpp"
#include "arlab/oracle.hpp"
#include "arlab/oscillatory.hpp"

using namespace arlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

DensityMeasure ones(const DiscreteMeasure& m) {
  return density_apply(m, [](const Vec3&) { return 1.0; });
}

// (sigma_t * phi_delta)(r e3) by Fibonacci quadrature of the normalized sphere.
double kernel_by_quadrature(double r, double t, double delta, int n) {
  const auto s = build_sphere_measure(n);
  CompensatedSum acc;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec3 d = Vec3{0.0, 0.0, r} - s.points()[i] * t;
    acc.add(s.weights()[i] * std::exp(-std::numbers::pi * d.norm2() / (delta * delta)));
  }
  return acc.value() / (delta * delta * delta);
}

}  // namespace

TEST_CASE("extension transform at the origin is the mass", "[oscillatory]") {
  RngState rng(1);
  const auto m = build_sphere_measure(1000);
  const auto theta = sample_haar_rotation(rng);
  const auto v = extension_transform(ones(m), theta, {0.0, 0.0, 0.0});
  REQUIRE_THAT(v.real(), WithinAbs(1.0, 1e-14));
  REQUIRE(v.imag() == 0.0);
}

TEST_CASE("extension transform of the sphere matches the closed form", "[oscillatory]") {
  RngState rng(2);
  const auto dm = ones(build_sphere_measure(4000));
  for (int k = 0; k < 5; ++k) {
    const auto theta = sample_haar_rotation(rng);
    const Vec3 dir = apply_rotation(sample_haar_rotation(rng), {0.0, 0.0, 1.0});
    const auto v = extension_transform(dm, theta, dir * 0.25);
    REQUIRE_THAT(v.real(), WithinAbs(2.0 / std::numbers::pi, 1e-2));
    REQUIRE_THAT(sphere_normalized_ft(0.25), WithinAbs(2.0 / std::numbers::pi, 1e-15));
  }
}

TEST_CASE("extension transform obeys the L1 bound", "[oscillatory]") {
  RngState rng(3);
  const auto m = build_graph_measure(make_profile("cone"), 40);
  const auto dm = density_apply(m, [](const Vec3& p) { return p.x - 0.3; });
  const double bound = l1_norm(dm);
  for (int k = 0; k < 20; ++k) {
    const Vec3 x{4.0 * rng.normal(), 4.0 * rng.normal(), 4.0 * rng.normal()};
    REQUIRE(std::abs(extension_transform(dm, sample_haar_rotation(rng), x)) <= bound * (1.0 + 1e-12));
  }
}

TEST_CASE("closed-form sphere transform", "[oscillatory]") {
  REQUIRE_THAT(sphere_surface_ft(0.0), WithinAbs(4.0 * std::numbers::pi, 1e-15));
  REQUIRE_THAT(sphere_surface_ft(0.5), WithinAbs(0.0, 1e-14));
  // the small-argument series joins the direct formula smoothly
  REQUIRE_THAT(sphere_surface_ft(0.99e-4), WithinRel(2.0 * std::sin(kTwoPi * 0.99e-4) / 0.99e-4, 1e-12));
  REQUIRE_THAT(sphere_surface_ft(1.01e-4), WithinRel(sphere_surface_ft(0.99e-4), 1e-6));
  double sup = 0.0;
  for (double k : logspace(5.0, 50.0, 200)) sup = std::max(sup, std::abs(sphere_surface_ft(k)) * k);
  REQUIRE(sup <= 2.0 + 1e-9);
}

TEST_CASE("quadrature oracle agrees with the closed form", "[oscillatory][oracle]") {
  REQUIRE_THAT(quadrature_sphere_ft({0.0, 0.0, 0.0}, 10000), WithinAbs(4.0 * std::numbers::pi, 1e-9));
  const Vec3 d{0.48, 0.6, 0.64};
  REQUIRE_THAT(quadrature_sphere_ft(d * 3.0, 10000), WithinAbs(sphere_surface_ft(3.0), 1e-3));
  REQUIRE_THAT(quadrature_sphere_ft(d * 10.0, 100000), WithinAbs(sphere_surface_ft(10.0), 1e-2));
  REQUIRE_THROWS_AS(quadrature_sphere_ft(d, 100), Error);
}

TEST_CASE("mollifier kernel matches direct quadrature", "[oscillatory]") {
  for (double r : {0.0, 0.3, 0.95, 1.0, 1.04}) {
    REQUIRE_THAT(shell_mollifier_kernel(r, 1.0, 0.1), WithinRel(kernel_by_quadrature(r, 1.0, 0.1, 200000), 2e-3));
  }
  REQUIRE_THAT(shell_mollifier_kernel(0.0, 0.5, 0.5), WithinRel(8.0 * std::exp(-std::numbers::pi), 1e-14));
}

TEST_CASE("mollified identity for a single atom", "[oscillatory]") {
  const auto m = build_atomic_measure({{{0.2, 0.1, 0.0}, 1.0}});
  MollifierSpec spec;
  spec.delta = 0.5;
  spec.freq_cutoff = 20.0;
  spec.mc_samples = 200000;
  RngState rng(4);
  const auto c = mollified_identity_check(m, 0.5, spec, rng);
  REQUIRE_THAT(c.physical, WithinRel(shell_mollifier_kernel(0.0, 0.5, 0.5), 1e-14));
  REQUIRE(std::abs(c.frequency - c.physical) <= 5.0 * c.frequency_stderr);
  REQUIRE_FALSE(c.inconclusive);
}

TEST_CASE("two atoms at distance t: cross term dominates", "[oscillatory]") {
  const auto m = build_atomic_measure({{{0, 0, 0}, 1.0}, {{1, 0, 0}, 1.0}});
  const double phys = mollified_physical_side(m, 1.0, 0.05);
  REQUIRE_THAT(phys, WithinRel(2.0 * 0.25 * shell_mollifier_kernel(1.0, 1.0, 0.05), 1e-12));
}

TEST_CASE("a vanishing target is reported as inconclusive", "[oscillatory]") {
  const auto m = build_atomic_measure({{{0, 0, 0}, 1.0}});
  RngState rng(5);
  MollifierSpec spec;
  spec.mc_samples = 20000;
  const auto c = mollified_identity_check(m, 1.0, spec, rng);
  REQUIRE(c.physical == 0.0);
  REQUIRE(c.inconclusive);
}

TEST_CASE("mollified identity on the sphere", "[oscillatory]") {
  const auto m = build_sphere_measure(2000);
  MollifierSpec spec;
  spec.mc_samples = 50000;
  RngState rng(6);
  const auto c = mollified_identity_check(m, 1.0, spec, rng);
  REQUIRE_FALSE(c.inconclusive);
  REQUIRE(c.relative_gap() <= 0.10);
}

TEST_CASE("mollifier validation", "[oscillatory]") {
  const auto m = build_atomic_measure({{{0, 0, 0}, 1.0}});
  RngState rng(7);
  MollifierSpec spec;
  REQUIRE_THROWS_AS(mollified_identity_check(m, 0.25, spec, rng), Error);
  REQUIRE_THROWS_AS(mollified_identity_check(m, 2.5, spec, rng), Error);
  spec.freq_cutoff = 50.0;  // below 5 / delta
  REQUIRE_THROWS_AS(mollified_identity_check(m, 1.0, spec, rng), Error);
  spec = MollifierSpec{};
  spec.delta = 0.0;
  REQUIRE_THROWS_AS(spec.validate(), Error);
}
