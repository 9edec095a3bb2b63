#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "arlab/builders.hpp"
#include "arlab/measure.hpp"
#include "arlab/oracle.hpp"
#include "arlab/oscillatory.hpp"

using namespace arlab;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

void require_valid(const DiscreteMeasure& m) {
  REQUIRE(m.size() > 0);
  REQUIRE_THAT(m.mass(), WithinAbs(1.0, 1e-12));
  for (double w : m.weights()) REQUIRE(w >= 0.0);
}

}  // namespace

TEST_CASE("measure invariants are enforced", "[measure]") {
  REQUIRE_THROWS_AS(DiscreteMeasure({}, {}), Error);
  REQUIRE_THROWS_AS(DiscreteMeasure({{0, 0, 0}}, {-1.0}), Error);
  REQUIRE_THROWS_AS(DiscreteMeasure({{0, 0, 0}}, {1.0, 2.0}), Error);
  REQUIRE_THROWS_AS(DiscreteMeasure({{std::numeric_limits<double>::quiet_NaN(), 0, 0}}, {1.0}), Error);
  REQUIRE_THROWS_AS(DiscreteMeasure::normalized({{0, 0, 0}, {1, 0, 0}}, {0.0, 0.0}), Error);
}

TEST_CASE("flat graph", "[builders]") {
  const auto m = build_graph_measure(make_profile("flat"), 8);
  require_valid(m);
  for (const auto& p : m.points()) REQUIRE(p.z == 0.0);
}

TEST_CASE("paraboloid points lie on the graph", "[builders]") {
  const auto m = build_graph_measure(make_profile("paraboloid"), 64);
  require_valid(m);
  for (const auto& p : m.points()) {
    REQUIRE(p.z == p.x * p.x + p.y * p.y);
    REQUIRE(p.x * p.x + p.y * p.y < 1.0);
  }
}

TEST_CASE("sqrt graph avoids the singular node", "[builders]") {
  const auto prof = make_profile("sqrt");
  const auto m = build_graph_measure(prof, 256);
  require_valid(m);
  for (const auto& p : m.points()) {
    REQUIRE(p.z == prof.evaluate(p.x, p.y));
    const auto g = prof.gradient(p.x, p.y);
    REQUIRE(std::isfinite(g[0]));
    REQUIRE(std::isfinite(g[1]));
  }
}

TEST_CASE("graph builder reports the failing node", "[builders]") {
  SurfaceProfile bad;
  bad.name = "bad";
  bad.evaluate = [](double a, double) { return a > 0.5 ? std::numeric_limits<double>::infinity() : 0.0; };
  bad.gradient = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
  REQUIRE_THROWS_WITH(build_graph_measure(bad, 16), ContainsSubstring("not finite at node"));
  REQUIRE_THROWS_AS(build_graph_measure(make_profile("flat"), 4), Error);
  REQUIRE_THROWS_AS(make_profile("nope"), Error);
}

TEST_CASE("w11 seminorm estimates", "[builders]") {
  REQUIRE(w11_norm_estimate(make_profile("flat"), 64) == 0.0);
  REQUIRE_THAT(w11_norm_estimate(make_profile("cone"), 256), WithinRel(std::numbers::pi, 0.02));
  REQUIRE_THAT(w11_norm_estimate(make_profile("sqrt"), 256), WithinRel(2.0 * std::numbers::pi / 3.0, 0.03));

  SurfaceProfile bad = make_profile("flat");
  bad.gradient = [](double, double) { return std::array<double, 2>{std::numeric_limits<double>::quiet_NaN(), 0.0}; };
  REQUIRE_THROWS_WITH(w11_norm_estimate(bad, 32), ContainsSubstring("not finite at node"));
}

TEST_CASE("fibonacci sphere", "[builders]") {
  const auto small = build_sphere_measure(100);
  require_valid(small);
  for (const auto& p : small.points()) REQUIRE_THAT(p.norm(), WithinAbs(1.0, 1e-12));
  for (double w : small.weights()) REQUIRE_THAT(w, WithinAbs(0.01, 1e-15));

  const auto m = build_sphere_measure(4000);
  REQUIRE(m.centroid().norm() < 0.05);

  // pair distances follow the density r/2 on [0, 2]
  std::vector<double> d;
  const auto& p = m.points();
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) d.push_back(std::sqrt(distance2(p[i], p[j])));
  REQUIRE(ks_distance(std::move(d), [](double r) { return std::clamp(r * r / 4.0, 0.0, 1.0); }) < 0.02);
  REQUIRE_THROWS_AS(build_sphere_measure(5), Error);
}

TEST_CASE("random sphere layout is seeded", "[builders]") {
  const auto a = build_sphere_measure(500, SphereLayout::haar_random, 3);
  const auto b = build_sphere_measure(500, SphereLayout::haar_random, 3);
  const auto c = build_sphere_measure(500, SphereLayout::haar_random, 4);
  REQUIRE(a.points() == b.points());
  REQUIRE(a.points() != c.points());
  for (const auto& p : a.points()) REQUIRE_THAT(p.norm(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("atomic measures", "[builders]") {
  const auto two = build_atomic_measure({{{0, 0, 0}, 1.0}, {{1, 0, 0}, 1.0}});
  REQUIRE(two.weights() == std::vector<double>{0.5, 0.5});
  const auto one = build_atomic_measure({{{2, 3, 4}, 7.0}});
  REQUIRE(one.mass() == 1.0);
  const auto three = build_atomic_measure({{{0, 0, 0}, 1.0}, {{1, 0, 0}, 2.0}, {{2, 0, 0}, 1.0}});
  REQUIRE(three.points() == std::vector<Vec3>{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}});
  REQUIRE(three.weights() == std::vector<double>{0.25, 0.5, 0.25});
  REQUIRE_THROWS_AS(build_atomic_measure({}), Error);
  REQUIRE_THROWS_AS(build_atomic_measure({{{0, 0, 0}, 0.0}}), Error);
}

TEST_CASE("fractal stage 1", "[builders][fractal]") {
  FractalSpec spec;
  spec.s = 2.0;
  const auto b = build_fractal(spec);
  REQUIRE(b.centers.size() == 27);
  REQUIRE(b.measure.size() == 27);
  require_valid(b.measure);
  REQUIRE_THAT(std::sqrt(neighborhood_radius_sq(2, 3, 2.0)), WithinAbs(std::pow(2.0, -1.5), 1e-15));
  REQUIRE_THAT(std::sqrt(neighborhood_radius_sq(2, 3, 3.0)), WithinAbs(0.5, 1e-15));

  spec.s = 3.0;
  REQUIRE(build_fractal(spec).centers.size() == 27);
}

TEST_CASE("fractal stage 2 matches the exhaustive scan", "[builders][fractal]") {
  for (double s : {1.5, 2.0, 2.5}) {
    FractalSpec spec;
    spec.s = s;
    spec.q_sequence = {2, 3};
    spec.stage = 2;
    const auto b = build_fractal(spec);
    REQUIRE(b.centers == exhaustive_fractal_scan(spec));
    // every center lies within every earlier neighborhood
    for (const auto& c : b.centers) {
      bool near = false;
      for (int u = 0; u <= 2; ++u)
        for (int v = 0; v <= 2; ++v)
          for (int w = 0; w <= 2; ++w) near = near || distance2(c, Vec3{u / 2.0, v / 2.0, w / 2.0}) <= neighborhood_radius_sq(2, 3, s) + 1e-15;
      REQUIRE(near);
    }
  }
}

TEST_CASE("fractal fill samples stay inside every stage", "[builders][fractal]") {
  FractalSpec spec;
  spec.s = 2.0;
  spec.q_sequence = {2, 3};
  spec.stage = 2;
  spec.fill = 8;
  spec.fill_seed = 5;
  const auto b = build_fractal(spec);
  REQUIRE(b.measure.size() == b.centers.size() * 8);
  require_valid(b.measure);
  const double r3 = std::sqrt(neighborhood_radius_sq(3, 3, 2.0));
  for (const auto& p : b.measure.points()) {
    double best = 1e9;
    for (const auto& c : b.centers) best = std::min(best, std::sqrt(distance2(p, c)));
    REQUIRE(best <= r3 + 1e-12);
  }
}

TEST_CASE("fractal spec validation", "[builders][fractal]") {
  FractalSpec spec;
  spec.d = 2;
  REQUIRE_THROWS_AS(build_fractal(spec), Error);
  spec = FractalSpec{};
  spec.s = 3.5;
  REQUIRE_THROWS_AS(build_fractal(spec), Error);
  spec = FractalSpec{};
  spec.stage = 2;
  spec.q_sequence = {2, 2};
  REQUIRE_THROWS_AS(build_fractal(spec), Error);
  spec.q_sequence = {3, 10};
  REQUIRE_THROWS_AS(build_fractal(spec), Error);
  REQUIRE(canonical_q_sequence(3) == std::vector<std::int64_t>{2, 3, 10});
  spec = FractalSpec{};
  spec.stage = 4;
  REQUIRE_THROWS_AS(build_fractal(spec), Error);
}

TEST_CASE("densities", "[measure]") {
  const auto m = build_sphere_measure(4000);
  const auto one = density_apply(m, [](const Vec3&) { return 1.0; });
  REQUIRE(std::all_of(one.values.begin(), one.values.end(), [](double v) { return v == 1.0; }));
  const auto z = density_apply(m, [](const Vec3& p) { return p.z; });
  REQUIRE_THAT(l2_norm_squared(z), WithinRel(1.0 / 3.0, 0.02));
  const auto zero = density_apply(m, [](const Vec3&) { return 0.0; });
  RngState rng(1);
  const auto theta = sample_haar_rotation(rng);
  REQUIRE(extension_transform(zero, theta, {0.3, 0.1, -2.0}) == std::complex<double>(0.0, 0.0));
  REQUIRE_THROWS_AS(density_apply(m, [](const Vec3&) { return std::nan(""); }), Error);
}
