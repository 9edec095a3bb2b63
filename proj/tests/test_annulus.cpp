#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "arlab/annulus.hpp"
#include "arlab/builders.hpp"
#include "arlab/cell_index.hpp"
#include "arlab/oracle.hpp"

using namespace arlab;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

DiscreteMeasure random_cloud(std::size_t n, std::uint64_t seed) {
  RngState rng(seed);
  std::vector<Vec3> p(n);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = {rng.uniform(), rng.uniform(), rng.uniform()};
    w[i] = 0.5 + rng.uniform();
  }
  return DiscreteMeasure::normalized(std::move(p), std::move(w));
}

DiscreteMeasure two_atoms() { return build_atomic_measure({{{0, 0, 0}, 1.0}, {{1, 0, 0}, 1.0}}); }

}  // namespace

TEST_CASE("cell index occupancy", "[index]") {
  const auto single = build_atomic_measure({{{0.3, 0.2, 0.1}, 1.0}});
  REQUIRE(CellIndex(single, 0.5).cells().size() == 1);

  std::vector<Vec3> grid;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      for (int k = 0; k < 10; ++k) grid.push_back({i * 0.1 + 0.05, j * 0.1 + 0.05, k * 0.1 + 0.05});
  const auto m = DiscreteMeasure::normalized(grid, std::vector<double>(grid.size(), 1.0));
  const CellIndex idx(m, 0.1);
  REQUIRE(idx.cells().size() == 1000);
  for (const auto& c : idx.cells()) REQUIRE(c.end - c.begin == 1);

  REQUIRE_THROWS_AS(CellIndex(m, 0.0), Error);
  REQUIRE_THROWS_AS(CellIndex(m, -1.0), Error);
}

TEST_CASE("every point lands in exactly one cell", "[index]") {
  const auto m = random_cloud(3000, 2);
  const CellIndex idx(m, 0.07);
  std::vector<int> seen(m.size(), 0);
  for (const auto& c : idx.cells())
    for (auto s = c.begin; s < c.end; ++s) ++seen[idx.order()[s]];
  for (int v : seen) REQUIRE(v == 1);
}

TEST_CASE("ball queries match brute force", "[index]") {
  const auto m = random_cloud(2000, 3);
  const CellIndex idx(m, 0.08);
  RngState rng(4);
  for (int k = 0; k < 50; ++k) {
    const Vec3 p{rng.uniform(), rng.uniform(), rng.uniform()};
    const double r = 0.02 + 0.2 * rng.uniform();
    REQUIRE(idx.query_ball(p, r) == brute_force_ball(m, p, r));
  }
}

TEST_CASE("nearest neighbor distances match brute force", "[index]") {
  const auto m = random_cloud(800, 5);
  const auto nn = nearest_neighbor_distances(m);
  for (std::size_t i = 0; i < m.size(); ++i) {
    double best = 1e9;
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j != i) best = std::min(best, std::sqrt(distance2(m.points()[i], m.points()[j])));
    }
    REQUIRE(nn[i] == best);
  }
  REQUIRE(mesh_floor(two_atoms()) == 1.0);
}

TEST_CASE("two-atom annulus by hand", "[annulus]") {
  const auto m = two_atoms();
  REQUIRE(annulus_measure(m, {0.9, 0.2}) == 0.5);
  REQUIRE(annulus_measure(m, {2.0, 0.2}) == 0.0);
  REQUIRE(brute_force_annulus(m, {0.9, 0.2}) == 0.5);
  REQUIRE(brute_force_annulus(m, {2.0, 0.2}) == 0.0);
  REQUIRE(averaged_convolution_value(m, 1.0, std::ldexp(1.0, -6)) == 32.0);
  REQUIRE(averaged_convolution_value(m, 3.0, 0.1) == 0.0);
}

TEST_CASE("annulus queries reject bad input", "[annulus]") {
  const auto m = two_atoms();
  REQUIRE_THROWS_AS(annulus_measure(m, {0.0, 0.1}), Error);
  REQUIRE_THROWS_AS(annulus_measure(m, {1.0, -0.1}), Error);
  const CellIndex other(random_cloud(10, 1), 0.5);
  REQUIRE_THROWS_AS(annulus_measure(m, {1.0, 0.1}, other), Error);
}

TEST_CASE("indexed annulus equals brute force", "[annulus]") {
  const auto m = random_cloud(2000, 6);
  RngState rng(7);
  for (int k = 0; k < 50; ++k) {
    const AnnulusQuery q{0.05 + 0.75 * rng.uniform(), std::exp(std::log(0.01) + rng.uniform() * std::log(50.0))};
    REQUIRE_THAT(annulus_measure(m, q), WithinAbs(brute_force_annulus(m, q), 1e-12));
  }
}

TEST_CASE("multi-eps sweep equals single queries for any cell size", "[annulus]") {
  const auto m = random_cloud(1500, 8);
  const std::vector<double> eps{0.3, 0.01, 0.1, 0.05};
  for (double h : {0.05, 0.2, 0.7}) {
    const CellIndex idx(m, h);
    const auto all = annulus_measures(m, 0.4, eps, idx);
    for (std::size_t k = 0; k < eps.size(); ++k) {
      REQUIRE_THAT(all[k], WithinAbs(brute_force_annulus(m, {0.4, eps[k]}), 1e-12));
    }
  }
}

TEST_CASE("sphere annulus follows the distance density", "[annulus]") {
  const auto m = build_sphere_measure(4000);
  REQUIRE_THAT(annulus_measure(m, {1.0, 0.1}), WithinRel(0.0525, 0.05));
}

TEST_CASE("sup over t", "[annulus]") {
  const auto sphere = build_sphere_measure(4000);
  const auto grid = linspace(0.5, 2.0, 7);
  const double eps = std::ldexp(1.0, -6);
  const auto r = sup_annulus_ratio(sphere, grid, eps);
  REQUIRE(r.ratios.size() == grid.size());
  // exact density r/2 on [0, 2]: A(t, eps) = (min(t(1+eps), 2)^2 - t^2) / 4
  double best = 0.0, best_t = 0.0;
  for (double t : grid) {
    const double hi = std::min(t * (1.0 + eps), 2.0);
    const double exact = (hi * hi - t * t) / 4.0 / eps;
    if (exact > best) {
      best = exact;
      best_t = t;
    }
  }
  REQUIRE(best_t == 1.75);
  REQUIRE(r.t_at_max == best_t);
  REQUIRE_THAT(r.value, WithinRel(best, 0.05));

  const auto atoms = sup_annulus_ratio(two_atoms(), linspace(0.5, 1.5, 5), eps);
  REQUIRE(atoms.value == 32.0);

  REQUIRE_THROWS_AS(sup_annulus_ratio(sphere, std::vector<double>{}, eps), Error);
  REQUIRE_THROWS_AS(sup_annulus_ratio(sphere, std::vector<double>{0.25}, eps), Error);
}

TEST_CASE("sup ratio is rotation invariant", "[annulus]") {
  const auto m = random_cloud(1000, 9);
  RngState rng(10);
  const auto rotated = m.rotated(sample_haar_rotation(rng));
  const auto grid = linspace(0.5, 1.0, 5);
  const auto a = sup_annulus_ratio(m, grid, 0.05);
  const auto b = sup_annulus_ratio(rotated, grid, 0.05);
  REQUIRE_THAT(a.value, WithinAbs(b.value, 1e-10));
}

TEST_CASE("averaged convolution on the sphere tends to one half", "[annulus]") {
  const auto m = build_sphere_measure(4000);
  for (int k = 4; k <= 6; ++k) {
    const double eps = std::ldexp(1.0, -k);
    const double exact = ((1.0 + eps) * (1.0 + eps) - 1.0) / 4.0 / eps;  // (2 eps + eps^2) / (4 eps)
    REQUIRE_THAT(averaged_convolution_value(m, 1.0, eps), WithinRel(exact, 0.1));
  }
}

TEST_CASE("scaling fits", "[annulus][fit]") {
  const auto eps = dyadic_eps(2, 6);
  std::vector<double> a;
  for (double e : eps) a.push_back(0.7 * e);
  REQUIRE_THAT(fit_scaling(eps, a).slope, WithinAbs(1.0, 1e-12));

  const auto atoms = scaling_exponent(two_atoms(), 1.0, dyadic_eps(4, 8), FloorPolicy::keep);
  REQUIRE_THAT(atoms.slope, WithinAbs(0.0, 1e-12));

  // every eps is under the two-atom floor, so the default policy has nothing to fit
  REQUIRE_THROWS_WITH(scaling_exponent(two_atoms(), 1.0, dyadic_eps(4, 8)), ContainsSubstring("fewer than two"));
}

TEST_CASE("floor policy flags and excludes fine eps", "[annulus][fit]") {
  const auto m = build_graph_measure(make_profile("paraboloid"), 100);
  const std::vector<double> eps{0.25, 0.125, 0.0625, 0.03125, 0.015625};
  const auto fit = scaling_exponent(m, 1.0, eps);
  REQUIRE(fit.mesh_floor > 0.0);
  bool any_flagged = false;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    REQUIRE(fit.below_floor[k] == (eps[k] < 4.0 * fit.mesh_floor));
    REQUIRE(fit.used[k] == !fit.below_floor[k]);
    any_flagged = any_flagged || fit.below_floor[k];
  }
  REQUIRE(any_flagged);
  const auto kept = scaling_exponent(m, 1.0, eps, FloorPolicy::keep);
  for (bool u : kept.used) REQUIRE(u);
}

TEST_CASE("scaling fit input validation", "[annulus][fit]") {
  const auto m = two_atoms();
  REQUIRE_THROWS_AS(scaling_exponent(m, 1.0, std::vector<double>{0.1, 0.2}), Error);
  REQUIRE_THROWS_AS(scaling_exponent(m, 1.0, std::vector<double>{}), Error);
  // an empty annulus is reported with its eps
  REQUIRE_THROWS_WITH(scaling_exponent(m, 3.0, std::vector<double>{0.2, 0.1}, FloorPolicy::keep),
                      ContainsSubstring("empty at eps"));
}
