#include <catch_amalgamated.hpp>

#include <vector>

#include <json.hpp>

#include "arlab/builders.hpp"
#include "arlab/oracle.hpp"

using namespace arlab;

TEST_CASE("brute-force annulus on hand cases", "[oracle]") {
  const auto m = build_atomic_measure({{{0, 0, 0}, 1.0}, {{1, 0, 0}, 1.0}});
  REQUIRE(brute_force_annulus(m, {1.0, 0.1}) == 0.5);
  REQUIRE(brute_force_annulus(m, {1.5, 0.1}) == 0.0);
  REQUIRE(brute_force_annulus(build_atomic_measure({{{0, 0, 0}, 1.0}}), {0.1, 0.1}) == 0.0);

  std::vector<Vec3> many(10001, Vec3{});
  for (std::size_t i = 0; i < many.size(); ++i) many[i].x = static_cast<double>(i);
  const auto big = DiscreteMeasure::normalized(many, std::vector<double>(many.size(), 1.0));
  REQUIRE_THROWS_AS(brute_force_annulus(big, {1.0, 0.1}), Error);
}

TEST_CASE("exhaustive fractal scan counts", "[oracle]") {
  FractalSpec spec;
  spec.s = 2.0;
  REQUIRE(exhaustive_fractal_scan(spec).size() == 27);
  spec.s = 3.0;
  REQUIRE(exhaustive_fractal_scan(spec).size() == 27);
  spec.stage = 3;
  REQUIRE_THROWS_AS(exhaustive_fractal_scan(spec), Error);
}

TEST_CASE("oracle report pass iff within tolerance", "[oracle]") {
  const auto ok = OracleReport::compare("a", 1.0, 1.0 + 1e-13, 1e-12);
  REQUIRE(ok.pass);
  const auto bad = OracleReport::compare("b", 1.0, 1.1, 1e-3);
  REQUIRE_FALSE(bad.pass);
  REQUIRE(bad.rel_diff > 0.09);
  const nlohmann::json j = bad;
  REQUIRE(j.at("name") == "b");
  REQUIRE(j.at("pass") == false);
  REQUIRE(j.at("tolerance") == 1e-3);
}
