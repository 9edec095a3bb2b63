#pragma once

// The acceptance suite shared by `arlab verify` and the acceptance test
// binary. Every criterion draws from its own stream derived from the master
// seed, so results do not depend on which criteria run or in what order.
// Reports contain no timings or timestamps: the same seed gives the same bytes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "arlab/anchors.hpp"
#include "arlab/annulus.hpp"
#include "arlab/builders.hpp"
#include "arlab/geometry.hpp"
#include "arlab/norms.hpp"
#include "arlab/oracle.hpp"
#include "arlab/oscillatory.hpp"
#include "arlab/profiles.hpp"
#include "arlab/rng.hpp"
#include "arlab/version.hpp"

namespace arlab {

/// One named inequality or interval test.
struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  // "in", "<", "<=", ">", ">=", "=="
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;

  static Check within(std::string name, double value, double lo, double hi) {
    return {std::move(name), value, "in", lo, hi, value >= lo && value <= hi};
  }
  static Check less(std::string name, double value, double bound) {
    return {std::move(name), value, "<", bound, bound, value < bound};
  }
  static Check at_most(std::string name, double value, double bound) {
    return {std::move(name), value, "<=", bound, bound, value <= bound};
  }
  static Check greater(std::string name, double value, double bound) {
    return {std::move(name), value, ">", bound, bound, value > bound};
  }
  static Check at_least(std::string name, double value, double bound) {
    return {std::move(name), value, ">=", bound, bound, value >= bound};
  }
  static Check flag(std::string name, bool ok) { return {std::move(name), ok ? 1.0 : 0.0, "==", 1.0, 1.0, ok}; }
};

inline void to_json(nlohmann::json& j, const Check& c) {
  j = {{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"pass", c.pass}};
  if (c.relation == "in") {
    j["bounds"] = {c.lo, c.hi};
  } else {
    j["bound"] = c.lo;
  }
}

struct CriterionResult {
  int id = 0;
  std::string name;
  std::vector<Check> checks;
  std::vector<OracleReport> oracles;
  nlohmann::json values = nlohmann::json::object();
  bool pass = false;

  void finish() {
    pass = !checks.empty() || !oracles.empty();
    for (const auto& c : checks) pass = pass && c.pass;
    for (const auto& o : oracles) pass = pass && o.pass;
  }
};

inline void to_json(nlohmann::json& j, const CriterionResult& r) {
  j = {{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"checks", r.checks}, {"oracles", r.oracles},
       {"values", r.values}};
}

inline constexpr int kCriterionCount = 11;

inline const char* criterion_name(int id) {
  switch (id) {
    case 1: return "index-oracle-equivalence";
    case 2: return "haar-uniformity";
    case 3: return "stationary-phase-decay";
    case 4: return "annulus-scaling-lipschitz";
    case 5: return "annulus-scaling-w11";
    case 6: return "counterexample-detection";
    case 7: return "fractal-condition";
    case 8: return "energy-dichotomy";
    case 9: return "mollified-identity";
    case 10: return "refinement-stability";
    case 11: return "determinism";
  }
  return "unknown";
}

inline CriterionResult start_criterion(int id) {
  CriterionResult r;
  r.id = id;
  r.name = criterion_name(id);
  return r;
}

namespace acceptance {

inline CriterionResult index_oracle_equivalence(std::uint64_t seed) {
  CriterionResult r = start_criterion(1);
  RngState rng(seed);
  constexpr std::size_t kPoints = 2000;
  constexpr int kQueries = 50;
  std::vector<Vec3> pts(kPoints);
  std::vector<double> w(kPoints);
  for (std::size_t i = 0; i < kPoints; ++i) {
    pts[i] = {rng.uniform(), rng.uniform(), rng.uniform()};
    w[i] = 0.5 + rng.uniform();
  }
  const auto m = DiscreteMeasure::normalized(std::move(pts), std::move(w), {"random-cube", {}});
  double worst = 0.0;
  for (int k = 0; k < kQueries; ++k) {
    const double t = 0.05 + 0.75 * rng.uniform();
    const double eps = std::exp(std::log(0.01) + rng.uniform() * std::log(50.0));
    const AnnulusQuery q{t, eps};
    auto rep = OracleReport::compare("annulus t=" + std::to_string(t) + " eps=" + std::to_string(eps),
                                     annulus_measure(m, q), brute_force_annulus(m, q), 1e-12);
    worst = std::max(worst, rep.abs_diff);
    r.oracles.push_back(std::move(rep));
  }
  r.values["max_abs_diff"] = worst;
  r.values["points"] = kPoints;
  r.values["queries"] = kQueries;
  r.finish();
  return r;
}

inline CriterionResult haar_uniformity(std::uint64_t seed) {
  CriterionResult r = start_criterion(2);
  constexpr std::size_t kSamples = 20000;
  const double bound = 2.0 / std::sqrt(static_cast<double>(kSamples));
  const double inv3 = 1.0 / std::sqrt(3.0);
  const std::vector<std::pair<std::string, Vec3>> vectors{{"e3", {0.0, 0.0, 1.0}}, {"diagonal", {inv3, inv3, inv3}}};
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    RngState rng(derive_seed(seed, i));
    r.checks.push_back(Check::less("ks " + vectors[i].first,
                                   pushforward_uniformity_stat(kSamples, vectors[i].second, rng), bound));
  }
  r.finish();
  return r;
}

inline CriterionResult stationary_phase_decay() {
  CriterionResult r = start_criterion(3);
  double sup = 0.0;
  for (double k : logspace(5.0, 50.0, 200)) sup = std::max(sup, std::abs(sphere_surface_ft(k)) * k);
  r.checks.push_back(Check::at_most("sup |sigma_hat(xi)| |xi| on [5, 50]", sup, 2.0 + 1e-9));

  const std::vector<Vec3> dirs{{1.0, 0.0, 0.0}, {1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0}, {0.6, 0.0, -0.8}};
  double worst = 0.0;
  for (double k : linspace(0.0, 5.0, 26)) {
    for (const auto& d : dirs) {
      const Vec3 xi = d * k;
      worst = std::max(worst, std::abs(quadrature_sphere_ft(xi, 10000) - sphere_surface_ft(xi)));
    }
  }
  r.oracles.push_back(OracleReport::compare("quadrature vs closed form, max over |xi| <= 5", worst, 0.0, 1e-3));
  r.values["sup_decay"] = sup;
  r.finish();
  return r;
}

inline ScalingFit graph_scaling(const char* profile) {
  const auto m = build_graph_measure(make_profile(profile), 300);
  const auto eps = dyadic_eps(4, 8);
  return scaling_exponent(m, 1.0, eps, FloorPolicy::keep);
}

inline void record_fit(CriterionResult& r, const ScalingFit& fit) {
  r.values["eps"] = fit.eps_values;
  r.values["A"] = fit.A_values;
  r.values["mesh_floor"] = fit.mesh_floor;
  r.values["below_floor"] = fit.below_floor;
  r.values["slope"] = fit.slope;
  r.values["residual"] = fit.residual;
}

inline CriterionResult annulus_scaling_lipschitz() {
  CriterionResult r = start_criterion(4);
  const auto fit = graph_scaling("paraboloid");
  r.checks.push_back(Check::within("paraboloid slope", fit.slope, 0.85, 1.15));
  record_fit(r, fit);
  r.finish();
  return r;
}

inline CriterionResult annulus_scaling_w11() {
  CriterionResult r = start_criterion(5);
  const auto fit = graph_scaling("sqrt");
  r.checks.push_back(Check::within("sqrt slope", fit.slope, 0.85, 1.15));
  record_fit(r, fit);
  const double target = 2.0 * std::numbers::pi / 3.0;
  const double w11 = w11_norm_estimate(make_profile("sqrt"), 512);
  r.checks.push_back(Check::at_most("w11 relative error", std::abs(w11 - target) / target, 0.03));
  r.values["w11"] = w11;
  r.finish();
  return r;
}

inline DiscreteMeasure two_atoms() { return build_atomic_measure({{{0.0, 0.0, 0.0}, 1.0}, {{1.0, 0.0, 0.0}, 1.0}}); }

inline CriterionResult counterexample_detection() {
  CriterionResult r = start_criterion(6);
  const auto m = two_atoms();
  const auto eps = dyadic_eps(4, 8);
  const auto fit = scaling_exponent(m, 1.0, eps, FloorPolicy::keep);
  r.checks.push_back(Check::less("two-atom slope", fit.slope, 0.1));
  const double coarse = averaged_convolution_value(m, 1.0, std::ldexp(1.0, -4));
  const double fine = averaged_convolution_value(m, 1.0, std::ldexp(1.0, -8));
  r.checks.push_back(Check::at_least("A/eps growth 2^-4 -> 2^-8", fine / coarse, 8.0));
  record_fit(r, fit);
  r.finish();
  return r;
}

inline FractalSpec fractal_spec(double s, int stage, std::uint64_t fill_seed) {
  FractalSpec spec;
  spec.s = s;
  spec.q_sequence = {2, 3};
  spec.stage = stage;
  spec.fill = 64;
  spec.fill_seed = fill_seed;
  return spec;
}

inline CriterionResult fractal_condition(std::uint64_t seed) {
  CriterionResult r = start_criterion(7);
  const auto spec = fractal_spec(2.0, 2, seed);
  const auto build = build_fractal(spec);
  const auto t_grid = linspace(0.5, 1.5, 9);
  std::vector<double> sups;
  for (double e : dyadic_eps(4, 7)) sups.push_back(sup_annulus_ratio(build.measure, t_grid, e).value);
  const double spread = *std::max_element(sups.begin(), sups.end()) / *std::min_element(sups.begin(), sups.end());
  r.checks.push_back(Check::less("sup_t A/eps spread over eps", spread, 4.0));
  const auto scan = exhaustive_fractal_scan(spec);
  r.checks.push_back(Check::flag("centers equal exhaustive scan", scan == build.centers));
  r.values["sup_ratio"] = sups;
  r.values["centers"] = build.centers.size();
  r.values["scan_centers"] = scan.size();
  r.values["points"] = build.measure.size();
  r.finish();
  return r;
}

inline CriterionResult energy_dichotomy(std::uint64_t seed) {
  CriterionResult r = start_criterion(8);
  const double e15 = riesz_energy(build_sphere_measure(8000, SphereLayout::haar_random, derive_seed(seed, 0)), 1.5);
  r.checks.push_back(Check::at_most("sphere s=1.5 relative error vs sqrt(2)", std::abs(e15 - std::sqrt(2.0)) / std::sqrt(2.0), 0.03));
  const double e2_coarse = riesz_energy(build_sphere_measure(1000), 2.0);
  const double e2_fine = riesz_energy(build_sphere_measure(4000), 2.0);
  r.checks.push_back(Check::greater("sphere s=2 growth 1000 -> 4000", e2_fine / e2_coarse - 1.0, 0.10));

  auto growth = [&](double s, std::uint64_t label) {
    const std::uint64_t fill_seed = derive_seed(seed, label);
    const double one = riesz_energy(build_fractal_measure(fractal_spec(s, 1, fill_seed)), 2.0);
    const double two = riesz_energy(build_fractal_measure(fractal_spec(s, 2, fill_seed)), 2.0);
    return two / one;
  };
  const double g_low = growth(1.5, 1);
  const double g_high = growth(2.5, 2);
  r.checks.push_back(Check::less("fractal growth s=2.5 minus s=1.5", g_high - g_low, 0.0));
  r.values["sphere_energy_s1.5"] = e15;
  r.values["sphere_energy_s2"] = {e2_coarse, e2_fine};
  r.values["fractal_growth_s1.5"] = g_low;
  r.values["fractal_growth_s2.5"] = g_high;
  r.finish();
  return r;
}

inline CriterionResult mollified_identity(std::uint64_t seed) {
  CriterionResult r = start_criterion(9);
  const auto m = build_sphere_measure(2000);
  RngState rng(seed);
  MollifierSpec spec;
  const auto check = mollified_identity_check(m, 1.0, spec, rng);
  r.checks.push_back(Check::at_most("relative gap", check.relative_gap(), 0.10));
  r.checks.push_back(Check::flag("monte carlo conclusive", !check.inconclusive));
  r.values["physical"] = check.physical;
  r.values["frequency"] = check.frequency;
  r.values["frequency_stderr"] = check.frequency_stderr;
  r.values["samples"] = check.samples;
  r.finish();
  return r;
}

inline CriterionResult refinement_stability(std::uint64_t seed, std::uint64_t master_seed) {
  CriterionResult r = start_criterion(10);
  RngState rng(seed);
  const auto rotations = sample_haar_rotations(128, rng);
  const GridSpec grid{8.0, 48};
  auto ratio = [&](const DiscreteMeasure& m) {
    return restriction_ratio(density_apply(m, [](const Vec3&) { return 1.0; }, "one"), grid, rotations).ratio;
  };
  const auto bump = make_profile(ProfileKind::flat_bump);
  const double s400 = ratio(build_sphere_measure(400));
  const double s1600 = ratio(build_sphere_measure(1600));
  const double b400 = ratio(build_graph_measure(bump, 20));
  const double b1600 = ratio(build_graph_measure(bump, 40));
  auto spread = [](double a, double b) { return std::max(a, b) / std::min(a, b); };
  r.checks.push_back(Check::at_most("sphere ratio spread", spread(s400, s1600), 1.25));
  r.checks.push_back(Check::at_most("flat-bump ratio spread", spread(b400, b1600), 1.25));
  r.values["sphere"] = {s400, s1600};
  r.values["flat_bump"] = {b400, b1600};
  r.values["grid"] = {{"R", grid.R}, {"n", grid.n}};
  r.values["rotations"] = rotations.size();

  if (master_seed == anchors::kCanonicalSeed && anchors::kSphere400 > 0.0) {
    const std::vector<std::pair<std::string, std::pair<double, double>>> pinned{
        {"sphere 400", {s400, anchors::kSphere400}},
        {"sphere 1600", {s1600, anchors::kSphere1600}},
        {"flat-bump 400", {b400, anchors::kFlatBump400}},
        {"flat-bump 1600", {b1600, anchors::kFlatBump1600}}};
    for (const auto& [name, v] : pinned) {
      r.oracles.push_back(
          OracleReport::compare("anchor " + name, v.first, v.second, anchors::kRelativeTolerance * v.second));
    }
    r.values["anchors"] = "checked";
  } else {
    r.values["anchors"] = "skipped (non-canonical seed)";
  }
  r.finish();
  return r;
}

inline CriterionResult run_one(int id, std::uint64_t master_seed) {
  const std::uint64_t seed = derive_seed(master_seed, static_cast<std::uint64_t>(id));
  switch (id) {
    case 1: return index_oracle_equivalence(seed);
    case 2: return haar_uniformity(seed);
    case 3: return stationary_phase_decay();
    case 4: return annulus_scaling_lipschitz();
    case 5: return annulus_scaling_w11();
    case 6: return counterexample_detection();
    case 7: return fractal_condition(seed);
    case 8: return energy_dichotomy(seed);
    case 9: return mollified_identity(seed);
    case 10: return refinement_stability(seed, master_seed);
  }
  throw Error("acceptance: unknown criterion " + std::to_string(id));
}

}  // namespace acceptance

struct AcceptanceOptions {
  std::uint64_t seed = anchors::kCanonicalSeed;
  std::vector<int> only;  // empty: all criteria
  // Called after each criterion with its wall time; not part of the report.
  std::function<void(const CriterionResult&, double)> on_result;
};

struct AcceptanceReport {
  std::uint64_t seed = 0;
  std::vector<CriterionResult> results;

  bool all_pass() const {
    return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass; });
  }

  nlohmann::json to_json() const {
    return {{"version", kVersion}, {"seed", seed}, {"all_pass", all_pass()}, {"criteria", results}};
  }
};

inline std::vector<int> selected_criteria(const std::vector<int>& only) {
  std::vector<int> ids;
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (only.empty() || std::find(only.begin(), only.end(), id) != only.end()) ids.push_back(id);
  }
  for (int id : only) {
    if (id < 1 || id > kCriterionCount) throw Error("acceptance: no criterion " + std::to_string(id));
  }
  return ids;
}

/// Runs the selected criteria. Criterion 11 reruns every other selected
/// criterion (all of 1-10 when it is selected alone) and compares the JSON
/// bytes of the two passes.
inline AcceptanceReport run_acceptance(const AcceptanceOptions& opts) {
  const auto ids = selected_criteria(opts.only);
  AcceptanceReport report;
  report.seed = opts.seed;
  auto timed = [&](int id) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult res = acceptance::run_one(id, opts.seed);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opts.on_result) opts.on_result(res, secs);
    return res;
  };

  std::vector<int> base;
  for (int id : ids) {
    if (id != 11) base.push_back(id);
  }
  for (int id : base) report.results.push_back(timed(id));

  if (std::find(ids.begin(), ids.end(), 11) != ids.end()) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<int> rerun = base;
    if (rerun.empty()) {
      for (int id = 1; id < 11; ++id) rerun.push_back(id);
    }
    nlohmann::json first = nlohmann::json::array();
    nlohmann::json second = nlohmann::json::array();
    for (int id : rerun) {
      const auto it = std::find_if(report.results.begin(), report.results.end(),
                                   [id](const CriterionResult& c) { return c.id == id; });
      first.push_back(it != report.results.end() ? nlohmann::json(*it) : nlohmann::json(acceptance::run_one(id, opts.seed)));
      second.push_back(acceptance::run_one(id, opts.seed));
    }
    const std::string a = first.dump();
    const std::string b = second.dump();
    CriterionResult res = start_criterion(11);
    res.checks.push_back(Check::flag("rerun report bytes identical", a == b));
    res.values["criteria_rerun"] = rerun;
    res.values["report_bytes"] = a.size();
    res.finish();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opts.on_result) opts.on_result(res, secs);
    report.results.push_back(std::move(res));
  }
  return report;
}

}  // namespace arlab
