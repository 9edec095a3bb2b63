#pragma once

// The CLI subcommands as library functions. Each writes its outputs into
// `out_dir` and returns a manifest listing them.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "arlab/acceptance.hpp"
#include "arlab/annulus.hpp"
#include "arlab/config.hpp"
#include "arlab/measure_io.hpp"
#include "arlab/norms.hpp"
#include "arlab/oscillatory.hpp"

namespace arlab {

struct CommandResult {
  RunManifest manifest;
  int exit_code = 0;
};

namespace detail {

class OutputDir {
 public:
  OutputDir(const std::string& dir, std::string command, const ExperimentConfig* cfg) : dir_(dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
    manifest_.command = std::move(command);
    manifest_.started = utc_timestamp();
    if (cfg) {
      manifest_.config_hash = config_hash(cfg->source);
      manifest_.seed = cfg->seed;
    }
  }

  std::string path(const std::string& name) { return (dir_ / name).string(); }

  std::ofstream open(const std::string& name) {
    std::ofstream os(path(name));
    if (!os) throw Error("cannot write " + path(name));
    manifest_.outputs.push_back(name);
    return os;
  }

  void write_json(const std::string& name, const nlohmann::json& j) {
    auto os = open(name);
    os << j.dump(2) << '\n';
  }

  RunManifest finish() {
    manifest_.finished = utc_timestamp();
    const std::string name = "manifest_" + manifest_.command + ".json";
    std::ofstream os(path(name));
    if (!os) throw Error("cannot write " + path(name));
    os << manifest_.to_json().dump(2) << '\n';
    return manifest_;
  }

  RunManifest& manifest() { return manifest_; }

 private:
  std::filesystem::path dir_;
  RunManifest manifest_;
};

inline std::string bool_cell(bool b) { return b ? "1" : "0"; }

}  // namespace detail

/// Builds the configured measure and writes measure.csv + measure.json.
inline CommandResult cmd_measure(const ExperimentConfig& cfg, const std::string& out_dir) {
  const auto seed = cfg.require_seed();
  detail::OutputDir out(out_dir, "measure", &cfg);
  const auto m = build_configured_measure(cfg.measure, seed);
  {
    auto csv = out.open("measure.csv");
    write_measure_csv(csv, m);
  }
  out.write_json("measure.json", measure_meta_json(m));
  return {out.finish(), 0};
}

/// A(t, eps) over the t grid and the fit radius, the scaling fit at the fit
/// radius and the supremum of A/eps over the t grid for each eps.
inline CommandResult cmd_annulus(const ExperimentConfig& cfg, const std::string& out_dir) {
  const auto seed = cfg.require_seed();
  detail::OutputDir out(out_dir, "annulus", &cfg);
  const auto m = build_configured_measure(cfg.measure, seed);
  auto eps = cfg.annulus.eps;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());

  const auto fit = scaling_exponent(m, cfg.annulus.t, eps, cfg.annulus.floor_policy);

  auto radii = cfg.annulus.t_grid();
  radii.push_back(cfg.annulus.t);
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  const auto t_grid = cfg.annulus.t_grid();
  std::vector<double> sup(eps.size(), -1.0), sup_t(eps.size(), 0.0);
  {
    auto csv = out.open("annulus.csv");
    csv << "t,eps,A,A_over_eps,below_floor\n";
    for (double t : radii) {
      const CellIndex idx(m, default_cell_size(t, eps.front()));
      const auto values = annulus_measures(m, t, eps, idx);
      const bool on_grid = std::find(t_grid.begin(), t_grid.end(), t) != t_grid.end();
      for (std::size_t k = 0; k < eps.size(); ++k) {
        const double ratio = values[k] / eps[k];
        if (on_grid && t >= cfg.annulus.t_min && ratio > sup[k]) {
          sup[k] = ratio;
          sup_t[k] = t;
        }
        write_csv_row(csv, {format_double(t), format_double(eps[k]), format_double(values[k]),
                                    format_double(ratio), detail::bool_cell(fit.below_floor[k])});
      }
    }
  }

  nlohmann::json window = nlohmann::json::array();
  nlohmann::json flagged = nlohmann::json::array();
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (fit.used[k]) window.push_back(eps[k]);
    if (fit.below_floor[k]) flagged.push_back(eps[k]);
  }
  nlohmann::json sup_rows = nlohmann::json::array();
  for (std::size_t k = 0; k < eps.size(); ++k) sup_rows.push_back({{"eps", eps[k]}, {"value", sup[k]}, {"t_at_max", sup_t[k]}});
  out.write_json("annulus_fit.json",
                 {{"t", cfg.annulus.t},
                  {"slope", fit.slope},
                  {"intercept", fit.intercept},
                  {"residual", fit.residual},
                  {"eps_window", window},
                  {"below_floor", flagged},
                  {"floor_policy", cfg.annulus.floor_policy == FloorPolicy::keep ? "keep" : "exclude"},
                  {"mesh_floor", fit.mesh_floor},
                  {"sup_over_t", sup_rows}});
  for (double e : flagged) {
    std::cerr << "warning: eps = " << format_double(e) << " is below 4x the mesh floor "
              << format_double(fit.mesh_floor) << "\n";
  }
  return {out.finish(), 0};
}

/// MixedNormReport plus the per-node inner L^2 field.
inline CommandResult cmd_mixed_norm(const ExperimentConfig& cfg, const std::string& out_dir) {
  const auto seed = cfg.require_seed();
  detail::OutputDir out(out_dir, "mixed-norm", &cfg);
  const auto m = build_configured_measure(cfg.measure, seed);
  const auto dm = apply_density(m, cfg.density, seed);
  RngState rng(derive_seed(seed, kSeedRotations));
  const auto rotations = sample_haar_rotations(cfg.rotations, rng);
  const auto field = inner_l2_field(dm, cfg.grid, rotations);
  MixedNormReport rep;
  rep.rhs = l2_norm(dm);
  if (!(rep.rhs > 0.0)) throw ConfigError("mixed-norm: the density vanishes on the support of the measure");
  rep.lhs = mixed_norm_from_field(field);
  rep.ratio = rep.lhs / rep.rhs;
  rep.grid = cfg.grid;
  rep.rotations = rotations.size();
  rep.seed = seed;
  out.write_json("mixed_norm.json", {{"lhs", rep.lhs},
                                     {"rhs", rep.rhs},
                                     {"ratio", rep.ratio},
                                     {"grid", {{"R", rep.grid.R}, {"n", rep.grid.n}}},
                                     {"rotations", rep.rotations},
                                     {"seed", rep.seed},
                                     {"density", dm.density_name},
                                     {"points", m.size()}});
  auto csv = out.open("inner_field.csv");
  csv << "x,y,z,inner\n";
  const int n = cfg.grid.n;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int q = 0; q < n; ++q) {
        const std::size_t i = (static_cast<std::size_t>(k) * n + l) * n + q;
        write_csv_row(csv, {format_double(cfg.grid.node(k)), format_double(cfg.grid.node(l)),
                                    format_double(cfg.grid.node(q)), format_double(field.values[i])});
      }
  csv.close();
  return {out.finish(), 0};
}

/// Riesz energies over the configured exponents. Fractal measures past stage
/// 1 also get the previous stage's energy and the stage growth factor.
inline CommandResult cmd_energy(const ExperimentConfig& cfg, const std::string& out_dir) {
  const auto seed = cfg.require_seed();
  detail::OutputDir out(out_dir, "energy", &cfg);
  const auto m = build_configured_measure(cfg.measure, seed);
  std::optional<DiscreteMeasure> previous;
  if (cfg.measure.at("kind") == "fractal" && cfg.measure.value("stage", 1) > 1) {
    nlohmann::json prev = cfg.measure;
    prev["stage"] = cfg.measure.value("stage", 1) - 1;
    previous = build_configured_measure(prev, seed);
  }
  auto csv = out.open("energy.csv");
  csv << "quantity,s_exp,value\n";
  for (double s : cfg.energy_s_exp) {
    const double e = riesz_energy(m, s);
    write_csv_row(csv, {"energy", format_double(s), format_double(e)});
    if (previous) {
      const double ep = riesz_energy(*previous, s);
      write_csv_row(csv, {"energy_previous_stage", format_double(s), format_double(ep)});
      write_csv_row(csv, {"stage_growth", format_double(s), format_double(e / ep)});
    }
  }
  csv.close();
  return {out.finish(), 0};
}

/// Both sides of the mollified identity for the configured measure.
inline CommandResult cmd_identity_check(const ExperimentConfig& cfg, const std::string& out_dir) {
  const auto seed = cfg.require_seed();
  detail::OutputDir out(out_dir, "identity-check", &cfg);
  const auto m = build_configured_measure(cfg.measure, seed);
  RngState rng(derive_seed(seed, kSeedIdentity));
  IdentityCheck check;
  try {
    check = mollified_identity_check(m, cfg.identity.t, cfg.identity.mollifier, rng);
  } catch (const Error& e) {
    throw ConfigError(std::string("identity-check: ") + e.what());
  }
  const auto& ms = cfg.identity.mollifier;
  out.write_json("identity.json", {{"t", cfg.identity.t},
                                   {"delta", ms.delta},
                                   {"freq_cutoff", ms.freq_cutoff},
                                   {"mc_samples", ms.mc_samples},
                                   {"core_radius", ms.core_radius},
                                   {"physical", check.physical},
                                   {"frequency", check.frequency},
                                   {"frequency_stderr", check.frequency_stderr},
                                   {"relative_gap", check.relative_gap()},
                                   {"inconclusive", check.inconclusive}});
  return {out.finish(), 0};
}

/// Runs the acceptance suite; exit code 1 when any selected criterion fails.
inline CommandResult cmd_verify(std::uint64_t seed, const std::vector<int>& only, const std::string& out_dir,
                                const ExperimentConfig* cfg, std::ostream& log) {
  detail::OutputDir out(out_dir, "verify", cfg);
  out.manifest().seed = seed;
  AcceptanceOptions opts;
  opts.seed = seed;
  opts.only = only;
  opts.on_result = [&log](const CriterionResult& r, double secs) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", secs);
    log << "criterion " << r.id << " " << r.name << ": " << (r.pass ? "PASS" : "FAIL") << " (" << buf << " s)\n";
    for (const auto& c : r.checks) {
      if (!c.pass) log << "  failed check: " << c.name << " = " << format_double(c.value) << "\n";
    }
    for (const auto& o : r.oracles) {
      if (!o.pass) log << "  failed oracle: " << o.name << " |diff| = " << format_double(o.abs_diff) << "\n";
    }
    log.flush();
  };
  const auto report = run_acceptance(opts);
  out.write_json("verify_report.json", report.to_json());
  return {out.finish(), report.all_pass() ? 0 : 1};
}

}  // namespace arlab
