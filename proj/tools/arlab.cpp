// arlab: command-line front end for the averaged restriction laboratory.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "arlab/commands.hpp"
#include "arlab/config.hpp"
#include "arlab/parallel.hpp"

namespace {

constexpr int kExitUsage = 2;

std::vector<int> parse_only(const std::string& text) {
  std::vector<int> ids;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    int id = 0;
    try {
      id = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw arlab::ConfigError("--only: '" + item + "' is not a criterion number");
    ids.push_back(id);
  }
  return ids;
}

void print_manifest(const arlab::RunManifest& m) {
  for (const auto& f : m.outputs) std::cout << "wrote " << f << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"arlab: averaged restriction estimates laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(arlab::kVersion));

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  unsigned threads = 1;
  app.add_option("--config", config_path, "experiment config (JSON)");
  app.add_option("--seed", seed, "master seed; overrides the config");
  app.add_option("--out", out_dir, "output directory; overrides the config");
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 256u));

  auto* measure = app.add_subcommand("measure", "build and serialize the configured measure");
  auto* annulus = app.add_subcommand("annulus", "annulus measures, scaling fit and sup over t");
  auto* mixed = app.add_subcommand("mixed-norm", "mixed norm of the averaged extension operator");
  auto* energy = app.add_subcommand("energy", "Riesz energies over the s_exp grid");
  auto* identity = app.add_subcommand("identity-check", "mollified frequency/physical identity");
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  std::string only;
  verify->add_option("--only", only, "comma-separated criterion numbers");
  for (auto* sub : {measure, annulus, mixed, energy, identity, verify}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  arlab::worker_threads() = threads;

  try {
    std::optional<arlab::ExperimentConfig> cfg;
    if (!config_path.empty()) {
      nlohmann::json doc = arlab::read_config_file(config_path);
      if (!doc.is_object()) throw arlab::ConfigError(config_path + ": top level must be an object");
      if (seed) doc["seed"] = *seed;
      if (!out_dir.empty()) doc["output"] = out_dir;
      try {
        cfg = arlab::parse_config(doc);
      } catch (const arlab::ConfigError& e) {
        throw arlab::ConfigError(config_path + ": " + e.what());
      }
    }
    const std::string dir = !out_dir.empty() ? out_dir : (cfg ? cfg->output : std::string("out"));

    if (verify->parsed()) {
      const std::optional<std::uint64_t> s = seed ? seed : (cfg ? cfg->seed : std::nullopt);
      if (!s) throw arlab::ConfigError("verify: a seed is required (--seed or 'seed' in the config)");
      const auto res = arlab::cmd_verify(*s, parse_only(only), dir, cfg ? &*cfg : nullptr, std::cout);
      std::cout << (res.exit_code == 0 ? "all criteria passed" : "some criteria FAILED") << "\n";
      print_manifest(res.manifest);
      return res.exit_code;
    }

    if (!cfg) throw arlab::ConfigError("--config is required for this command");
    arlab::CommandResult res;
    if (measure->parsed()) {
      res = arlab::cmd_measure(*cfg, dir);
    } else if (annulus->parsed()) {
      res = arlab::cmd_annulus(*cfg, dir);
    } else if (mixed->parsed()) {
      res = arlab::cmd_mixed_norm(*cfg, dir);
    } else if (energy->parsed()) {
      res = arlab::cmd_energy(*cfg, dir);
    } else {
      res = arlab::cmd_identity_check(*cfg, dir);
    }
    print_manifest(res.manifest);
    return res.exit_code;
  } catch (const arlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
