#pragma once

// Experiment configuration: a single JSON document, validated up front, plus
// the run manifest every command writes next to its outputs.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "arlab/annulus.hpp"
#include "arlab/builders.hpp"
#include "arlab/measure.hpp"
#include "arlab/norms.hpp"
#include "arlab/numeric.hpp"
#include "arlab/oscillatory.hpp"
#include "arlab/profiles.hpp"
#include "arlab/rng.hpp"
#include "arlab/version.hpp"

namespace arlab {

/// Invalid or incomplete configuration (maps to exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Labels for seeds derived from the master seed.
inline constexpr std::uint64_t kSeedMeasure = 1;
inline constexpr std::uint64_t kSeedDensity = 2;
inline constexpr std::uint64_t kSeedRotations = 3;
inline constexpr std::uint64_t kSeedIdentity = 4;

struct AnnulusConfig {
  double t = 1.0;  // radius of the scaling fit
  double t_min = 0.5;
  double t_max = 1.5;
  int t_count = 9;
  std::vector<double> eps = dyadic_eps(4, 8);
  FloorPolicy floor_policy = FloorPolicy::exclude;

  std::vector<double> t_grid() const { return linspace(t_min, t_max, static_cast<std::size_t>(t_count)); }
};

struct IdentityConfig {
  double t = 1.0;
  MollifierSpec mollifier;
};

enum class DensityKind { one, coord_z, random_sign };

struct ExperimentConfig {
  nlohmann::json measure;  // {"kind": ..., builder parameters}
  AnnulusConfig annulus;
  GridSpec grid;
  std::size_t rotations = 128;
  DensityKind density = DensityKind::one;
  std::vector<double> energy_s_exp{1.0, 1.5, 2.0};
  IdentityConfig identity;
  std::optional<std::uint64_t> seed;
  std::string output = "out";
  nlohmann::json source;  // the effective document, after overrides

  std::uint64_t require_seed() const {
    if (!seed) throw ConfigError("config: 'seed' is required (set it in the file or pass --seed)");
    return *seed;
  }
};

namespace detail {

inline void check_keys(const nlohmann::json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) throw ConfigError("config: unknown key '" + where + "." + key + "'");
  }
}

template <class T>
T get_or(const nlohmann::json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config: '" + where + "." + key + "' has the wrong type");
  }
}

}  // namespace detail

inline std::string density_name(DensityKind k) {
  switch (k) {
    case DensityKind::one: return "one";
    case DensityKind::coord_z: return "coord-z";
    case DensityKind::random_sign: return "random-sign";
  }
  return "one";
}

inline DensityKind parse_density(const std::string& name) {
  if (name == "one") return DensityKind::one;
  if (name == "coord-z") return DensityKind::coord_z;
  if (name == "random-sign") return DensityKind::random_sign;
  throw ConfigError("config: unknown density '" + name + "' (expected one, coord-z or random-sign)");
}

inline void validate_measure_section(const nlohmann::json& m) {
  if (!m.is_object() || !m.contains("kind")) throw ConfigError("config: 'measure.kind' is required");
  const std::string kind = detail::get_or<std::string>(m, "kind", "measure", "");
  if (kind == "graph") {
    detail::check_keys(m, "measure", {"kind", "profile", "n"});
    const auto profile = detail::get_or<std::string>(m, "profile", "measure", "paraboloid");
    if (!parse_profile_kind(profile)) throw ConfigError("config: unknown profile '" + profile + "'");
  } else if (kind == "sphere") {
    detail::check_keys(m, "measure", {"kind", "n", "layout"});
    const auto layout = detail::get_or<std::string>(m, "layout", "measure", "fibonacci");
    if (layout != "fibonacci" && layout != "haar-random") {
      throw ConfigError("config: unknown sphere layout '" + layout + "'");
    }
  } else if (kind == "fractal") {
    detail::check_keys(m, "measure", {"kind", "d", "s", "q_sequence", "stage", "fill", "fill_seed"});
  } else if (kind == "atoms") {
    detail::check_keys(m, "measure", {"kind", "atoms"});
    if (!m.contains("atoms") || !m.at("atoms").is_array()) throw ConfigError("config: 'measure.atoms' must be a list");
  } else {
    throw ConfigError("config: unknown measure kind '" + kind + "' (expected graph, fractal, sphere or atoms)");
  }
}

/// Parses and validates a configuration document.
inline ExperimentConfig parse_config(const nlohmann::json& doc) {
  using detail::get_or;
  detail::check_keys(doc, "<root>", {"measure", "annulus", "grid", "rotations", "density", "energy", "identity", "seed", "output"});
  ExperimentConfig c;
  c.source = doc;
  if (!doc.contains("measure")) throw ConfigError("config: 'measure' section is required");
  c.measure = doc.at("measure");
  validate_measure_section(c.measure);

  if (doc.contains("annulus")) {
    const auto& a = doc.at("annulus");
    detail::check_keys(a, "annulus", {"t", "t_min", "t_max", "t_count", "eps", "floor_policy"});
    c.annulus.t = get_or(a, "t", "annulus", c.annulus.t);
    c.annulus.t_min = get_or(a, "t_min", "annulus", c.annulus.t_min);
    c.annulus.t_max = get_or(a, "t_max", "annulus", c.annulus.t_max);
    c.annulus.t_count = get_or(a, "t_count", "annulus", c.annulus.t_count);
    c.annulus.eps = get_or(a, "eps", "annulus", c.annulus.eps);
    const auto policy = get_or<std::string>(a, "floor_policy", "annulus", "exclude");
    if (policy == "exclude") {
      c.annulus.floor_policy = FloorPolicy::exclude;
    } else if (policy == "keep") {
      c.annulus.floor_policy = FloorPolicy::keep;
    } else {
      throw ConfigError("config: annulus.floor_policy must be 'exclude' or 'keep'");
    }
  }
  if (!(c.annulus.t_min > 0.0 && c.annulus.t_max >= c.annulus.t_min)) throw ConfigError("config: need 0 < t_min <= t_max");
  if (c.annulus.t_count < 1) throw ConfigError("config: annulus.t_count must be >= 1");
  if (c.annulus.eps.empty()) throw ConfigError("config: annulus.eps must not be empty");
  for (double e : c.annulus.eps) {
    if (!(e > 0.0)) throw ConfigError("config: annulus.eps entries must be positive");
  }

  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    detail::check_keys(g, "grid", {"R", "n"});
    c.grid.R = get_or(g, "R", "grid", c.grid.R);
    c.grid.n = get_or(g, "n", "grid", c.grid.n);
  }
  try {
    c.grid.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (doc.contains("rotations")) {
    const auto& r = doc.at("rotations");
    detail::check_keys(r, "rotations", {"M"});
    c.rotations = get_or<std::size_t>(r, "M", "rotations", c.rotations);
  }
  if (c.rotations < 16) throw ConfigError("config: rotations.M must be >= 16");

  c.density = parse_density(get_or<std::string>(doc, "density", "<root>", "one"));

  if (doc.contains("energy")) {
    const auto& e = doc.at("energy");
    detail::check_keys(e, "energy", {"s_exp"});
    c.energy_s_exp = get_or(e, "s_exp", "energy", c.energy_s_exp);
  }
  for (double s : c.energy_s_exp) {
    if (!(s > 0.0)) throw ConfigError("config: energy.s_exp entries must be positive");
  }

  if (doc.contains("identity")) {
    const auto& i = doc.at("identity");
    detail::check_keys(i, "identity", {"t", "delta", "freq_cutoff", "mc_samples", "core_radius"});
    c.identity.t = get_or(i, "t", "identity", c.identity.t);
    auto& ms = c.identity.mollifier;
    ms.delta = get_or(i, "delta", "identity", ms.delta);
    ms.freq_cutoff = get_or(i, "freq_cutoff", "identity", ms.freq_cutoff);
    ms.mc_samples = get_or(i, "mc_samples", "identity", ms.mc_samples);
    ms.core_radius = get_or(i, "core_radius", "identity", ms.core_radius);
  }
  try {
    c.identity.mollifier.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) throw ConfigError("config: 'seed' must be a non-negative integer");
    c.seed = doc.at("seed").get<std::uint64_t>();
  }
  c.output = get_or<std::string>(doc, "output", "<root>", c.output);
  return c;
}

inline nlohmann::json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

/// Builds the configured measure. Builder errors are rethrown with the
/// section they came from.
inline DiscreteMeasure build_configured_measure(const nlohmann::json& m, std::uint64_t seed) {
  using detail::get_or;
  validate_measure_section(m);
  const std::string kind = m.at("kind").get<std::string>();
  try {
    if (kind == "graph") {
      const auto profile = make_profile(get_or<std::string>(m, "profile", "measure", "paraboloid"));
      return build_graph_measure(profile, get_or(m, "n", "measure", 100));
    }
    if (kind == "sphere") {
      const auto layout = get_or<std::string>(m, "layout", "measure", "fibonacci") == "fibonacci"
                              ? SphereLayout::fibonacci
                              : SphereLayout::haar_random;
      return build_sphere_measure(get_or(m, "n", "measure", 1000), layout, derive_seed(seed, kSeedMeasure));
    }
    if (kind == "fractal") {
      FractalSpec spec;
      spec.d = get_or(m, "d", "measure", spec.d);
      spec.s = get_or(m, "s", "measure", spec.s);
      spec.q_sequence = get_or(m, "q_sequence", "measure", spec.q_sequence);
      spec.stage = get_or(m, "stage", "measure", spec.stage);
      spec.fill = get_or(m, "fill", "measure", spec.fill);
      spec.fill_seed = get_or(m, "fill_seed", "measure", derive_seed(seed, kSeedMeasure));
      return build_fractal_measure(spec);
    }
    std::vector<Atom> atoms;
    for (const auto& a : m.at("atoms")) {
      Atom atom;
      if (a.is_array() && (a.size() == 3 || a.size() == 4)) {
        atom.position = {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
        if (a.size() == 4) atom.weight = a[3].get<double>();
      } else if (a.is_object() && a.contains("position")) {
        const auto& p = a.at("position");
        if (!p.is_array() || p.size() != 3) throw ConfigError("config: atom position must have 3 coordinates");
        atom.position = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
        atom.weight = a.value("weight", 1.0);
      } else {
        throw ConfigError("config: each atom is [x, y, z] or [x, y, z, w] or {\"position\": [...], \"weight\": w}");
      }
      atoms.push_back(atom);
    }
    return build_atomic_measure(atoms);
  } catch (const ConfigError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: measure: ") + e.what());
  } catch (const Error& e) {
    throw ConfigError(std::string("config: measure (") + kind + "): " + e.what());
  }
}

/// Attaches the configured density. random-sign draws +-1 per point.
inline DensityMeasure apply_density(const DiscreteMeasure& m, DensityKind kind, std::uint64_t seed) {
  switch (kind) {
    case DensityKind::one:
      return density_apply(m, [](const Vec3&) { return 1.0; }, "one");
    case DensityKind::coord_z:
      return density_apply(m, [](const Vec3& p) { return p.z; }, "coord-z");
    case DensityKind::random_sign: {
      RngState rng(derive_seed(seed, kSeedDensity));
      return density_apply(m, [&rng](const Vec3&) { return rng.uniform() < 0.5 ? -1.0 : 1.0; }, "random-sign");
    }
  }
  throw ConfigError("config: unknown density");
}

/// FNV-1a over the canonical dump (object keys sorted), excluding the output
/// path. Stable under key reordering in the file.
inline std::string config_hash(const nlohmann::json& doc) {
  nlohmann::json copy = doc;
  if (copy.is_object()) copy.erase("output");
  const std::string text = copy.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::string version = kVersion;
  std::string started;
  std::string finished;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;

  nlohmann::json to_json() const {
    nlohmann::json j = {{"command", command}, {"config_hash", config_hash}, {"version", version},
                        {"started", started}, {"finished", finished},       {"outputs", outputs}};
    j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
    return j;
  }
};

}  // namespace arlab
