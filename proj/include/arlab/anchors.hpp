#pragma once

// Regression anchors: restriction ratios recorded by the first acceptance run
// at the canonical seed. Later runs at that seed must reproduce them.

#include <cstdint>

namespace arlab::anchors {

inline constexpr std::uint64_t kCanonicalSeed = 20240917;
inline constexpr double kRelativeTolerance = 1e-6;

inline constexpr double kSphere400 = 0.487079757990503;
inline constexpr double kSphere1600 = 0.4155783678767363;
inline constexpr double kFlatBump400 = 0.6521327259538343;
inline constexpr double kFlatBump1600 = 0.6206944694445983;

}  // namespace arlab::anchors
