#pragma once

// Reproducible pseudorandom streams.
//
// The generator is xoshiro256** (Blackman & Vigna, 2018), seeded by expanding
// a single 64-bit seed through SplitMix64. Uniform doubles take the top 53
// bits of each output; Gaussians use the basic Box–Muller transform. Nothing
// here touches <random> distributions, whose outputs are implementation
// defined, so equal seeds give identical streams on every platform.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace arlab {

/// SplitMix64 step; used for seeding and for deriving named substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Deterministically mixes a master seed with a label (e.g. a criterion id).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) {
  std::uint64_t s = seed ^ (label * 0xD1B54A32D192ED03ULL);
  return splitmix64(s);
}

class RngState {
 public:
  explicit RngState(std::uint64_t seed = 0) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    ++draws_;
    return result;
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe as a log argument.
  double uniform_open0() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  /// Standard normal via Box–Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open0();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Advances the state by 2^128 draws. Successive jumps give disjoint
  /// substreams for parallel workers.
  void jump() {
    static constexpr std::array<std::uint64_t, 4> kJump = {
        0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL, 0xa9582618e03fc9aaULL, 0x39abdc4529b1661cULL};
    std::array<std::uint64_t, 4> acc{};
    for (std::uint64_t word : kJump) {
      for (int b = 0; b < 64; ++b) {
        if (word & (std::uint64_t{1} << b)) {
          for (int k = 0; k < 4; ++k) acc[k] ^= s_[k];
        }
        next_u64();
      }
    }
    s_ = acc;
    has_spare_ = false;
  }

  /// Returns a copy positioned at substream `index` (index jumps ahead of this state).
  RngState substream(unsigned index) const {
    RngState copy = *this;
    for (unsigned i = 0; i <= index; ++i) copy.jump();
    return copy;
  }

  bool operator==(const RngState& other) const {
    return s_ == other.s_ && has_spare_ == other.has_spare_ && (!has_spare_ || spare_ == other.spare_);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> s_{};
  std::uint64_t seed_ = 0;
  std::uint64_t draws_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace arlab
