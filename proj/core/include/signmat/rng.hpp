#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace signmat {

// Generator identifier embedded in every report so that results stay
// replayable across implementations of the same stream.
inline constexpr const char* kGeneratorId = "xoshiro256** 1.0 / splitmix64";

/// One SplitMix64 step: advances `state` by the golden-ratio increment and
/// returns the mixed output (Steele, Lea, Flood / Vigna).
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for independent job `index` under `master`: the (index+1)-th
/// SplitMix64 output starting from state `master`. Constant time, so any
/// worker can derive its own seed without a shared stream.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::uint64_t index) noexcept {
  std::uint64_t s = master + index * 0x9e3779b97f4a7c15ULL;
  return splitmix64(s);
}

/// xoshiro256** 1.0 (Blackman & Vigna), state seeded via SplitMix64.
/// All randomness in this library flows through this generator.
class Xoshiro256ss {
 public:
  explicit Xoshiro256ss(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) using the top 53 bits.
  double next_unit() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the second variate of each pair is
  /// cached, so the uniform stream is consumed two words at a time.
  double next_gaussian() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_unit();
    while (u1 <= 0.0) u1 = next_unit();
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Uniform point on the unit sphere in `dim` dimensions (normalized
/// Gaussian vector).
inline std::vector<double> random_unit_vector(Xoshiro256ss& rng, int dim) {
  std::vector<double> x(static_cast<std::size_t>(dim));
  double norm_sq = 0.0;
  do {
    norm_sq = 0.0;
    for (auto& v : x) {
      v = rng.next_gaussian();
      norm_sq += v * v;
    }
  } while (norm_sq == 0.0);
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (auto& v : x) v *= inv;
  return x;
}

}  // namespace signmat
