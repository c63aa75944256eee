#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tla {

/// Mixes a 64-bit value into a well-distributed seed (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a child seed from a base seed, a purpose label and an index.
/// The derivation depends only on its arguments, never on how many draws
/// other streams have consumed, so adding draws in one component does not
/// perturb another component's sequence.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view purpose,
                                 std::uint64_t index = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the purpose label
  for (char c : purpose) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix_seed(base ^ mix_seed(h) ^ mix_seed(index * 0x9e3779b97f4a7c15ULL + 1));
}

/// Seeded random stream. A run owns one root Rng and derives one independent
/// sub-stream per purpose (environment resets, action noise, batch sampling,
/// weight init).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed)) {}

  /// Independent child stream; stable under draws made on this stream.
  Rng stream(std::string_view purpose, std::uint64_t index = 0) const {
    return Rng(derive_seed(seed_, purpose, index));
  }

  std::uint64_t seed() const { return seed_; }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  double normal(double mean, double stddev) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }

  /// Uniform integer in [0, bound).
  std::uint64_t index(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }

  std::uint64_t next_u64() { return engine_(); }

  bool bernoulli(double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_) < p;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace tla
