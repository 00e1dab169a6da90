#pragma once

/**
 * @file random.hpp
 * @brief Seeded random streams.
 *
 * One root seed feeds every stochastic component. Each component asks for
 * its own stream by label (and optional index), and the stream seed is a
 * pure function of (root, label, index), so results do not depend on the
 * order in which components draw numbers.
 */

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace gpssim {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed of the child stream `label`/`index` under `parent`.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::string_view label, std::uint64_t index = 0) {
  return mix64(mix64(parent ^ hash_label(label)) + mix64(index ^ 0x2545f4914f6cdd1dULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// A new independent stream; does not consume from this one.
  Rng child(std::string_view label, std::uint64_t index = 0) const {
    return Rng(derive_seed(seed_, label, index));
  }

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal(double mean = 0.0, double sigma = 1.0) {
    if (sigma == 0.0) return mean;
    return std::normal_distribution<double>(mean, sigma)(engine_);
  }
  /// Log-normal variate with the given median and log-space sigma.
  double lognormal(double median, double sigma) {
    if (median <= 0.0) return 0.0;
    return median * std::exp(normal(0.0, sigma));
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace gpssim
