#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace qssm {

/// Seeded random stream with fixed draw algorithms (53-bit uniform,
/// Box-Muller normal), so that a given seed reproduces the same sequence
/// on every platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; pairs are cached.
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Deterministic seed derivation for independent sub-streams (init, data
/// order, dropout) hanging off one user-facing seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace qssm
