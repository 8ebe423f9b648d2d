#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace edgeprune {

/// Seedable random stream backed by std::mt19937_64.
///
/// The engine's output sequence is fixed by the standard, but the standard
/// distributions are not, so every conversion to doubles, normals and
/// integer ranges is done here. Results are reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (one draw per call, no caching).
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n), rejection sampled. n must be positive.
  std::size_t below(std::size_t n);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Mixes a stage name (and optional index) into a base seed with FNV-1a and
/// a splitmix64 finalizer, so each pipeline stage gets an independent stream.
std::uint64_t derive_seed(std::uint64_t base, std::string_view stage, std::uint64_t index = 0);

}  // namespace edgeprune
