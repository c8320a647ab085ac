#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace selcon {

// Deterministic RNG wrapper. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; all variate transforms below avoid
// std::*_distribution (whose mappings are implementation-defined) so a
// given seed yields the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), n >= 1. Plain modulo; bias is negligible for
  // the dataset sizes used here and the result is platform-stable.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

  // Exponential(1) via inverse CDF.
  double exponential() { return -std::log1p(-uniform()); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace selcon
