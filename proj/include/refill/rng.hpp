#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace refill {

/// Deterministic 64-bit generator (splitmix64). Used instead of <random>
/// engines and distributions so that sampled output is byte-identical across
/// platforms and standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform in [0, n), n > 0. Rejection sampling, no modulo bias.
  std::uint64_t next_below(std::uint64_t n);

  /// Uniform in [0, 1).
  double next_unit();

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    if (values.size() < 2) return;
    for (std::size_t i = values.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(next_below(i + 1));
      using std::swap;
      swap(values[i], values[j]);
    }
  }

 private:
  std::uint64_t state_;
};

/// Derives a per-purpose seed from a base seed and a label (FNV-1a over the
/// label mixed with the base). Every random consumer takes its own labeled
/// stream, so adding a new consumer never perturbs existing ones.
std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view label);

}  // namespace refill
