#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace specapprox {

/// Seedable generator whose output sequence is identical on every platform.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard.
/// The standard distributions are implementation-defined, so uniform, index
/// and Gaussian draws are derived from raw engine output here instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform on {0, ..., bound - 1}; bound must be positive. Unbiased.
  std::uint64_t index(std::uint64_t bound);

  /// Standard normal variate (Marsaglia polar method).
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Fisher-Yates shuffle driven by Rng::index.
template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.index(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace specapprox
