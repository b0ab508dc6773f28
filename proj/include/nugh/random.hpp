#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace nugh {

/// Seedable generator owned by one thread. Streams with the same seed and a
/// different streamId are independent; identical (seed, streamId) pairs
/// reproduce the same draws bit for bit. Only fully specified transforms are
/// used (no std:: distributions) so output does not depend on the library.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = kDefaultSeed, std::uint64_t streamId = 0)
      : seed_(seed), stream_(streamId) {
    std::seed_seq sequence{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                           static_cast<std::uint32_t>(streamId),
                           static_cast<std::uint32_t>(streamId >> 32), 0x6e756768u};
    engine_.seed(sequence);
  }

  static constexpr std::uint64_t kDefaultSeed = 20240917;

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t streamId() const { return stream_; }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniformPositive() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }
  double exponential() { return -std::log(uniformPositive()); }

  /// Standard normal by the Marsaglia polar method.
  double normal() {
    if (hasSpare_) {
      hasSpare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    hasSpare_ = true;
    return u * factor;
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  std::uint64_t stream_;
  double spare_ = 0.0;
  bool hasSpare_ = false;
};

}  // namespace nugh
