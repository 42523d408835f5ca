#pragma once

#include <cstdint>
#include <random>

namespace savg {

/// The toolkit's random stream: std::mt19937_64 seeded through SplitMix64.
///
/// split(k) derives an independent stream from (seed, k) so concurrent
/// samplers never share state. Uniform draws use the top 53 bits of each
/// output, so results do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0x5eed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next() { return engine_(); }
  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1]; safe to take the log of.
  double uniformPositive();

  Rng split(std::uint64_t stream) const;

  static std::uint64_t splitmix64(std::uint64_t x);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace savg
