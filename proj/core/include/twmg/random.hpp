#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string_view>

namespace twmg {

/// xoshiro256** (Blackman & Vigna) seeded through SplitMix64. Every shot gets
/// its own generator derived from (master_seed, stream, shot_index), so draws
/// never depend on scheduling. Distributions are implemented here rather than
/// taken from <random> because the standard library's are not bit-reproducible
/// across implementations.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept;

  static Xoshiro256 for_stream(std::uint64_t master_seed, std::uint64_t stream,
                               std::uint64_t index) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept;

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() noexcept;
  /// Uniform integer in [0, bound) via Lemire's rejection method.
  std::uint64_t below(std::uint64_t bound) noexcept;
  double standard_normal() noexcept;
  /// Circular complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance) noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_{false};
  double spare_{0.0};
};

inline constexpr std::string_view kRngAlgorithm = "xoshiro256starstar-splitmix64";

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

}  // namespace twmg
