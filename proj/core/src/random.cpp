#include "twmg/random.hpp"

#include <cmath>
#include <numbers>

namespace twmg {
namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Xoshiro256::Xoshiro256(std::uint64_t seed) noexcept {
  for (auto& word : s_) word = splitmix64(seed);
}

Xoshiro256 Xoshiro256::for_stream(std::uint64_t master_seed, std::uint64_t stream,
                                  std::uint64_t index) noexcept {
  std::uint64_t state = master_seed;
  std::uint64_t mixed = splitmix64(state);
  state = mixed ^ (stream * 0xd1b54a32d192ed03ULL);
  mixed = splitmix64(state);
  state = mixed ^ (index * 0x8cb92ba72f3d8dd7ULL);
  return Xoshiro256(splitmix64(state));
}

Xoshiro256::result_type Xoshiro256::operator()() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256::uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

std::uint64_t Xoshiro256::below(std::uint64_t bound) noexcept {
  // Lemire 2019, nearly divisionless.
  __extension__ using u128 = unsigned __int128;
  u128 m = static_cast<u128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Xoshiro256::standard_normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::complex<double> Xoshiro256::complex_normal(double variance) noexcept {
  const double sigma = std::sqrt(0.5 * variance);
  const double re = standard_normal();
  const double im = standard_normal();
  return {sigma * re, sigma * im};
}

}  // namespace twmg
