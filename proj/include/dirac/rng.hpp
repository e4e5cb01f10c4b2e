#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>

// Deterministic, splittable random streams.
//
// Ensemble member n must depend only on (master seed, stream index) so that
// serial and parallel runs produce bit-identical data.  Standard-library
// distributions are implementation-defined, so the generator (xoshiro256++),
// the seeding mix (splitmix64), and the normal transform (Box-Muller) are all
// spelled out here.

namespace dirac {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

class RandomStream {
 public:
  // Stream `index` of master `seed`; distinct indices give statistically
  // independent sequences.
  RandomStream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (index + 1));
    for (auto& w : s_) w = detail::splitmix64(x);
    bool all_zero = true;
    for (auto w : s_) all_zero = all_zero && (w == 0);
    if (all_zero) s_[0] = 1;  // xoshiro's single forbidden state
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the pair's second value is cached.
  double next_normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - next_double();  // (0, 1]: keeps log() finite
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace dirac
