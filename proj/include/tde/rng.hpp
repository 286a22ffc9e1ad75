#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "tde/common.hpp"

namespace tde {

// splitmix64; fully specified, platform independent.
inline u64 splitmix64(u64& state) {
  u64 z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stateless mix of up to four words; used for counter-based dropout masks
// and per-entity sub-seeds so results do not depend on thread scheduling.
inline u64 mix64(u64 a, u64 b = 0x9E3779B97F4A7C15ULL, u64 c = 0, u64 d = 0) {
  u64 s = a;
  u64 h = splitmix64(s);
  s ^= b + 0x517CC1B727220A95ULL;
  h ^= splitmix64(s);
  s ^= c + 0x2545F4914F6CDD1DULL;
  h ^= splitmix64(s);
  s ^= d + 0xD6E8FEB86659FD93ULL;
  h ^= splitmix64(s);
  return h;
}

inline u64 fnv1a64(std::string_view s) {
  u64 h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Deterministic generator. std::mt19937 would be portable too, but the
// distributions are not; everything below is pinned down to the bit.
class Rng {
public:
  explicit Rng(u64 seed) : state_(seed ^ 0x7263D9BD8409F526ULL) {}

  u64 next_u64() { return splitmix64(state_); }

  // uniform in [0, 1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // inclusive integer range
  i64 uniform_int(i64 lo, i64 hi) {
    u64 span = u64(hi - lo) + 1;
    return lo + i64(next_u64() % span);
  }

  // Box-Muller, fixed algorithm
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0)
      u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double std) { return mean + std * normal(); }

private:
  u64 state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Bernoulli keep/drop decision for dropout, keyed rather than sequential.
inline bool dropout_keep(u64 seed, u64 step, u64 unit, u64 elem, double rate) {
  if (rate <= 0.0)
    return true;
  u64 h = mix64(seed, step, unit, elem);
  return (double(h >> 11) * 0x1.0p-53) >= rate;
}

} // namespace tde
