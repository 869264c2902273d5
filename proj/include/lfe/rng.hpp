#pragma once
#include <cmath>
#include <cstdint>
#include <random>

#include "lfe/vec3.hpp"

namespace lfe {

// Deterministic random source. All randomness in the library flows through
// this type; substreams for independent work items are derived with mix().
struct rng {
  std::mt19937_64 gen;

  explicit rng(std::uint64_t seed) : gen(seed) {}

  // uniform in [0,1)
  double uniform() { return std::ldexp(double(gen() >> 11), -53); }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // standard normal via Box-Muller; spare value cached
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0;
    do {
      u1 = uniform();
    } while (u1 <= 0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  vec3 normal3() {
    double a = normal(), b = normal(), c = normal();
    return {a, b, c};
  }

  vec3 uniform_ball(double radius) {
    for (;;) {
      vec3 v{uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)};
      if (norm2(v) <= 1.0) return radius * v;
    }
  }

  // splitmix64 step, used to derive substream seeds
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

private:
  bool has_spare_ = false;
  double spare_ = 0;
};

inline constexpr double two_pi = 6.283185307179586476925286766559;

} // namespace lfe
