#pragma once

// Independent replay of the seeded random-walk bias used by the measurement
// simulator. The draw layout is part of the library contract (one engine call
// per uniform, Box-Muller pair per Gaussian 2-vector, substream 1 for the
// bias walk); this file re-derives that stream from scratch so determinism
// tests do not lean on the code under test.

#include <cmath>
#include <cstdint>
#include <random>

namespace oracle {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  h = splitmix64(h ^ c);
  return h;
}

struct BiasWalk {
  double x = 0.0;
  double y = 0.0;
};

// Cumulative sum of n_steps Box-Muller pairs from the bias substream of the
// given stream seed.
inline BiasWalk replay_bias(std::uint64_t stream_seed, double drift_std, int n_steps) {
  constexpr std::uint64_t sub_bias = 1;
  std::mt19937_64 eng(derive_seed(stream_seed, sub_bias));
  auto uniform01 = [&eng]() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
  BiasWalk walk;
  for (int i = 0; i < n_steps; ++i) {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = drift_std * std::sqrt(-2.0 * std::log(u1 > 0.0 ? u1 : 0x1.0p-53));
    const double a = 6.283185307179586 * u2;
    walk.x += r * std::cos(a);
    walk.y += r * std::sin(a);
  }
  return walk;
}

}  // namespace oracle
