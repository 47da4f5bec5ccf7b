#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mmsched {

// splitmix64 step; used to derive independent child seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Child seed for stream `index` under `tag`, independent of call order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                                 std::uint64_t index = 0) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s = a ^ (tag * 0xD6E8FEB86659FD93ull);
  std::uint64_t b = splitmix64(s);
  s = b ^ (index * 0xA5A5B1E995F9C2A1ull);
  return splitmix64(s);
}

// Uniform in [0,1) from the top 53 bits; portable across standard libraries.
inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * u01(rng);
}

inline double exp_sample(std::mt19937_64& rng, double mean) {
  // inverse CDF; 1-u keeps the argument strictly positive
  return -std::log(1.0 - u01(rng)) * mean;
}

}  // namespace mmsched
