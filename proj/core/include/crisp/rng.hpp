#ifndef CRISP_RNG_HPP
#define CRISP_RNG_HPP

#include <cstdint>
#include <random>

namespace crisp {

// splitmix64 finalizer; used to derive independent per-item seeds from a
// base seed so parallel work is reproducible regardless of thread count.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t item) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (item + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace crisp

#endif
