#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mtscore {

// splitmix64 finalizer (Steele, Lea, Flood 2014). Used to turn a master seed
// plus a path of stream indices into decorrelated engine seeds, so that trial k
// of experiment point j draws the same numbers no matter how work is scheduled.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t x = splitmix64(seed);
  for (std::uint64_t id : path) x = splitmix64(x ^ splitmix64(id));
  return x;
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return std::mt19937_64(stream_seed(seed, path));
}

}  // namespace mtscore
