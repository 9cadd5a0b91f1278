#pragma once

#include <cstdint>
#include <random>

namespace qfilter {

// splitmix64; used to derive independent substream seeds so parallel
// ensembles reproduce regardless of scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t index) {
  return std::mt19937_64(substream_seed(master, index));
}

}  // namespace qfilter
