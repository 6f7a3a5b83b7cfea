#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace shoplift {

using Rng = std::mt19937_64;

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent seed for a named sub-stream, so adding one entity to a scenario
// does not shift the random draws of any other entity.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view stream) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix64(base ^ mix64(h));
}

inline Rng make_rng(std::uint64_t base, std::string_view stream) { return Rng(derive_seed(base, stream)); }

}  // namespace shoplift
