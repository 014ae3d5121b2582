#pragma once

#include <cstdint>

namespace rwre {

// splitmix64 finalizer. One application scrambles a 64-bit word; chained
// applications combine independent coordinates (seed, site, replica, ...).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) + b);
}

// Maps a 64-bit hash into the open interval (0,1). Never returns exactly 0
// or 1, so inverse-transform sampling stays inside the support.
inline double to_unit_open(std::uint64_t h) {
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// Deterministic seed for a (stream, index) slot under a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  return hash_combine(hash_combine(master, stream), index);
}

// Counter-based generator: the k-th output is a pure function of (seed, k),
// so replicas replay identically regardless of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_++); }
  double next_unit() { return to_unit_open(next_u64()); }
  bool bernoulli(double p) { return next_unit() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace rwre
