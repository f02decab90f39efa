#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace erloss {

// Stable seed derivation for independent substreams: a splitmix64 finalizer
// chain over (seed, a, b). The same tuple always yields the same stream on
// every platform.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto fin = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  return fin(fin(fin(seed) ^ a) ^ b);
}

// One substream: a 64-bit Mersenne twister with hand-rolled uniform mapping,
// so that draws are identical across standard libraries.
class rng_stream {
 public:
  explicit rng_stream(std::uint64_t seed) : engine_(seed) {}

  // strictly inside (0, 1); safe under log
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential(double mean) { return -mean * std::log(uniform()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace erloss
