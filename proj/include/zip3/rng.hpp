#pragma once

#include <cstdint>
#include <random>

namespace zip3 {

// Deterministic substream derivation: folds the arguments through splitmix64
// so that (seed, a, b) and (seed, a, b') give statistically independent
// streams. Identical inputs give identical outputs on every platform.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a = 0,
                          std::uint64_t b = 0, std::uint64_t c = 0);

// Seeded random stream. All draws are implemented on top of the raw 64-bit
// output of mt19937_64, which the standard pins down exactly, so sequences
// are reproducible across compilers and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on the open interval (0, 1); never returns an exact endpoint.
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Poisson draw with mean lambda >= 0. Knuth multiplication for small
  // means, Hormann's PTRS transformed rejection for lambda >= 10.
  long poisson(double lambda);

 private:
  std::mt19937_64 engine_;
};

}  // namespace zip3
