#include "zip3/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace zip3 {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
  std::uint64_t state = seed;
  std::uint64_t out = splitmix64(state);
  state ^= a + 0x9e3779b97f4a7c15ULL;
  out ^= splitmix64(state);
  state ^= b + 0x7f4a7c159e3779b9ULL;
  out ^= splitmix64(state);
  state ^= c + 0x2545f4914f6cdd1dULL;
  out ^= splitmix64(state);
  return out;
}

long Rng::poisson(double lambda) {
  if (lambda < 0.0 || !std::isfinite(lambda))
    throw std::invalid_argument("poisson: lambda must be finite and >= 0");
  if (lambda == 0.0) return 0;

  if (lambda < 10.0) {
    // Knuth: count factors until the running product drops below e^-lambda.
    const double limit = std::exp(-lambda);
    long k = 0;
    double prod = uniform_open();
    while (prod > limit) {
      ++k;
      prod *= uniform_open();
    }
    return k;
  }

  // Hormann (1993) PTRS: transformed rejection with squeeze.
  const double b = 0.931 + 2.53 * std::sqrt(lambda);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_lambda = std::log(lambda);

  for (;;) {
    const double u = uniform_open() - 0.5;
    const double v = uniform_open();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_lambda - lambda - std::lgamma(k + 1.0))
      return static_cast<long>(kf);
  }
}

}  // namespace zip3
