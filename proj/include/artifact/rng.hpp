#pragma once
#include <complex>
#include <cstdint>
#include <random>

namespace cr {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Per-trial substream: depends only on (master seed, trial index), never on
// which worker runs the trial, so results are identical at any parallelism.
inline std::mt19937_64 trial_rng(std::uint64_t master_seed, std::uint64_t trial) {
  std::uint64_t s = master_seed ^ (0xD1B54A32D192ED03ull * (trial + 1));
  std::uint64_t a = splitmix64(s), b = splitmix64(s);
  std::uint64_t c = splitmix64(s), d = splitmix64(s);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
                    static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(d >> 32)};
  return std::mt19937_64(seq);
}

// Uniform in [0, 1) with 53-bit resolution.
inline double uniform_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). Fixed algorithm so streams are reproducible.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

// Standard normal via Box-Muller; always consumes two uniforms.
inline double normal(std::mt19937_64& rng) {
  double u1 = uniform_double(rng);
  double u2 = uniform_double(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// CN(0, sigma2): total variance sigma2 split evenly across real/imag parts.
inline std::complex<double> complex_normal(std::mt19937_64& rng, double sigma2) {
  const double s = std::sqrt(0.5 * sigma2);
  double u1 = uniform_double(rng);
  double u2 = uniform_double(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double ang = 6.283185307179586476925286766559 * u2;
  return {s * r * std::cos(ang), s * r * std::sin(ang)};
}

}  // namespace cr
