#pragma once

// Deterministic randomness. Every trial owns one generator seeded from a
// stable 64-bit hash, so grid points can run on any worker in any order and
// still produce identical streams.

#include <bit>
#include <cstdint>
#include <random>

#include "fewbit/types.hpp"

namespace fewbit {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t h, uint64_t v) { return splitmix64(h ^ splitmix64(v)); }

inline uint64_t hash_combine(uint64_t h, double v) {
  return hash_combine(h, std::bit_cast<uint64_t>(v));
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1).
  double uniform() { return double(gen_() >> 11) * 0x1p-53; }

  // Uniform on (0, 1]; safe as a log argument.
  double uniform_pos() { return double((gen_() >> 11) + 1) * 0x1p-53; }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform_pos();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

  // CN(0, var): radius^2 ~ Exp(1/var), phase uniform.
  cplx cgaussian(double var) {
    double u1 = uniform_pos();
    double u2 = uniform();
    double r = std::sqrt(-var * std::log(u1));
    double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
  }

  uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace fewbit
