/**
 * @file rng.hpp
 * @brief Explicitly seeded generator. Derived draws use fixed bit recipes, so
 * a seed reproduces the same stream on every conforming standard library.
 */
#pragma once

#include <cstdint>
#include <random>

namespace einsel {

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  int bit() { return static_cast<int>(gen_() >> 63); }

  /// Uniform in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do v = gen_(); while (v >= limit);
    return v % n;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace einsel
