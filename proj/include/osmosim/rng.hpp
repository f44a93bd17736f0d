#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "common.hpp"

namespace osmosim {

// Seeded random source. std::mt19937_64 output is fully specified by the
// standard; the distribution helpers below are written out by hand because
// the std:: distributions are implementation-defined.
class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [lo, hi], rejection sampled to avoid modulo bias.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    if (hi <= lo) return lo;
    const std::uint64_t span = hi - lo + 1;
    if (span == 0) return next();  // full 64-bit range
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return lo + x % span;
  }

  // Uniform double in [0, 1) built from the top 53 bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Box-Muller; one draw per call keeps the stream position independent of
  // call history.
  double normal(double mean, double stddev) {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + stddev * z;
  }

  double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

 private:
  std::mt19937_64 engine_;
};

// Converts a bandwidth in bits/s at a clock in Hz into a per-cycle byte budget
// without drift: the remainder of every division is carried to the next cycle.
class ByteBudget {
 public:
  ByteBudget() = default;
  ByteBudget(std::uint64_t bits_per_second, std::uint64_t clock_hz)
      : num_(bits_per_second), den_(clock_hz * 8) {}

  // Bytes granted for the current cycle.
  Bytes tick() {
    acc_ += num_;
    const Bytes whole = acc_ / den_;
    acc_ %= den_;
    return whole;
  }

  std::uint64_t numerator() const { return num_; }
  std::uint64_t denominator() const { return den_; }

  // Whole cycles needed to move `len` bytes at this rate.
  Cycle cycles_for(Bytes len) const {
    const unsigned __int128 n = static_cast<unsigned __int128>(len) * den_;
    return static_cast<Cycle>((n + num_ - 1) / num_);
  }

 private:
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 1;
  std::uint64_t acc_ = 0;
};

}  // namespace osmosim
