#pragma once

// Counter-based splittable random generator. Every draw is a pure function
// of (key, counter), and child generators derive fresh keys from string or
// integer labels, so identical (seed, stream) pairs reproduce identical
// sequences no matter how work is ordered across batches or threads.

#include "oadp/rational.hpp"

#include <cmath>
#include <cstdint>
#include <string_view>

namespace oadp {

namespace detail {
// SplitMix64 finalizer: a well-mixed bijection on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}
}  // namespace detail

class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : key_(detail::mix64(seed)) {}

  // split_rng(seed, stream): child generator with an independent stream.
  SplitRng derive(std::string_view label) const {
    return SplitRng(key_ ^ detail::fnv1a(label), 0);
  }
  SplitRng derive(std::uint64_t index) const {
    return SplitRng(key_ ^ detail::mix64(index + 0x632be59bd9b4e019ULL), 0);
  }

  std::uint64_t next_u64() { return detail::mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  // Uniform in (0, 1]: never zero, safe under log().
  double uniform() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  // Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  Complex complex_normal(double scale) {
    const double re = normal();
    const double im = normal();
    return Complex(scale * re, scale * im);
  }

  // Uniform integer in [lo, hi] inclusive.
  long uniform_int(long lo, long hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long>(next_u64() % span);
  }

  // Small nonzero integer in [-bound, bound] \ {0}; the workhorse for
  // "general rational data" draws (points p, linear forms, quadric coefficients).
  long nonzero_int(long bound) {
    long v = uniform_int(-bound, bound - 1);
    return v >= 0 ? v + 1 : v;
  }

  Rational small_rational(long num_bound, long den_bound) {
    return Rational(nonzero_int(num_bound), uniform_int(1, den_bound));
  }

 private:
  SplitRng(std::uint64_t raw_key, int) : key_(detail::mix64(raw_key)) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace oadp
