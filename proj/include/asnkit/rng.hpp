#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "asnkit/error.hpp"

namespace asnkit {

// Deterministic random source. The mt19937_64 engine output is fixed by the
// standard; the draw helpers below avoid std::*_distribution, whose results
// are implementation-defined, so sequences are identical across compilers
// and machines.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi], inclusive. Unbiased via rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw ValueError("uniform_int: empty range");
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next());  // full 64-bit range
    std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
    std::uint64_t draw;
    do {
      draw = next();
    } while (draw >= limit);
    return lo + static_cast<std::int64_t>(draw % span);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// Index draw proportional to weights[i]; cumulative must be the inclusive
  /// prefix sums of positive weights.
  std::size_t pick_cumulative(const std::vector<double>& cumulative) {
    if (cumulative.empty()) throw ValueError("pick_cumulative: empty support");
    double total = cumulative.back();
    double x = uniform01() * total;
    std::size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (cumulative[mid] <= x)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

 private:
  std::mt19937_64 eng_;
};

/// Seed derivation for independent tasks: collision-resistant and stable
/// across runs and machines. Implemented on top of SHA-256 (digest.cpp).
std::uint64_t derive_seed(std::uint64_t master, std::string_view scope,
                          std::string_view key);

}  // namespace asnkit
