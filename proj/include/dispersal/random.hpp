#pragma once

// Portable random numbers. Everything here is defined bit-for-bit in terms
// of integer arithmetic, so identical seeds give identical draws on every
// platform (unlike the std:: distributions, whose algorithms are
// implementation-defined).

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace dispersal {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Counter-based uniform draw: a pure function of (seed, stream, counter).
/// Used by the simulator so that each player's draw in each round is
/// independent of how many other players exist or in which order rounds run.
constexpr double counter_uniform(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t counter) {
  return to_unit(mix64(mix64(seed ^ mix64(stream)) + counter));
}

/// Sequential generator for seeded searches (mutant batches, restarts).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  double uniform() { return to_unit(engine_()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Exp(1) by inversion; 1 - u keeps the argument of log in (0, 1].
  double exponential() { return -std::log(1.0 - uniform()); }

  /// Uniform point on the probability simplex with n vertices.
  std::vector<double> simplex(std::size_t n) {
    std::vector<double> v(n);
    double sum = 0.0;
    for (auto& x : v) sum += (x = exponential());
    for (auto& x : v) x /= sum;
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dispersal
