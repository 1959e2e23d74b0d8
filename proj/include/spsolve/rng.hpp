#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace spsolve {

/// Deterministic random source. All draws are derived from raw mt19937_64
/// words so that a fixed seed reproduces the same stream on every platform
/// (std::*_distribution would not guarantee that).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 42) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return std::ldexp(static_cast<double>(gen_() >> 11), -53); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Inclusive integer range.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  /// Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  std::vector<double> normal_vec(int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = normal();
    return v;
  }

  std::vector<double> uniform_vec(int n, double lo, double hi) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace spsolve
