#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mmc {

// Every randomized routine takes an explicit 64-bit seed and builds its own
// generator, so results are reproducible from (inputs, seed) alone.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. Variate mappings are written out below instead of using
// std::uniform_real_distribution / std::normal_distribution, because those
// are implementation-defined and would break bit-for-bit reproducibility
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n) {
    // Rejection-free modulo is biased for huge n; all our n are tiny, and the
    // bias at n <= 2^32 is below 2^-32, which reproducibility does not mind.
    return eng_() % n;
  }

  // Standard normal via Box-Muller on the uniform above.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace mmc
