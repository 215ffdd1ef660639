#pragma once

// Deterministic pseudo-random and low-discrepancy sources. All mappings from
// raw engine output to floats are done here by hand so that streams are
// reproducible across platforms and standard-library versions.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

namespace wavebox {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double range(double a, double b) { return a + (b - a) * unit(); }

  int index(int n) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(n)); }

  // Standard normal via Box-Muller.
  double gauss() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = unit();
    double u2 = unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Van der Corput radical inverse; bases 2, 3, 5 give a Halton sequence.
inline double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double f = 1.0;
  double r = 0.0;
  while (i > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

inline constexpr std::array<std::uint64_t, 6> kHaltonBases = {2, 3, 5, 7, 11, 13};

}  // namespace wavebox
