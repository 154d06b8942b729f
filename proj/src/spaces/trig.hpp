#pragma once

#include <cmath>
#include <cstddef>

namespace diffquad::detail {

// cos(k t), sin(k t) for k = 0..K by rotation, re-seeded from libm every 16
// steps to keep the error at a few ulps.
template <class Fn>
void for_each_harmonic(double t, std::size_t K, Fn&& fn) {
  const double c1 = std::cos(t);
  const double s1 = std::sin(t);
  double c = 1.0;
  double s = 0.0;
  fn(std::size_t{0}, c, s);
  for (std::size_t k = 1; k <= K; ++k) {
    if (k % 16 == 0) {
      c = std::cos(static_cast<double>(k) * t);
      s = std::sin(static_cast<double>(k) * t);
    } else {
      const double cn = c * c1 - s * s1;
      s = s * c1 + c * s1;
      c = cn;
    }
    fn(k, c, s);
  }
}

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Geodesic distance on R / 2 pi Z.
inline double circle_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), kTwoPi);
  return d > kPi ? kTwoPi - d : d;
}

inline double wrap_angle(double t) {
  double w = std::fmod(t, kTwoPi);
  return w < 0.0 ? w + kTwoPi : w;
}

}  // namespace diffquad::detail
