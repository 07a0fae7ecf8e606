#pragma once

#include <array>
#include <cmath>

namespace tdho {

using Vec2 = std::array<double, 2>;

/// Row-major 2x2 matrix.
struct Mat2 {
  double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;

  [[nodiscard]] static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  [[nodiscard]] constexpr double det() const { return a11 * a22 - a12 * a21; }
  [[nodiscard]] constexpr double trace() const { return a11 + a22; }
  [[nodiscard]] Mat2 inverse() const {
    const double d = det();
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }
  [[nodiscard]] constexpr Mat2 operator*(const Mat2& o) const {
    return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22, a21 * o.a11 + a22 * o.a21,
            a21 * o.a12 + a22 * o.a22};
  }
  [[nodiscard]] constexpr Vec2 operator*(const Vec2& v) const {
    return {a11 * v[0] + a12 * v[1], a21 * v[0] + a22 * v[1]};
  }
  [[nodiscard]] double max_abs_diff(const Mat2& o) const {
    return std::fmax(std::fmax(std::fabs(a11 - o.a11), std::fabs(a12 - o.a12)),
                     std::fmax(std::fabs(a21 - o.a21), std::fabs(a22 - o.a22)));
  }
};

/// M^n by repeated squaring (n >= 0).
[[nodiscard]] inline Mat2 power(Mat2 m, unsigned n) {
  Mat2 r = Mat2::identity();
  while (n) {
    if (n & 1u) r = r * m;
    m = m * m;
    n >>= 1u;
  }
  return r;
}

}  // namespace tdho
