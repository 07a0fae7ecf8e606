#pragma once

// Independent reference methods for the tests: fixed-step classical RK4 and
// composite Simpson. Nothing here shares code with the library.

#include <array>
#include <cmath>
#include <functional>

namespace ref {

using Fn = std::function<double(double)>;

/// Composite Simpson with n (even) panels.
inline double simpson(const Fn& f, double a, double b, int n = 200000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// (q, p) at t1 for q'' = -omega(t)^2 q, classical RK4 with n steps.
inline std::array<double, 2> rk4_qp(const Fn& omega, double q0, double p0, double t0, double t1, int n = 200000) {
  const double h = (t1 - t0) / n;
  double q = q0, p = p0, t = t0;
  auto acc = [&](double s, double x) { const double w = omega(s); return -w * w * x; };
  for (int i = 0; i < n; ++i) {
    const double k1q = p, k1p = acc(t, q);
    const double k2q = p + 0.5 * h * k1p, k2p = acc(t + 0.5 * h, q + 0.5 * h * k1q);
    const double k3q = p + 0.5 * h * k2p, k3p = acc(t + 0.5 * h, q + 0.5 * h * k2q);
    const double k4q = p + h * k3p, k4p = acc(t + h, q + h * k3q);
    q += h / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
    p += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    t = t0 + (i + 1) * h;
  }
  return {q, p};
}

inline Fn mathieu(double omega_bar, double eta, double alpha) {
  return [=](double t) { return omega_bar * std::sqrt(1.0 + eta * std::sin(alpha * t)); };
}

inline Fn mathieu_dot(double omega_bar, double eta, double alpha) {
  return [=](double t) {
    return omega_bar * eta * alpha * std::cos(alpha * t) / (2.0 * std::sqrt(1.0 + eta * std::sin(alpha * t)));
  };
}

}  // namespace ref
