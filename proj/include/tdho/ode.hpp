#pragma once

/**
 * @file ode.hpp
 * @brief Dormand-Prince 5(4) integrator with PI step control and continuous
 *        extension, templated on the state dimension.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "tdho/errors.hpp"

namespace tdho::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Options {
  double rtol = 1e-10;
  double atol = 1e-10;
  double h_init = 0.0;  ///< 0 selects an automatic initial step
  double h_max = 0.0;   ///< 0 means unbounded
  long max_steps = 5'000'000;
};

/// One accepted step with its interpolation coefficients.
template <std::size_t N>
struct Step {
  double t0;
  double h;
  std::array<State<N>, 5> c;
};

/// Dense piecewise-polynomial solution; valid on [t_begin, t_end] (either orientation).
template <std::size_t N>
class DenseSolution {
 public:
  DenseSolution() = default;
  DenseSolution(double t0, const State<N>& y0) : t_begin_(t0), t_end_(t0), y_begin_(y0), y_end_(y0) {}

  [[nodiscard]] double t_begin() const { return t_begin_; }
  [[nodiscard]] double t_end() const { return t_end_; }
  [[nodiscard]] const State<N>& y_begin() const { return y_begin_; }
  [[nodiscard]] const State<N>& y_end() const { return y_end_; }
  [[nodiscard]] const std::vector<Step<N>>& steps() const { return steps_; }
  [[nodiscard]] bool forward() const { return t_end_ >= t_begin_; }

  [[nodiscard]] bool contains(double t) const {
    return std::min(t_begin_, t_end_) <= t && t <= std::max(t_begin_, t_end_);
  }

  /// Interpolated state. Throws DomainError outside the covered range.
  [[nodiscard]] State<N> operator()(double t) const {
    if (!contains(t)) throw DomainError("dense output: time outside integrated range");
    if (steps_.empty()) return y_begin_;
    if (t == t_end_) return y_end_;
    // steps ordered along the integration direction
    std::size_t lo = 0;
    std::size_t hi = steps_.size();
    const bool fwd = forward();
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      const bool after = fwd ? (t >= steps_[mid].t0) : (t <= steps_[mid].t0);
      if (after) lo = mid; else hi = mid;
    }
    const Step<N>& s = steps_[lo];
    const double th = (t - s.t0) / s.h;
    const double th1 = 1.0 - th;
    State<N> y;
    for (std::size_t i = 0; i < N; ++i)
      y[i] = s.c[0][i] + th * (s.c[1][i] + th1 * (s.c[2][i] + th * (s.c[3][i] + th1 * s.c[4][i])));
    return y;
  }

  void push(const Step<N>& s, double t_new, const State<N>& y_new) {
    steps_.push_back(s);
    t_end_ = t_new;
    y_end_ = y_new;
  }

 private:
  double t_begin_ = 0.0;
  double t_end_ = 0.0;
  State<N> y_begin_{};
  State<N> y_end_{};
  std::vector<Step<N>> steps_;
};

struct NeverStop {
  template <class Y>
  bool operator()(double, const Y&) const { return false; }
};

namespace detail {
// Dormand-Prince 5(4) tableau
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

template <std::size_t N>
double error_norm(const State<N>& err, const State<N>& y0, const State<N>& y1, const Options& o) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = o.atol + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = err[i] / sc;
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(N));
}

template <std::size_t N, class Rhs>
double initial_step(Rhs& f, double t0, const State<N>& y0, const State<N>& f0, double dir,
                    const Options& o) {
  double d0 = 0.0, d1n = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = o.atol + o.rtol * std::abs(y0[i]);
    d0 += (y0[i] / sc) * (y0[i] / sc);
    d1n += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / N);
  d1n = std::sqrt(d1n / N);
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  State<N> y1;
  for (std::size_t i = 0; i < N; ++i) y1[i] = y0[i] + dir * h0 * f0[i];
  const State<N> f1 = f(t0 + dir * h0, y1);
  double d2 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = o.atol + o.rtol * std::abs(y0[i]);
    d2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc);
  }
  d2 = std::sqrt(d2 / N) / h0;
  const double dm = std::max(d1n, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min(100.0 * h0, h1);
}
}  // namespace detail

/**
 * Integrate y' = f(t, y) from t0 to t1 (t1 < t0 integrates backward).
 * After each accepted step, stop(t, y) may end the integration early; the
 * returned solution then ends at the last accepted step.
 */
template <std::size_t N, class Rhs, class Stop = NeverStop>
DenseSolution<N> integrate(Rhs&& f, double t0, const State<N>& y0, double t1,
                           const Options& opt = {}, Stop&& stop = Stop{}) {
  using namespace detail;
  if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw ParameterError("ode: tolerances must be positive");
  DenseSolution<N> sol(t0, y0);
  if (t0 == t1) return sol;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  double hmax = opt.h_max > 0.0 ? opt.h_max : span;

  State<N> y = y0;
  State<N> k1 = f(t0, y);
  double h = opt.h_init > 0.0 ? opt.h_init : initial_step<N>(f, t0, y, k1, dir, opt);
  h = std::min(h, hmax);
  double t = t0;
  double err_old = 1e-4;
  bool rejected = false;
  constexpr double safety = 0.9, fac_min = 0.2, fac_max = 10.0, beta = 0.04;
  constexpr double expo = 0.2 - beta * 0.75;
  const double eps = std::numeric_limits<double>::epsilon();

  State<N> yt, k2, k3, k4, k5, k6, k7, y_new, err;
  for (long n = 0;; ++n) {
    if (n >= opt.max_steps) throw IntegrationError("ode: maximum number of steps exceeded", t, h);
    bool last = false;
    if ((std::abs(t1 - t) - h) <= 10.0 * eps * std::abs(t1)) {
      h = std::abs(t1 - t);
      last = true;
    }
    if (h < 10.0 * eps * std::max(1.0, std::abs(t)))
      throw IntegrationError("ode: step size underflow", t, h);
    const double hs = dir * h;

    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hs * a21 * k1[i];
    k2 = f(t + c2 * hs, yt);
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(t + c3 * hs, yt);
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(t + c4 * hs, yt);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f(t + c5 * hs, yt);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const double t_new = last ? t1 : t + hs;
    k6 = f(t + hs, yt);
    for (std::size_t i = 0; i < N; ++i)
      y_new[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    k7 = f(t_new, y_new);
    for (std::size_t i = 0; i < N; ++i)
      err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

    double e = error_norm<N>(err, y, y_new, opt);
    if (!std::isfinite(e)) e = 1e10;
    if (e <= 1.0) {
      Step<N> s;
      s.t0 = t;
      s.h = t_new - t;
      for (std::size_t i = 0; i < N; ++i) {
        const double dy = y_new[i] - y[i];
        const double bspl = hs * k1[i] - dy;
        s.c[0][i] = y[i];
        s.c[1][i] = dy;
        s.c[2][i] = bspl;
        s.c[3][i] = dy - hs * k7[i] - bspl;
        s.c[4][i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      sol.push(s, t_new, y_new);
      t = t_new;
      y = y_new;
      k1 = k7;
      if (last || stop(t, y)) break;
      double fac = std::pow(std::max(e, 1e-10), expo) / std::pow(err_old, beta);
      fac = std::clamp(fac / safety, 1.0 / fac_max, 1.0 / fac_min);
      double h_next = h / fac;
      if (rejected) h_next = std::min(h_next, h);
      h = std::min(h_next, hmax);
      err_old = std::max(e, 1e-4);
      rejected = false;
    } else {
      const double fac = std::min(1.0 / fac_min, std::pow(e, expo) / safety);
      h /= fac;
      rejected = true;
    }
  }
  return sol;
}

}  // namespace tdho::ode
