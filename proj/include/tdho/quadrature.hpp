#pragma once

#include <functional>
#include <vector>

namespace tdho {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

/**
 * Globally adaptive Gauss-Kronrod 7/15 quadrature of f over [a,b] (a > b allowed).
 * Breakpoints inside the interval are used as initial subdivision points.
 * The absolute error target is tol, raised to the roundoff floor when tol is
 * below it. Throws QuadratureError carrying the achieved error when
 * max_intervals is exhausted.
 */
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double tol, const std::vector<double>& breakpoints = {},
                                    int max_intervals = 20000);

/// Value-only convenience wrapper around integrate_adaptive.
[[nodiscard]] double quadrature(const std::function<double(double)>& f, double a, double b,
                                double tol, const std::vector<double>& breakpoints = {});

/// m-point Gauss-Legendre rule on [-1,1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
[[nodiscard]] GaussRule gauss_legendre(int m);

/// Legendre polynomial P_n(x) on [-1,1].
[[nodiscard]] double legendre(int n, double x);

}  // namespace tdho
