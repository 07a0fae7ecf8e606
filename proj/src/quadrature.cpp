#include "tdho/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include "tdho/errors.hpp"

namespace tdho {

namespace {

constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error, abs_value;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b, int& evals) {
  const double c = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWk[7];
  double gauss = fc * kWg[3];
  double absk = std::abs(fc) * kWk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = hw * kXk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    kron += kWk[j] * (f1 + f2);
    absk += kWk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  evals += 15;
  const double value = kron * hw;
  return {a, b, value, std::abs((kron - gauss) * hw), std::abs(absk * hw)};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double tol, const std::vector<double>& breakpoints,
                                    int max_intervals) {
  if (!(tol > 0.0)) throw ParameterError("quadrature: tol must be positive");
  if (a == b) return {};
  const double sign = (b < a) ? -1.0 : 1.0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);

  std::vector<double> cuts{lo};
  for (double x : breakpoints)
    if (x > lo && x < hi) cuts.push_back(x);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());

  QuadratureResult res;
  std::priority_queue<Segment> heap;
  double total = 0.0;
  double total_err = 0.0;
  double total_abs = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    Segment s = gk15(f, cuts[i], cuts[i + 1], res.evaluations);
    total += s.value;
    total_err += s.error;
    total_abs += s.abs_value;
    heap.push(s);
  }

  const double eps = std::numeric_limits<double>::epsilon();
  int intervals = static_cast<int>(heap.size());
  while (true) {
    const double floor_tol = 50.0 * eps * total_abs;
    if (total_err <= std::max(tol, floor_tol)) break;
    if (intervals >= max_intervals) {
      throw QuadratureError("quadrature: interval budget exhausted", sign * total, total_err);
    }
    Segment s = heap.top();
    heap.pop();
    const double mid = 0.5 * (s.a + s.b);
    if (!(mid > s.a && mid < s.b) || (s.b - s.a) < 64.0 * eps * std::max(1.0, std::abs(mid))) {
      throw QuadratureError("quadrature: resolution limit reached", sign * total, total_err);
    }
    Segment left = gk15(f, s.a, mid, res.evaluations);
    Segment right = gk15(f, mid, s.b, res.evaluations);
    total += left.value + right.value - s.value;
    total_err += left.error + right.error - s.error;
    total_abs += left.abs_value + right.abs_value - s.abs_value;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Resum to remove drift from incremental updates.
  double sum = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  res.value = sign * sum;
  res.error = err;
  return res;
}

double quadrature(const std::function<double(double)>& f, double a, double b, double tol,
                  const std::vector<double>& breakpoints) {
  return integrate_adaptive(f, a, b, tol, breakpoints).value;
}

double legendre(int n, double x) {
  if (n == 0) return 1.0;
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

GaussRule gauss_legendre(int m) {
  if (m < 1) throw ParameterError("gauss_legendre: m must be >= 1");
  GaussRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < m; ++i) {
    double x = std::cos(pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double p = legendre(m, x);
      const double pm1 = legendre(m - 1, x);
      dp = m * (x * p - pm1) / (x * x - 1.0);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double p = legendre(m, x);
    const double pm1 = legendre(m - 1, x);
    dp = m * (x * p - pm1) / (x * x - 1.0);
    rule.nodes[m - 1 - i] = x;
    rule.weights[m - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace tdho
