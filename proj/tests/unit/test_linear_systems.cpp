#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "tdho/errors.hpp"
#include "tdho/linear_systems.hpp"

using namespace tdho;

namespace {
FrequencyProfile mathieu(double wb, double eta, double alpha) {
  return builtin_profile("mathieu", {{"omega_bar", wb}, {"eta", eta}, {"alpha", alpha}});
}

std::vector<double> uniform(double a, double b, int n) {
  std::vector<double> g;
  for (int i = 0; i <= n; ++i) g.push_back(a + (b - a) * i / n);
  return g;
}
}  // namespace

TEST_CASE("fundamental matrix for constant frequency") {
  const double w = 1.7;
  const auto f = fundamental_matrix(builtin_profile("constant", {{"omega", w}}), uniform(0, 10, 100), 1e-12);
  for (double t : {0.0, 1.0, 4.5, 10.0}) {
    const Mat2 V = f.V(t);
    CHECK(V.a11 == doctest::Approx(std::cos(w * t)).epsilon(1e-9));
    CHECK(V.a12 == doctest::Approx(std::sin(w * t) / w).epsilon(1e-9));
    CHECK(V.a21 == doctest::Approx(-w * std::sin(w * t)).epsilon(1e-9));
  }
  CHECK(f.V(0).max_abs_diff(Mat2::identity()) < 1e-15);
  CHECK(f.V(3.0) .max_abs_diff((f.V_inv(3.0)).inverse()) < 1e-9);
}

TEST_CASE("Wronskian on [0, 30]") {
  const auto f = fundamental_matrix(mathieu(1, 0.5, 0.5), uniform(0, 30, 600), 1e-12);
  CHECK(f.wronskian_drift() < 1e-9);
}

TEST_CASE("propagator") {
  const auto p = builtin_profile("constant", {{"omega", 2}});
  const auto f = fundamental_matrix(p, uniform(-5, 5, 100), 1e-12);
  CHECK(propagator(f, 1.3, 1.3).max_abs_diff(Mat2::identity()) < 1e-10);
  const Mat2 P = propagator(f, 3.0, 1.0);
  CHECK(P.a11 == doctest::Approx(std::cos(4.0)).epsilon(1e-9));
  CHECK(P.a12 == doctest::Approx(std::sin(4.0) / 2).epsilon(1e-9));

  // d nu / d t_star at t = t_star is -1, with nu the (1,2) entry
  const auto m = fundamental_matrix(mathieu(1, 0.5, 0.5), uniform(0, 10, 100), 1e-12);
  const double ts = 2.0, h = 1e-5;
  const double d = (propagator(m, ts, ts + h).a12 - propagator(m, ts, ts - h).a12) / (2 * h);
  CHECK(d == doctest::Approx(-1.0).epsilon(1e-7));
  for (double t : {0.5, 4.0, 9.0}) CHECK(propagator(m, t, 3.0).det() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("second derivative of nu in the anchor") {
  const auto p = mathieu(1, 0.5, 0.5);
  const auto m = fundamental_matrix(p, uniform(0, 10, 100), 1e-12);
  const double t = 7.0, h = 1e-3;
  for (double ts : {1.0, 2.5, 4.0}) {
    const double nu = propagator(m, t, ts).a12;
    const double d2 = (propagator(m, t, ts + h).a12 - 2 * nu + propagator(m, t, ts - h).a12) / (h * h);
    CHECK(d2 == doctest::Approx(-p.omega(ts) * p.omega(ts) * nu).epsilon(1e-5));
  }
}

TEST_CASE("inhomogeneous solutions") {
  const auto c = fundamental_matrix(builtin_profile("constant"), uniform(0, 10, 100), 1e-12);
  auto zero = [](double) { return Vec2{0.0, 0.0}; };
  const Vec2 h = solve_inhomogeneous(c, zero, {1.0, 0.0}, 0.0, 2.0);
  CHECK(h[0] == doctest::Approx(std::cos(2.0)).epsilon(1e-9));
  for (double t : {0.5, 2.0, 6.0}) {
    const Vec2 x = solve_inhomogeneous(c, [](double) { return Vec2{0.0, 1.0}; }, {0.0, 0.0}, 0.0, t);
    CHECK(x[0] == doctest::Approx(1 - std::cos(t)).epsilon(1e-9));
  }

  // residual x' - A x - a and superposition
  const auto p = mathieu(1, 0.2, 2);
  const auto m = fundamental_matrix(p, uniform(0, 10, 100), 1e-12);
  auto a1 = [](double t) { return Vec2{0.0, std::sin(t)}; };
  auto a2 = [](double t) { return Vec2{0.1 * t, 1.0}; };
  auto sum = [&](double t) { return Vec2{a1(t)[0] + a2(t)[0], a1(t)[1] + a2(t)[1]}; };
  const Vec2 xs{0.3, -0.2};
  const double t = 4.0, e = 1e-4;
  const Vec2 xm = solve_inhomogeneous(m, a1, xs, 1.0, t - e), x0 = solve_inhomogeneous(m, a1, xs, 1.0, t),
             xp = solve_inhomogeneous(m, a1, xs, 1.0, t + e);
  const double w2 = p.omega(t) * p.omega(t);
  CHECK(std::abs((xp[0] - xm[0]) / (2 * e) - x0[1] - a1(t)[0]) < 1e-8);
  CHECK(std::abs((xp[1] - xm[1]) / (2 * e) + w2 * x0[0] - a1(t)[1]) < 1e-7);
  const Vec2 s = solve_inhomogeneous(m, sum, {0.0, 0.0}, 1.0, t);
  const Vec2 u = solve_inhomogeneous(m, a1, {0.0, 0.0}, 1.0, t), v = solve_inhomogeneous(m, a2, {0.0, 0.0}, 1.0, t);
  CHECK(s[0] == doctest::Approx(u[0] + v[0]).epsilon(1e-9));
  CHECK(s[1] == doctest::Approx(u[1] + v[1]).epsilon(1e-9));
}

TEST_CASE("reduction of an oscillator in normal form is the identity") {
  const auto p = mathieu(1, 0.3, 1.0);
  GeneralSystem sys;
  sys.A = [&](double t) { return Mat2{0.0, 1.0, -p.omega(t) * p.omega(t), 0.0}; };
  sys.a = [](double) { return Vec2{0.0, 0.0}; };
  const Reduction r = reduce_general_system(sys, 0.0, 5.0);
  for (double t : {0.0, 1.0, 3.3, 5.0}) {
    CHECK(std::abs(r.b(t)) < 1e-6);
    CHECK(r.omega_sq(t) == doctest::Approx(p.omega(t) * p.omega(t)).epsilon(1e-6));
  }
  CHECK(r.omega_sq_positive());
}

TEST_CASE("damped oscillator reduction") {
  // x'' + eta x' + kappa x = 0 as a first-order system
  const double kappa = 4.0, eta = 0.2;
  GeneralSystem sys;
  sys.A = [=](double) { return Mat2{0.0, 1.0, -kappa, -eta}; };
  sys.A_dot = [](double) { return Mat2{0.0, 0.0, 0.0, 0.0}; };
  sys.a = [](double) { return Vec2{0.0, 0.0}; };
  const Reduction r = reduce_general_system(sys, 0.0, 10.0);
  CHECK(r.b(3.0) == doctest::Approx(eta / 2));
  CHECK(r.omega_sq(3.0) == doctest::Approx(kappa - eta * eta / 4));
  CHECK(r.omega_sq(3.0) == doctest::Approx(3.99));

  // reduced solutions map back to solutions of the original system
  const auto fund = fundamental_matrix(r.profile(), uniform(0, 10, 200), 1e-12);
  const Vec2 x0 = r.to_reduced(0.0, {1.0, 0.0});
  for (double t : {1.0, 4.0, 9.0}) {
    const Vec2 x = propagator(fund, t, 0.0) * x0;
    const Vec2 back = r.to_original(t, x);
    const double wd = std::sqrt(kappa - eta * eta / 4);
    const double exact = std::exp(-eta * t / 2) * (std::cos(wd * t) + eta / (2 * wd) * std::sin(wd * t));
    CHECK(back[0] == doctest::Approx(exact).epsilon(1e-8));
  }

  GeneralSystem bad = sys;
  bad.A = [](double t) { return Mat2{0.0, t - 1.0, -1.0, 0.0}; };
  CHECK_THROWS_AS((void)reduce_general_system(bad, 0.0, 2.0), DomainError);
}

TEST_CASE("Ermakov invariant for constant frequency") {
  const double w = 2.0;
  const auto f = fundamental_matrix(builtin_profile("constant", {{"omega", w}}), uniform(0, 10, 100), 1e-12);
  ErmakovOptions o;
  o.C = Mat2{1.0 / std::sqrt(w), 0.0, 0.0, std::sqrt(w)};
  const auto r = ermakov_check(f, o);
  // rho = sqrt(L / omega)
  CHECK(r.rho_min == doctest::Approx(std::sqrt(1.0 / w)).epsilon(1e-8));
  CHECK(r.rho_max == doctest::Approx(std::sqrt(1.0 / w)).epsilon(1e-8));
  // I_E = L * action for the test solution (1, 0)
  CHECK(r.invariant_values[0] == doctest::Approx(1.0 * (w * w) / (2 * w)).epsilon(1e-8));
  CHECK(r.invariant_drift < 1e-10);
}

TEST_CASE("Ermakov invariant for Mathieu on [0, 30]") {
  const auto f = fundamental_matrix(mathieu(1, 0.5, 0.5), uniform(0, 30, 600), 1e-12);
  const auto r = ermakov_check(f);
  CHECK(r.invariant_drift < 1e-8);
  CHECK(r.fundamental_defect < 1e-8);
  CHECK(r.rho_min > 0.0);
  CHECK(r.ermakov_residual < 1e-6);
  CHECK(r.general_solution_residual < 1e-7);
}

TEST_CASE("fundamental CSV") {
  std::ostringstream out;
  write_fundamental_csv(out, fundamental_matrix(builtin_profile("constant"), uniform(0, 1, 4)));
  CHECK(out.str().find("det") != std::string::npos);
}
