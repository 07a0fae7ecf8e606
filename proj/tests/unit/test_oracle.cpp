#include <cmath>

#include <doctest.h>

#include "reference.hpp"
#include "tdho/angle_action.hpp"
#include "tdho/errors.hpp"
#include "tdho/oracle.hpp"
#include "tdho/quadrature.hpp"

using namespace tdho;

namespace {
FrequencyProfile mathieu(double wb, double eta, double alpha) {
  return builtin_profile("mathieu", {{"omega_bar", wb}, {"eta", eta}, {"alpha", alpha}});
}
}  // namespace

TEST_CASE("constant frequency solutions") {
  const auto s = integrate_qp(builtin_profile("constant"), 0, 1, 0, M_PI / 2, 1e-12).at(M_PI / 2);
  CHECK(s.q == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(s.p) < 1e-10);
  const auto c = integrate_qp(builtin_profile("constant", {{"omega", 2}}), 1, 0, 0, M_PI, 1e-12).at(M_PI);
  CHECK(c.q == doctest::Approx(1.0).epsilon(1e-10));
  const auto aa = integrate_angle_action(builtin_profile("constant", {{"omega", 2}}), 0.3, 0.7, 0, 5, 1e-12);
  CHECK(aa.at(5).psi == doctest::Approx(0.3 + 10).epsilon(1e-12));
  CHECK(aa.at(5).I == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("backward integration") {
  const auto s = integrate_qp(builtin_profile("constant"), 1, 0, 0, -M_PI, 1e-12).at(-M_PI);
  CHECK(s.q == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("angle-action and (q, p) oracles agree") {
  for (const auto& p : {mathieu(1, 0.2, 2), mathieu(1, 0.5, 0.5), builtin_profile("tanh_ramp", {{"epsilon", 0.5}})}) {
    const double tol = 1e-10;
    const auto qp = integrate_qp(p, 0.4, -0.9, 0, 20, tol);
    const AngleActionState s0 = to_angle_action({0, 0.4, -0.9}, p.omega(0));
    const auto aa = integrate_angle_action(p, s0.psi, s0.I, 0, 20, tol);
    double worst = 0.0, worst_I = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double t = 0.1 * i;
      const PhaseState a = qp.at(t);
      const PhaseState b = to_phase(aa.at(t), p.omega(t));
      worst = std::max({worst, std::abs(a.q - b.q), std::abs(a.p - b.p)});
      const double H = 0.5 * (a.p * a.p + p.omega(t) * p.omega(t) * a.q * a.q);
      worst_I = std::max(worst_I, std::abs(H / p.omega(t) - aa.at(t).I));
    }
    CHECK(worst < 10 * tol);
    CHECK(worst_I < 100 * tol);
  }
}

TEST_CASE("halving the tolerance halves the cross-oracle gap") {
  // proportional error control at fifth order: the global error is linear in tol
  const auto p = mathieu(1, 0.2, 2);
  const AngleActionState s0 = to_angle_action({0, 1, 0}, 1.0);
  auto gap = [&](double tol) {
    const auto a = integrate_qp(p, 1, 0, 0, 30, tol).at(30);
    const auto b = to_phase(integrate_angle_action(p, s0.psi, s0.I, 0, 30, tol).at(30), p.omega(30));
    return std::hypot(a.q - b.q, a.p - b.p);
  };
  for (double tol : {1e-8, 1e-9}) CHECK(gap(tol) > 1.8 * gap(tol / 2));
}

TEST_CASE("oracle against RK4 reference") {
  const auto r = ref::rk4_qp(ref::mathieu(1, 0.5, 0.5), 0.3, 0.8, 0, 12, 200000);
  const auto s = integrate_qp(mathieu(1, 0.5, 0.5), 0.3, 0.8, 0, 12, 1e-12).at(12);
  CHECK(s.q == doctest::Approx(r[0]).epsilon(1e-9));
  CHECK(s.p == doctest::Approx(r[1]).epsilon(1e-9));
}

TEST_CASE("continuity of (q, p) across a declared jump") {
  const auto p = builtin_profile("step", {{"omega_minus", 1}, {"omega_plus", 2}, {"t_d", 1}});
  const auto s = integrate_qp(p, 1, 0, 0, 3, 1e-12);
  CHECK(s.at(1.0).q == doctest::Approx(std::cos(1.0)).epsilon(1e-10));
  const double q1 = std::cos(1.0), p1 = -std::sin(1.0);
  const double q3 = q1 * std::cos(4.0) + p1 / 2 * std::sin(4.0);
  CHECK(s.at(3.0).q == doctest::Approx(q3).epsilon(1e-9));
  // angle-action side goes through the matching relations
  const AngleActionState a0 = to_angle_action({0, 1, 0}, 1.0);
  const auto aa = integrate_angle_action(p, a0.psi, a0.I, 0, 3, 1e-12);
  const PhaseState back = to_phase(aa.at(3.0), 2.0);
  CHECK(back.q == doctest::Approx(q3).epsilon(1e-9));
}

TEST_CASE("Wronskian of the two oracle solutions") {
  const auto p = mathieu(1, 0.5, 0.5);
  const double tol = 1e-10;
  const auto a = integrate_qp(p, 1, 0, 0, 30, tol), b = integrate_qp(p, 0, 1, 0, 30, tol);
  for (int i = 0; i <= 60; ++i) {
    const double t = 0.5 * i;
    const PhaseState x = a.at(t), y = b.at(t);
    CHECK(std::abs(x.q * y.p - y.q * x.p - 1.0) < 100 * tol);
  }
}

TEST_CASE("resonant action starts with the sign of -cos(2 psi*)") {
  const auto p = mathieu(1, 0.1, 2);
  // log I ~ -eta omega_bar cos(2 psi*) t / 2 while the data sit near one Floquet mode
  const auto down = integrate_angle_action(p, 0.0, 1.0, 0, 60, 1e-11);
  CHECK(std::log(down.at(60).I) == doctest::Approx(-0.1 * 60 / 2).epsilon(0.1));
  const auto up = integrate_angle_action(p, M_PI / 2, 1.0, 0, 60, 1e-11);
  CHECK(std::log(up.at(60).I) == doctest::Approx(0.1 * 60 / 2).epsilon(0.1));
}

TEST_CASE("quadrature") {
  CHECK(quadrature([](double) { return 3.5; }, 0, 1, 1e-12) == doctest::Approx(3.5));
  CHECK(quadrature([](double z) { return std::sin(z); }, 0, M_PI, 1e-12) == doctest::Approx(2.0).epsilon(1e-12));
  const auto p = mathieu(1, 0.2, 2);
  auto f = [&](double z) { return p.omega_dot(z) / (2 * p.omega(z)) * std::sin(2 * z); };
  const double a = quadrature(f, 0, 2 * M_PI, 1e-8), b = quadrature(f, 0, 2 * M_PI, 1e-12);
  CHECK(std::abs(a - b) < 1e-8);
  CHECK_THROWS_AS((void)integrate_adaptive([](double z) { return 1.0 / std::sqrt(std::abs(z - 0.3)); }, 0, 1, 1e-14, {}, 10),
                  QuadratureError);
}
