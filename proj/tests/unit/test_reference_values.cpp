// Values checked first: frozen from the independent RK4/Simpson references in
// tests/support, closed-form literature values, and trivial identities.

#include <cmath>

#include <doctest.h>

#include "reference.hpp"
#include "tdho/angle_action.hpp"
#include "tdho/floquet.hpp"
#include "tdho/frequency.hpp"
#include "tdho/oracle.hpp"

using namespace tdho;

namespace {

// frozen from ref::simpson / ref::rk4_qp (see tests/support/reference.hpp)
constexpr double kGMathieuPeriod = 1.0986122886681224;   // omega_bar=1, eta=0.5, alpha=0.5 over [0, 4 pi]
constexpr double kPhi10 = 10.004901022064759;            // omega_bar=1, eta=0.2, alpha=2
constexpr double kQ30 = 0.83399674196182805;             // same law, (1, 0) at 0
constexpr double kP30 = 4.3486380828944995;
constexpr double kMuResonant = -1.0123334577079675;      // same law, one period
constexpr double kQ2Slow30 = -0.79107154122427181;       // eta=0.5, alpha=0.5, (0, 1) at 0
constexpr double kP2Slow30 = 0.63299234654999437;

FrequencyProfile mathieu(double wb, double eta, double alpha) {
  return builtin_profile("mathieu", {{"omega_bar", wb}, {"eta", eta}, {"alpha", alpha}});
}

}  // namespace

TEST_SUITE("frozen") {
  TEST_CASE("total variation over one Mathieu period") {
    CHECK(total_variation_g(mathieu(1, 0.5, 0.5), 0.0, 4 * M_PI) == doctest::Approx(kGMathieuPeriod).epsilon(1e-9));
    // sup/inf ratio form of the same number
    CHECK(kGMathieuPeriod == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  }

  TEST_CASE("phase at t = 10") {
    const auto phi = compute_phi(mathieu(1, 0.2, 2), 0.0, 0.0, {0.0, 10.0});
    CHECK(phi[1] == doctest::Approx(kPhi10).epsilon(1e-11));
  }

  TEST_CASE("Mathieu solution at t = 30") {
    const PhaseState s = integrate_qp(mathieu(1, 0.2, 2), 1, 0, 0, 30, 1e-12).at(30);
    CHECK(s.q == doctest::Approx(kQ30).epsilon(1e-8));
    CHECK(s.p == doctest::Approx(kP30).epsilon(1e-8));
    const PhaseState r = integrate_qp(mathieu(1, 0.5, 0.5), 0, 1, 0, 30, 1e-12).at(30);
    CHECK(r.q == doctest::Approx(kQ2Slow30).epsilon(1e-8));
    CHECK(r.p == doctest::Approx(kP2Slow30).epsilon(1e-8));
  }

  TEST_CASE("half trace of the resonant monodromy") {
    const MonodromyReport m = monodromy(mathieu(1, 0.2, 2));
    CHECK(m.mu == doctest::Approx(kMuResonant).epsilon(1e-9));
    CHECK(m.classification == Stability::unstable);
  }
}

TEST_SUITE("closed form") {
  TEST_CASE("zeroth-order angle error bound for a doubling ramp") {
    const auto p = builtin_profile("spline_ramp", {{"lo", 1}, {"hi", 2}, {"width", 10}});
    CHECK(total_variation_g(p, -50.0, 50.0) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
    CHECK(0.5 * std::log(2.0) == doctest::Approx(0.3466).epsilon(1e-4));
  }

  TEST_CASE("beat amplitude and period predictions") {
    const double eta = 0.1, alpha = 1.9, wb = 1.0;
    CHECK(std::abs(eta) * alpha / (4 * std::abs(2 * wb - alpha)) == doctest::Approx(0.475));
    CHECK(2 * M_PI / std::abs(2 * wb - alpha) == doctest::Approx(20 * M_PI));
  }

  TEST_CASE("resonant chi over one period") {
    for (double eta : {0.05, 0.1, 0.2})
      CHECK(mathieu_chi(0.0, eta, 2.0, 1.0, M_PI) == doctest::Approx(eta * M_PI / 4).epsilon(1e-12));
  }

  TEST_CASE("tongue half-width prediction") {
    const auto [lo, hi] = analytic_tongue(2.0, 0.1);
    CHECK(0.5 * (hi - lo) == doctest::Approx(0.1 * 2.0 / 8).epsilon(1e-12));
  }
}

TEST_SUITE("trivial") {
  TEST_CASE("constant frequency zeros sit at h pi / 2 omega") {
    const double w = 2.0;
    const auto s = integrate_qp(builtin_profile("constant", {{"omega", w}}), 0, 1, 0, 4, 1e-12);
    for (int h = 0; h < 5; ++h) {
      const PhaseState x = s.at(h * M_PI / (2 * w));
      CHECK(std::abs(h % 2 == 0 ? x.q : x.p) < 1e-10);
    }
  }

  TEST_CASE("resonance points are j pi / T") {
    const auto r = resonance_points(M_PI, 3);
    REQUIRE(r.size() == 3);
    CHECK(r[1] == doctest::Approx(2.0));
  }
}
