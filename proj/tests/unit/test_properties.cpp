// Randomized invariants with fixed seeds.

#include <cmath>
#include <random>

#include <doctest.h>

#include "tdho/angle_action.hpp"
#include "tdho/oracle.hpp"

using namespace tdho;

TEST_SUITE("properties") {
  TEST_CASE("sine Lipschitz lemma") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> a(-20.0, 20.0), d(-4.0, 4.0);
    for (int i = 0; i < 10000; ++i) {
      const double x = a(rng), y = d(rng);
      const double mid = std::sqrt(2.0 * (1.0 - std::cos(y)));
      CHECK(std::abs(std::sin(x + y) - std::sin(x)) <= mid + 1e-15);
      CHECK(mid <= std::abs(y) + 1e-15);
    }
  }

  TEST_CASE("angle-action round trip") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0), w(0.1, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 5000; ++i) {
      const PhaseState s{0.0, u(rng), u(rng)};
      const double om = w(rng);
      const PhaseState b = to_phase(to_angle_action(s, om), om);
      const double scale = std::max({1.0, std::abs(s.q), std::abs(s.p)});
      worst = std::max({worst, std::abs(b.q - s.q) / scale, std::abs(b.p - s.p) / scale});
      const AngleActionState a = to_angle_action(s, om);
      CHECK(a.psi >= 0.0);
      CHECK(a.psi < 2 * M_PI);
      const AngleActionState c = to_angle_action(to_phase(a, om), om);
      CHECK(std::abs(std::remainder(c.psi - a.psi, 2 * M_PI)) < 1e-12);
      CHECK(c.I == doctest::Approx(a.I).epsilon(1e-12));
    }
    CHECK(worst < 1e-12);
  }

  TEST_CASE("matching there and back is the identity") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ang(-10.0, 10.0), w(0.2, 4.0), act(0.1, 3.0);
    for (int i = 0; i < 2000; ++i) {
      const double psi = ang(rng), I = act(rng), w1 = w(rng), w2 = w(rng);
      const auto f = match_discontinuity(psi, I, w1, w2);
      const auto b = match_discontinuity(f.psi, f.I, w2, w1);
      CHECK(std::abs(std::remainder(b.psi - psi, M_PI)) < 1e-12);
      CHECK(b.I == doctest::Approx(I).epsilon(1e-12));
      // action ratio within the extreme ratios
      const double lo = std::min(w1 / w2, w2 / w1), hi = std::max(w1 / w2, w2 / w1);
      CHECK(f.I / I >= lo * (1 - 1e-12));
      CHECK(f.I / I <= hi * (1 + 1e-12));
    }
  }

  TEST_CASE("certified bounds hold for several laws up to order 6") {
    const double tol = 1e-12;
    const std::vector<FrequencyProfile> profiles{
        builtin_profile("mathieu", {{"omega_bar", 1}, {"eta", 0.5}, {"alpha", 0.5}}),
        builtin_profile("mathieu", {{"omega_bar", 1}, {"eta", 0.2}, {"alpha", 2}}),
        builtin_profile("tanh_ramp", {{"epsilon", 0.5}}),
        builtin_profile("bump_ramp", {{"width", 4}}),
    };
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ang(0.0, 2 * M_PI);
    for (const auto& p : profiles) {
      const double psi0 = ang(rng);
      const auto grid = make_grid(p, -4.0, 12.0, 0.0);
      const auto s = picard_I(p, picard_psi(p, psi0, 0.0, grid, 6), 1.0);
      const auto aa_f = integrate_angle_action(p, psi0, 1.0, 0.0, 12.0, tol);
      const auto aa_b = integrate_angle_action(p, psi0, 1.0, 0.0, -4.0, tol);
      for (int h = 0; h <= 6; ++h)
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const auto o = grid[i] >= 0.0 ? aa_f.at(grid[i]) : aa_b.at(grid[i]);
          CHECK(std::abs(o.psi - s.psi[h][i]) <= s.psi_bound[h][i] + 10 * tol);
          if (h >= 1) CHECK(std::abs(std::log(o.I / s.I[h][i])) <= s.log_I_bound[h][i] + 10 * tol);
        }
    }
  }

  TEST_CASE("bounds shrink with the order while g stays small") {
    const auto p = builtin_profile("mathieu", {{"omega_bar", 1}, {"eta", 0.5}, {"alpha", 0.5}});
    const auto grid = make_grid(p, 0.0, 6.0, 0.0);
    const auto s = picard_psi(p, 0.1, 0.0, grid, 5);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!(s.g[i] <= 2.0) || s.g[i] == 0.0) continue;
      for (int h = 0; h < 5; ++h) CHECK(s.psi_bound[h + 1][i] < s.psi_bound[h][i]);
    }
  }

  TEST_CASE("phase integral is the zeroth iterate") {
    const auto p = builtin_profile("mathieu", {{"omega_bar", 1.2}, {"eta", 0.3}, {"alpha", 1.3}});
    const auto grid = make_grid(p, 0.0, 10.0, 2.0);
    const auto s = picard_psi(p, 0.4, 2.0, grid, 2);
    const auto phi = compute_phi(p, 0.4, 2.0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(s.psi[0][i] - phi[i]) < 1e-11);
  }
}
