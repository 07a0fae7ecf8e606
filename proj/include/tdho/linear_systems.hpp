#pragma once

/**
 * @file linear_systems.hpp
 * @brief Fundamental matrices, propagators, inhomogeneous solutions, reduction
 *        of general 2x2 systems to oscillator form and the Ermakov invariant.
 */

#include <functional>
#include <iosfwd>
#include <vector>

#include "tdho/frequency.hpp"
#include "tdho/mat2.hpp"
#include "tdho/oracle.hpp"

namespace tdho {

/// q1, q2 with q1(0) = q2'(0) = 1, q2(0) = q1'(0) = 0, as dense oracle trajectories.
class FundamentalMatrix {
 public:
  FundamentalMatrix(FrequencyProfile profile, Trajectory q1, Trajectory q2, std::vector<double> grid);

  /// V = [[q1, q2], [q1', q2']]
  [[nodiscard]] Mat2 V(double t) const;
  /// V^{-1} = [[q2', -q2], [-q1', q1]] (unit Wronskian)
  [[nodiscard]] Mat2 V_inv(double t) const;
  [[nodiscard]] double wronskian(double t) const { return V(t).det(); }
  /// max |det V - 1| over the grid
  [[nodiscard]] double wronskian_drift() const { return drift_; }

  [[nodiscard]] const FrequencyProfile& profile() const { return profile_; }
  [[nodiscard]] const Trajectory& q1() const { return q1_; }
  [[nodiscard]] const Trajectory& q2() const { return q2_; }
  [[nodiscard]] const std::vector<double>& grid() const { return grid_; }
  [[nodiscard]] double t_min() const { return q1_.t_begin(); }
  [[nodiscard]] double t_max() const { return q1_.t_end(); }

 private:
  FrequencyProfile profile_;
  Trajectory q1_;
  Trajectory q2_;
  std::vector<double> grid_;
  double drift_ = 0.0;
};

/// Integrates q1, q2 from t = 0 over the hull of {0} and the grid.
[[nodiscard]] FundamentalMatrix fundamental_matrix(const FrequencyProfile& profile, const std::vector<double>& t_grid,
                                                   double tol = kDefaultTol);

/// V(t) V^{-1}(t_star)
[[nodiscard]] Mat2 propagator(const FundamentalMatrix& fund, double t, double t_star);

/// x(t) for x' = A x + a with A = [[0,1],[-omega^2,0]], x(t_star) = x_star.
[[nodiscard]] Vec2 solve_inhomogeneous(const FundamentalMatrix& fund, const std::function<Vec2(double)>& forcing,
                                       const Vec2& x_star, double t_star, double t, double tol = 1e-11);

/// x~' = A~(t) x~ + a~(t).
struct GeneralSystem {
  std::function<Mat2(double)> A;
  /// Derivative of A; central finite differences are used when empty.
  std::function<Mat2(double)> A_dot;
  std::function<Vec2(double)> a;
};

/**
 * Reduction of a general system to x' = [[0,1],[-omega^2,0]] x + a via
 * x = e^Lambda B x~, B = [[1,0],[b, A~12]], with Lambda(t0) = 0.
 */
class Reduction {
 public:
  Reduction(GeneralSystem sys, double t0, double t1, int samples);

  [[nodiscard]] double b(double t) const;
  [[nodiscard]] double omega_sq(double t) const;
  [[nodiscard]] double lambda(double t) const;
  [[nodiscard]] Mat2 B(double t) const;
  /// x = e^Lambda B x~
  [[nodiscard]] Vec2 to_reduced(double t, const Vec2& x_orig) const;
  /// x~ = e^{-Lambda} B^{-1} x
  [[nodiscard]] Vec2 to_original(double t, const Vec2& x_reduced) const;
  /// a = e^Lambda B a~
  [[nodiscard]] Vec2 reduced_forcing(double t) const;

  /// sign of omega^2 on the sampled domain
  [[nodiscard]] bool omega_sq_positive() const { return positive_; }
  [[nodiscard]] double omega_sq_min() const { return omega_sq_min_; }
  [[nodiscard]] const std::vector<double>& sample_times() const { return ts_; }
  [[nodiscard]] const std::vector<double>& omega_sq_samples() const { return w2_; }
  /// Frequency profile sqrt(omega^2); throws DomainError unless omega^2 > 0 on the domain.
  [[nodiscard]] FrequencyProfile profile() const;

 private:
  [[nodiscard]] Mat2 A_dot(double t) const;
  GeneralSystem sys_;
  double t0_, t1_;
  std::vector<double> ts_;
  std::vector<double> w2_;
  bool positive_ = false;
  double omega_sq_min_ = 0.0;
};

/// Throws DomainError when A~12 vanishes on [t0, t1].
[[nodiscard]] Reduction reduce_general_system(const GeneralSystem& sys, double t0, double t1, int samples = 1025);

struct ErmakovOptions {
  /// (u, v) = C (q1, q2)^T; defaults give rho = sqrt(q1^2 + q2^2).
  Mat2 C = Mat2::identity();
  double L = 1.0;
  /// Initial data (q, q') at t = 0 of the solutions along which the invariant is checked.
  std::vector<Vec2> test_solutions{{1.0, 0.0}, {0.0, 1.0}, {0.3, -0.7}};
  /// Random (A, alpha) pairs for the general-solution check.
  std::vector<Vec2> amplitude_phase{{1.0, 0.0}, {0.4, 1.3}, {2.5, -2.0}};
  int samples = 601;
  double fd_step = 1e-4;
};

struct ErmakovReport {
  double L = 1.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  double ermakov_residual = 0.0;       ///< max |rho'' + omega^2 rho - L^2/rho^3|
  double invariant_drift = 0.0;        ///< max relative drift of I_E over the test solutions
  double fundamental_defect = 0.0;     ///< max |2 I_E - L^2| for q1, q2 (C = I only)
  double general_solution_residual = 0.0;  ///< max |q'' + omega^2 q| for A rho sin(theta + alpha)
  std::vector<double> invariant_values;    ///< I_E at t = 0 per test solution
};

[[nodiscard]] ErmakovReport ermakov_check(const FundamentalMatrix& fund, const ErmakovOptions& opts = {});

/// CSV time series: t, q1, q2, q1', q2', det V.
void write_fundamental_csv(std::ostream& out, const FundamentalMatrix& fund);

}  // namespace tdho
