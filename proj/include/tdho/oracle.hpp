#pragma once

/**
 * @file oracle.hpp
 * @brief Reference solutions of q'' = -omega(t)^2 q by adaptive Runge-Kutta,
 *        in (q, p) and in angle-action variables.
 */

#include <iosfwd>
#include <string>
#include <vector>

#include "tdho/frequency.hpp"
#include "tdho/ode.hpp"
#include "tdho/quadrature.hpp"
#include "tdho/states.hpp"

namespace tdho {

inline constexpr double kDefaultTol = 1e-10;

/// Dense (q, p) solution, split into pieces at declared discontinuities.
class Trajectory {
 public:
  Trajectory(std::vector<ode::DenseSolution<2>> pieces, double tol, std::string profile_kind);

  [[nodiscard]] PhaseState at(double t) const;
  [[nodiscard]] double t_begin() const;
  [[nodiscard]] double t_end() const;
  [[nodiscard]] double tolerance() const { return tol_; }
  [[nodiscard]] const std::string& profile_kind() const { return kind_; }
  /// States at the accepted step points, ordered by increasing time.
  [[nodiscard]] std::vector<PhaseState> samples() const;
  [[nodiscard]] const std::vector<ode::DenseSolution<2>>& pieces() const { return pieces_; }

 private:
  std::vector<ode::DenseSolution<2>> pieces_;
  double tol_;
  std::string kind_;
};

/// Dense (psi, log I) solution with matching applied at declared discontinuities.
class AngleActionTrajectory {
 public:
  AngleActionTrajectory(std::vector<ode::DenseSolution<2>> pieces, double tol, std::string profile_kind);

  /// At a discontinuity, returns the limit from the side of the initial time.
  [[nodiscard]] AngleActionState at(double t) const;
  [[nodiscard]] double t_begin() const;
  [[nodiscard]] double t_end() const;
  [[nodiscard]] double tolerance() const { return tol_; }
  [[nodiscard]] const std::string& profile_kind() const { return kind_; }
  [[nodiscard]] std::vector<AngleActionState> samples() const;
  [[nodiscard]] const std::vector<ode::DenseSolution<2>>& pieces() const { return pieces_; }

 private:
  std::vector<ode::DenseSolution<2>> pieces_;
  double tol_;
  std::string kind_;
};

/// Integrate q' = p, p' = -omega^2 q from (t0, q0, p0) to t1 (either direction).
[[nodiscard]] Trajectory integrate_qp(const FrequencyProfile& profile, double q0, double p0, double t0,
                                      double t1, double tol = kDefaultTol);

/// Integrate psi' = omega + (omega_dot/2 omega) sin 2psi, (log I)' = -(omega_dot/omega) cos 2psi.
[[nodiscard]] AngleActionTrajectory integrate_angle_action(const FrequencyProfile& profile, double psi0,
                                                           double I0, double t0, double t1,
                                                           double tol = kDefaultTol);

/// ODE options for a given oracle tolerance (the per-step tolerance is tol/32).
[[nodiscard]] ode::Options oracle_options(double tol);

/// CSV export: columns t,q,p[,psi,I] at the step points of the (q,p) trajectory.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const AngleActionTrajectory* angle_action = nullptr);

}  // namespace tdho
