#pragma once

/**
 * @file angle_action.hpp
 * @brief Angle-action variables, Picard iterates with certified error bounds,
 *        discontinuity matching, closed-form approximants and envelope bounds.
 */

#include <iosfwd>
#include <optional>
#include <vector>

#include "tdho/frequency.hpp"
#include "tdho/states.hpp"

namespace tdho {

/// I = (p^2 + omega^2 q^2)/(2 omega), psi = atan2(omega q, p) placed in [0, 2 pi).
/// Throws DomainError at the origin or for omega <= 0.
[[nodiscard]] AngleActionState to_angle_action(const PhaseState& state, double omega);

/// q = sqrt(2I/omega) sin psi, p = sqrt(2 I omega) cos psi. Throws DomainError for I < 0.
[[nodiscard]] PhaseState to_phase(const AngleActionState& state, double omega);

struct MatchResult {
  double psi;
  double I;
};

/// Continuity of (q, p) across a jump omega_minus -> omega_plus, in angle-action form.
/// psi_plus stays in the quadrant of psi_minus (no reduction mod 2 pi).
[[nodiscard]] MatchResult match_discontinuity(double psi_minus, double I_minus, double omega_minus,
                                              double omega_plus);

/// phi(t) = psi_star + integral of omega from t_star, at each grid time (adaptive quadrature).
[[nodiscard]] std::vector<double> compute_phi(const FrequencyProfile& profile, double psi_star, double t_star,
                                              const std::vector<double>& grid, double tol = 1e-12);

/// Uniform grid on [a,b] containing t_star and every declared discontinuity,
/// with spacing at most 1/(points_per_radian * max omega).
[[nodiscard]] std::vector<double> make_grid(const FrequencyProfile& profile, double a, double b, double t_star,
                                            double points_per_radian = 64.0);

struct PicardOptions {
  int nodes_per_cell = 8;
  double quad_tol = 1e-13;
  /// Throw RefinementRequired when the collocation error indicator exceeds
  /// max(1% of the certified bound, resolution_floor).
  bool check_resolution = true;
  double resolution_floor = 1e-12;
};

/**
 * Picard iterates on a grid. Index [k][i] refers to order k and grid[i].
 * At a declared discontinuity the stored value is the limit from the side of
 * t_star; beyond it, iterates continue through the matching relations and
 * the certified bounds are +inf.
 */
struct PicardSeries {
  int order = 0;
  double t_star = 0.0;
  double psi_star = 0.0;
  std::size_t star_index = 0;
  std::vector<double> grid;
  std::vector<double> phi;
  std::vector<std::vector<double>> psi;        // orders 0..order
  std::vector<double> g;                       // total variation of log omega from t_star
  std::vector<std::vector<double>> psi_bound;  // g^{k+1} / (2 (k+1)!)
  std::vector<double> resolution_indicator;    // accumulated collocation indicator, last order

  // Filled by picard_I.
  double I_star = 0.0;
  std::vector<std::vector<double>> I;          // orders 0..order
  std::vector<std::vector<double>> log_I_bound;  // g^{k+1} / (k+1)!

  // Collocation data reused by picard_I.
  int nodes_per_cell = 8;
  std::vector<std::vector<double>> node_psi;
};

[[nodiscard]] PicardSeries picard_psi(const FrequencyProfile& profile, double psi_star, double t_star,
                                      const std::vector<double>& grid, int h, const PicardOptions& opts = {});

/// Returns a copy of the series with the action iterates I^(0..order) and their bounds.
[[nodiscard]] PicardSeries picard_I(const FrequencyProfile& profile, const PicardSeries& series, double I_star,
                                    const PicardOptions& opts = {});

/// CSV export: t, phi, psi_0..psi_h, I_0..I_h (if present), g, psi_bound_h, log_I_bound_h.
void write_picard_csv(std::ostream& out, const PicardSeries& series);
/// JSON export of the same data.
void write_picard_json(std::ostream& out, const PicardSeries& series);

[[nodiscard]] PhaseState approx_zeroth(const FrequencyProfile& profile, double psi_star, double I_star,
                                       double t_star, double t);
[[nodiscard]] PhaseState approx_tilde(const FrequencyProfile& profile, double psi_star, double I_star,
                                      double t_star, double t);
/// q^ = sqrt(2 I^(1)/omega) sin phi at a single time.
[[nodiscard]] double approx_hat(const FrequencyProfile& profile, double psi_star, double I_star, double t_star,
                                double t);
/// q^ at every grid time (grid must contain t_star).
[[nodiscard]] std::vector<double> approx_hat(const FrequencyProfile& profile, double psi_star, double I_star,
                                             double t_star, const std::vector<double>& grid);

struct EnvelopeBounds {
  double t = 0.0;
  double phi = 0.0;
  double phi1 = 0.0;
  double psi_low = 0.0;
  double psi_high = 0.0;
  double I_low = 0.0;
  double I_high = 0.0;
  /// Endpoint where the one-sided I bound stops being valid (nullopt: not reached by t).
  std::optional<double> t_bar;
  bool I_low_valid = true;
  bool I_high_valid = true;
  /// true when omega_dot sin(2 psi) >= 0 on the interval (phi is the lower psi bound)
  bool phi_is_lower = true;
};

/// Bounds on psi and I on [t_h, t] for omega monotone there, with psi(t_h) = h pi/2
/// and I(t_h) = I_h. Throws DomainError if omega is not monotone on the interval.
[[nodiscard]] EnvelopeBounds envelope_bounds(const FrequencyProfile& profile, double t_h, double t, int h,
                                             double I_h = 1.0);

struct LambdaNormBound {
  double mu = 0.0;
  double lambda = 0.0;
  double nu = 0.0;
  double norm = 0.0;  ///< weighted sup of |phi - psi^(1)| for the requested lambda
  std::vector<double> grid;
  std::vector<double> bound;       ///< bound at each grid time for the requested lambda
  std::vector<double> best_bound;  ///< infimum over the lambda grid, per grid time
};

/// Weighted-norm alternative bound on |psi - psi^(h)| over K = [a,b].
/// Throws ParameterError if lambda <= mu/2 with mu = sup_K |omega_dot/omega|.
[[nodiscard]] LambdaNormBound lambda_norm_bound(const FrequencyProfile& profile, double a, double b,
                                                double t_star, int h, double lambda, double psi_star = 0.0,
                                                int lambda_grid = 256);

}  // namespace tdho
