#pragma once

/**
 * @file floquet.hpp
 * @brief Periodic frequency laws: monodromy, stability class, the trace formula
 *        in angle-action form, leading-order Mathieu estimates and stability maps.
 */

#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tdho/frequency.hpp"
#include "tdho/linear_systems.hpp"
#include "tdho/mat2.hpp"

namespace tdho {

enum class Stability { stable, marginal, unstable };

[[nodiscard]] std::string to_string(Stability s);

/// | |mu| - 1 | below this is classified marginal.
inline constexpr double kMarginalBand = 1e-7;

struct MonodromyReport {
  double T = 0.0;
  Mat2 M;
  double mu = 0.0;  ///< Tr(M)/2
  std::pair<std::complex<double>, std::complex<double>> eigenvalues;
  Stability classification = Stability::stable;
  double det_defect = 0.0;  ///< |det M - 1|
};

[[nodiscard]] Stability classify(double mu, double band = kMarginalBand);

/// M = V(T). Throws ParameterError when the profile has no period.
[[nodiscard]] MonodromyReport monodromy(const FrequencyProfile& profile, double tol = 1e-12);

/// V(t + nT) = V(t) M^n for t inside the integrated range of fund.
[[nodiscard]] Mat2 floquet_extend(const MonodromyReport& report, const FundamentalMatrix& fund, double t, unsigned n);

struct TraceReport {
  double mu = 0.0;
  double psi1_T = 0.0, psi2_T = 0.0;
  double Psi1_T = 0.0, Psi2_T = 0.0;
  /// max deviation of q1, q1', q2, q2' at T rebuilt from (psi_a, Psi_a) against the (q, p) oracle
  double identity_defect = 0.0;
};

/// 2 mu = e^{-Psi1} sin psi1(T) + e^{-Psi2} cos psi2(T) from two angle-action solutions.
[[nodiscard]] TraceReport trace_via_angle_action(const FrequencyProfile& profile, double tol = 1e-12);

struct LeadingOrderTrace {
  double omega_bar = 0.0;  ///< phi(T)/T
  double chi_T = 0.0;
  double mu0 = 0.0;  ///< cos(omega_bar T) cosh(chi(T))
};

/// Leading-order trace, with chi(T) = integral over a period of (omega_dot/2 omega) cos(2 omega_bar z).
[[nodiscard]] LeadingOrderTrace mu_leading_order(const FrequencyProfile& profile);

/// Relative threshold on |alpha - 2 omega_bar| selecting the resonant branch.
inline constexpr double kResonanceSwitch = 1e-9;

/// Leading-order chi(t) for omega_bar sqrt(1 + eta sin(alpha t)) and psi(0) = psi_star.
[[nodiscard]] double mathieu_chi(double psi_star, double eta, double alpha, double omega_bar, double t);

/// omega_bar = j pi / T for j = 1..j_max.
[[nodiscard]] std::vector<double> resonance_points(double T, int j_max);

struct StabilityCell {
  double omega_bar = 0.0;
  double eta = 0.0;
  double mu = 0.0;
  Stability classification = Stability::stable;
  double det_defect = 0.0;
  /// inside |eta| > 4 |2 omega_bar / alpha - 1|
  bool analytic_unstable = false;
};

struct StabilityMap {
  double alpha = 0.0;
  int n_omega = 0;
  int n_eta = 0;
  std::vector<StabilityCell> cells;  ///< eta-major: cells[i_eta * n_omega + i_omega]
  std::vector<double> resonances;   ///< j pi / T inside the omega_bar range
};

using ProgressFn = std::function<void(int done, int total)>;

/// Mathieu grid scan; ranges are inclusive [lo, hi] with grid_n points each.
[[nodiscard]] StabilityMap stability_map(double alpha, std::pair<double, double> eta_range,
                                         std::pair<double, double> omega_bar_range, int grid_n,
                                         const ProgressFn& progress = {});

/// omega_bar on the first-tongue boundary |eta| = 4 |2 omega_bar / alpha - 1|.
[[nodiscard]] std::pair<double, double> analytic_tongue(double alpha, double eta);

struct TongueWidth {
  double lower = 0.0;  ///< stability boundary below alpha/2
  double upper = 0.0;
  double half_width = 0.0;
  double predicted = 0.0;  ///< eta alpha / 8
};

/// Bisects |mu(omega_bar)| = 1 on both sides of alpha/2 for the Mathieu law.
[[nodiscard]] TongueWidth measure_tongue(double alpha, double eta, double tol = 1e-7);

struct BeatReport {
  double predicted_amplitude = 0.0;  ///< |eta| alpha / (4 |2 omega_bar - alpha|)
  double predicted_period = 0.0;     ///< 2 pi / |2 omega_bar - alpha|
  double measured_amplitude = 0.0;   ///< half the peak-to-peak excursion of log(I/I0)
  double measured_period = 0.0;      ///< mean spacing of upward mid-level crossings
  double max_abs_log_ratio = 0.0;
  int crossings = 0;
};

/// Throws DomainError on the exact resonance alpha = 2 omega_bar.
[[nodiscard]] BeatReport beat_analysis(double eta, double alpha, double omega_bar, double psi_star, double t_max);

struct GrowthFit {
  double rate = 0.0;       ///< least-squares slope of log I against t
  double predicted = 0.0;  ///< eta omega_bar cos(2 psi_star) / 2
  double max_residual = 0.0;
};

/// Exponential rate of I(t) on [0, t_max] for the resonant Mathieu law alpha = 2 omega_bar.
[[nodiscard]] GrowthFit resonant_growth(double eta, double omega_bar, double psi_star, double t_max);

/// CSV: omega_bar, eta, mu, abs_mu, analytic_unstable, class.
void write_stability_csv(std::ostream& out, const StabilityMap& map);
/// CSV of the analytic boundary: eta, omega_bar_low, omega_bar_high.
void write_boundary_csv(std::ostream& out, const StabilityMap& map, int samples = 65);

}  // namespace tdho
