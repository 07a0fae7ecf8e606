#pragma once

/**
 * @file adiabatic.hpp
 * @brief Slow-time experiments: windowed deviation of the action, scaling of the
 *        net action change with epsilon, first-order asymptotics in epsilon.
 */

#include <iosfwd>
#include <utility>
#include <vector>

#include "tdho/frequency.hpp"

namespace tdho {

struct WindowReport {
  double epsilon = 0.0;
  double T = 0.0;              ///< slow-time horizon
  double I0 = 0.0;
  double max_deviation = 0.0;  ///< sup over [0, T/eps] of |I(t) - I(0)|
  double c0 = 0.0;             ///< sup |zeta~| in the phase variable
  double c1 = 0.0;             ///< sup |d zeta~ / d phi|
  double omega_u = 0.0;        ///< sup omega~ on [0, T]
  double M = 0.0;
  double bound = 0.0;          ///< I0 (e^M - 1)
  bool bound_applicable = false;  ///< eps c0 < 1
};

/// Integrates over t in [0, T/eps] and compares against the a-priori bound I0 (e^M - 1).
[[nodiscard]] WindowReport adiabatic_window(const SlowTimeFamily& family, double T, double q0, double p0);

/// c0 = sup |zeta~|, c1 = sup |zeta~_tau / omega~| on [tau0, tau1], sampled uniformly in phi.
[[nodiscard]] std::pair<double, double> phase_constants(const SlowTimeFamily& family, double tau0, double tau1,
                                                        int samples = 4096);

struct ScalingReport {
  std::vector<double> epsilons;      ///< decreasing
  std::vector<double> deltas;        ///< worst case over initial phases of |I(end) - I(start)|, I(start) = 1
  std::vector<double> deltas_ic;     ///< |I(end)/I(start) - 1| for the data (q, p) = (0, 1) at the window start
  std::vector<double> pair_slopes;   ///< log-log slope between consecutive epsilons
  double fitted_slope = 0.0;
  double max_residual = 0.0;         ///< largest |residual| of the log-log fit
  int smoothness_class = 0;
  double tau_window = 0.0;           ///< integration over tau in [-tau_window, tau_window]
  bool truncated = false;            ///< window cut where |omega~'| < 1e-12 max rather than at compact support
  double tail_estimate = 0.0;        ///< total variation of log omega~ left outside the window
};

/// Requires at least 4 epsilons spanning a factor of 8 or more.
[[nodiscard]] ScalingReport scaling_experiment(const SlowTimeFamily& family, int k, std::vector<double> epsilons);

/// First-order (psi, I) in epsilon from psi(0) = psi0, I(0) = I0.
[[nodiscard]] std::pair<double, double> asymptotic_psi_I(const SlowTimeFamily& family, double psi0, double I0,
                                                         double t);

struct AsymptoticResidual {
  double epsilon = 0.0;
  double psi = 0.0;  ///< sup |psi_first_order - psi_oracle| on the window
  double I = 0.0;    ///< sup |I_first_order - I_oracle| / I0
};

[[nodiscard]] AsymptoticResidual asymptotic_residual(const SlowTimeFamily& family, double psi0, double I0,
                                                     double t_end, int samples = 401);

struct SigmaOrderReport {
  int h = 1;
  std::vector<double> epsilons;
  std::vector<double> sigma;  ///< sup |psi_oracle - psi^(h-1)|
  std::vector<double> chi;    ///< sup |psi^(h) - psi^(h-1)|
  double sigma_slope = 0.0;
  double chi_slope = 0.0;
};

/// Picard orders against epsilon on the fixed window t in [0, t_end], psi(0) = psi0.
[[nodiscard]] SigmaOrderReport order_check_sigma(const SlowTimeFamily& family, const std::vector<double>& epsilons,
                                                 int h, double t_end = 4.0, double psi0 = 0.3);

/// max |psi, log I| difference between the phase-variable formulation and the time-domain oracle.
[[nodiscard]] double phase_domain_consistency(const SlowTimeFamily& family, double psi0, double I0, double t_end);

/// Least-squares slope of log y against log x; second value is the largest residual.
[[nodiscard]] std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

void write_scaling_csv(std::ostream& out, const ScalingReport& rep);
void write_scaling_json(std::ostream& out, const ScalingReport& rep);

}  // namespace tdho
