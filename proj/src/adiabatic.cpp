#include "tdho/adiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <tuple>

#include <json.hpp>

#include "tdho/angle_action.hpp"
#include "tdho/csv.hpp"
#include "tdho/errors.hpp"
#include "tdho/mat2.hpp"
#include "tdho/ode.hpp"
#include "tdho/oracle.hpp"
#include "tdho/quadrature.hpp"

namespace tdho {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// d zeta~ / d tau, with omega~'' by central differences.
double zeta_tilde_rate(const SlowTimeFamily& f, double tau) {
  const double h = 1e-5 * std::max(1.0, std::abs(tau));
  const double w = f.base(tau);
  const double d1 = f.base_derivative(tau);
  const double d2 = (f.base_derivative(tau + h) - f.base_derivative(tau - h)) / (2.0 * h);
  return d2 / (w * w) - 2.0 * d1 * d1 / (w * w * w);
}

/// Half-width of the slow-time window outside which |omega~'| < 1e-12 max (assumes decaying tails).
double truncation_width(const SlowTimeFamily& f) {
  double peak = 0.0;
  for (int i = -5000; i <= 5000; ++i) peak = std::max(peak, std::abs(f.base_derivative(0.01 * i)));
  if (peak == 0.0) return 1.0;
  const double thr = 1e-12 * peak;
  double w = 0.01;
  while (w < 1e4 && (std::abs(f.base_derivative(w)) >= thr || std::abs(f.base_derivative(-w)) >= thr)) w += 0.01;
  return w;
}

double sigma_max_sq_minus_one(const Mat2& n) {
  // largest eigenvalue of N^T N - I, formed entrywise to keep small departures from a rotation
  const double s11 = n.a11 * n.a11 + n.a21 * n.a21 - 1.0;
  const double s22 = n.a12 * n.a12 + n.a22 * n.a22 - 1.0;
  const double s12 = n.a11 * n.a12 + n.a21 * n.a22;
  return 0.5 * (s11 + s22) + std::hypot(0.5 * (s11 - s22), s12);
}

}  // namespace

std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("loglog_fit: need matching samples");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return {kNaN, kNaN};
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) res = std::max(res, std::abs(ly[i] - icpt - slope * lx[i]));
  return {slope, res};
}

std::pair<double, double> phase_constants(const SlowTimeFamily& family, double tau0, double tau1, int samples) {
  if (!(tau1 > tau0) || samples < 2) throw ParameterError("phase_constants: invalid range");
  // phi(tau) on a fine tau table, then tau at phi-uniform targets by linear interpolation
  const int n = 20001;
  std::vector<double> tau(n), phi(n, 0.0);
  for (int i = 0; i < n; ++i) tau[i] = tau0 + (tau1 - tau0) * i / (n - 1);
  for (int i = 1; i < n; ++i) phi[i] = phi[i - 1] + 0.5 * (tau[i] - tau[i - 1]) * (family.base(tau[i]) + family.base(tau[i - 1]));
  double c0 = 0.0, c1 = 0.0;
  std::size_t j = 0;
  for (int s = 0; s < samples; ++s) {
    const double target = phi.back() * s / (samples - 1);
    while (j + 2 < phi.size() && phi[j + 1] < target) ++j;
    const double frac = phi[j + 1] > phi[j] ? (target - phi[j]) / (phi[j + 1] - phi[j]) : 0.0;
    const double t = tau[j] + std::clamp(frac, 0.0, 1.0) * (tau[j + 1] - tau[j]);
    c0 = std::max(c0, std::abs(family.zeta_tilde(t)));
    c1 = std::max(c1, std::abs(zeta_tilde_rate(family, t) / family.base(t)));
  }
  return {c0, c1};
}

WindowReport adiabatic_window(const SlowTimeFamily& family, double T, double q0, double p0) {
  if (!(T > 0.0)) throw ParameterError("adiabatic_window: T must be positive");
  if (family.smoothness < 1) throw ParameterError("adiabatic_window: needs a C2 base law");
  const double eps = family.epsilon;
  const FrequencyProfile profile = family.profile();
  const AngleActionState s0 = to_angle_action({0.0, q0, p0}, profile.omega(0.0));
  const double t_end = T / eps;
  const auto traj = integrate_angle_action(profile, s0.psi, s0.I, 0.0, t_end, 1e-12);

  WindowReport r;
  r.epsilon = eps;
  r.T = T;
  r.I0 = s0.I;
  for (const auto& s : traj.samples()) r.max_deviation = std::max(r.max_deviation, std::abs(s.I - s0.I));
  for (int i = 0; i <= 4000; ++i)
    r.max_deviation = std::max(r.max_deviation, std::abs(traj.at(t_end * i / 4000.0).I - s0.I));

  std::tie(r.c0, r.c1) = phase_constants(family, 0.0, T);
  for (int i = 0; i <= 4096; ++i) r.omega_u = std::max(r.omega_u, family.base(T * i / 4096.0));
  const double ec = eps * r.c0;
  r.bound_applicable = ec < 1.0;
  if (ec < 2.0) {
    r.M = eps * (r.c0 + T * r.omega_u / (2.0 - ec) * (r.c1 / (1.0 - 0.5 * ec) + r.c0 * r.c0));
    r.bound = r.I0 * std::expm1(r.M);
  } else {
    r.M = r.bound = std::numeric_limits<double>::infinity();
  }
  return r;
}

ScalingReport scaling_experiment(const SlowTimeFamily& family, int k, std::vector<double> epsilons) {
  if (epsilons.size() < 4) throw ParameterError("scaling_experiment: need at least 4 epsilon values");
  for (double e : epsilons)
    if (!(e > 0.0)) throw ParameterError("scaling_experiment: epsilons must be positive");
  std::sort(epsilons.begin(), epsilons.end(), std::greater<>());
  if (epsilons.front() / epsilons.back() < 8.0) throw ParameterError("scaling_experiment: epsilons must span a factor >= 8");

  ScalingReport rep;
  rep.epsilons = epsilons;
  rep.smoothness_class = k;
  if (family.support_half_width && *family.support_half_width > 0.0) {
    rep.tau_window = *family.support_half_width;
  } else if (family.support_half_width) {
    rep.tau_window = 1.0;
  } else {
    rep.tau_window = truncation_width(family);
    rep.truncated = true;
    const double w = rep.tau_window;
    rep.tail_estimate = std::abs(std::log(family.base(100.0 * w) / family.base(w))) +
                        std::abs(std::log(family.base(-w) / family.base(-100.0 * w)));
  }

  const bool frozen = family.support_half_width && *family.support_half_width == 0.0;
  for (double eps : epsilons) {
    if (frozen) {
      rep.deltas.push_back(0.0);
      rep.deltas_ic.push_back(0.0);
      continue;
    }
    const FrequencyProfile profile = family.with_epsilon(eps).profile();
    const double ts = -rep.tau_window / eps, te = rep.tau_window / eps;
    const PhaseState c1 = integrate_qp(profile, 1.0, 0.0, ts, te, 1e-13).at(te);
    const PhaseState c2 = integrate_qp(profile, 0.0, 1.0, ts, te, 1e-13).at(te);
    const double rs = std::sqrt(profile.omega(ts)), re = std::sqrt(profile.omega(te));
    // transition matrix in coordinates (sqrt(omega) q, p / sqrt(omega)), where I = |x|^2 / 2
    const Mat2 n{re * c1.q / rs, re * c2.q * rs, c1.p / (re * rs), c2.p * rs / re};
    rep.deltas.push_back(sigma_max_sq_minus_one(n));
    const double w_s = profile.omega(ts), w_e = profile.omega(te);
    const double I_s = 0.5 / w_s;
    const double I_e = (c2.p * c2.p + w_e * w_e * c2.q * c2.q) / (2.0 * w_e);
    rep.deltas_ic.push_back(std::abs(I_e / I_s - 1.0));
  }
  std::tie(rep.fitted_slope, rep.max_residual) = loglog_fit(rep.epsilons, rep.deltas);
  for (std::size_t i = 0; i + 1 < epsilons.size(); ++i)
    rep.pair_slopes.push_back(loglog_fit({epsilons[i], epsilons[i + 1]}, {rep.deltas[i], rep.deltas[i + 1]}).first);
  return rep;
}

std::pair<double, double> asymptotic_psi_I(const SlowTimeFamily& family, double psi0, double I0, double t) {
  const double eps = family.epsilon;
  const FrequencyProfile profile = family.profile();
  const double phi = psi0 + quadrature([&](double z) { return profile.omega(z); }, 0.0, t, 1e-13);
  const double z0 = family.zeta_tilde(0.0), zt = family.zeta_tilde(eps * t);
  const double psi = phi - 0.25 * eps * (std::cos(2.0 * phi) * zt - std::cos(2.0 * psi0) * z0);
  const double I = I0 * (1.0 - 0.5 * eps * (std::sin(2.0 * phi) * zt - std::sin(2.0 * psi0) * z0));
  return {psi, I};
}

AsymptoticResidual asymptotic_residual(const SlowTimeFamily& family, double psi0, double I0, double t_end,
                                       int samples) {
  if (!(t_end > 0.0) || samples < 2) throw ParameterError("asymptotic_residual: invalid window");
  const auto traj = integrate_angle_action(family.profile(), psi0, I0, 0.0, t_end, 1e-12);
  AsymptoticResidual r;
  r.epsilon = family.epsilon;
  for (int i = 0; i < samples; ++i) {
    const double t = t_end * i / (samples - 1);
    const auto [psi, I] = asymptotic_psi_I(family, psi0, I0, t);
    const AngleActionState s = traj.at(t);
    r.psi = std::max(r.psi, std::abs(psi - s.psi));
    r.I = std::max(r.I, std::abs(I - s.I) / I0);
  }
  return r;
}

SigmaOrderReport order_check_sigma(const SlowTimeFamily& family, const std::vector<double>& epsilons, int h,
                                   double t_end, double psi0) {
  if (h < 1) throw ParameterError("order_check_sigma: h must be >= 1");
  if (epsilons.size() < 2) throw ParameterError("order_check_sigma: need at least 2 epsilons");
  SigmaOrderReport rep;
  rep.h = h;
  rep.epsilons = epsilons;
  for (double eps : epsilons) {
    const FrequencyProfile profile = family.with_epsilon(eps).profile();
    const auto grid = make_grid(profile, 0.0, t_end, 0.0);
    const PicardSeries ps = picard_psi(profile, psi0, 0.0, grid, h);
    const auto traj = integrate_angle_action(profile, psi0, 1.0, 0.0, t_end, 1e-12);
    double sig = 0.0, chi = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      sig = std::max(sig, std::abs(traj.at(grid[i]).psi - ps.psi[h - 1][i]));
      chi = std::max(chi, std::abs(ps.psi[h][i] - ps.psi[h - 1][i]));
    }
    rep.sigma.push_back(sig);
    rep.chi.push_back(chi);
  }
  rep.sigma_slope = loglog_fit(rep.epsilons, rep.sigma).first;
  rep.chi_slope = loglog_fit(rep.epsilons, rep.chi).first;
  return rep;
}

double phase_domain_consistency(const SlowTimeFamily& family, double psi0, double I0, double t_end) {
  if (!(t_end > 0.0)) throw ParameterError("phase_domain_consistency: t_end must be positive");
  const double eps = family.epsilon;
  const FrequencyProfile profile = family.profile();
  const auto traj = integrate_angle_action(profile, psi0, I0, 0.0, t_end, 1e-12);
  // state (psi, log I, tau) against the slow phase phi = psi0 + integral of omega~ d tau
  auto rhs = [&](double, const ode::State<3>& y) {
    const double z = family.zeta_tilde(y[2]);
    return ode::State<3>{1.0 / eps + 0.5 * z * std::sin(2.0 * y[0]), -z * std::cos(2.0 * y[0]),
                         1.0 / family.base(y[2])};
  };
  const double phi_end = psi0 + eps * quadrature([&](double z) { return profile.omega(z); }, 0.0, t_end, 1e-13);
  ode::Options o;
  o.rtol = o.atol = 1e-13;
  const auto sol = ode::integrate<3>(rhs, psi0, ode::State<3>{psi0, std::log(I0), 0.0}, phi_end, o);
  double worst = 0.0;
  for (int i = 0; i <= 64; ++i) {
    const double ph = psi0 + (phi_end - psi0) * i / 64.0;
    const auto y = sol(ph);
    const double t = std::clamp(y[2] / eps, 0.0, t_end);
    const AngleActionState s = traj.at(t);
    worst = std::max({worst, std::abs(y[0] - s.psi), std::abs(y[1] - std::log(s.I))});
  }
  return worst;
}

void write_scaling_csv(std::ostream& out, const ScalingReport& rep) {
  CsvWriter csv(out, "scaling", {"epsilon", "delta_I", "delta_I_ic", "slope", "max_residual", "k", "tail_estimate"});
  for (std::size_t i = 0; i < rep.epsilons.size(); ++i)
    csv.row({rep.epsilons[i], rep.deltas[i], rep.deltas_ic[i], rep.fitted_slope, rep.max_residual,
             rep.smoothness_class == kSmoothInfinite ? std::numeric_limits<double>::infinity()
                                                     : static_cast<double>(rep.smoothness_class),
             rep.tail_estimate});
}

void write_scaling_json(std::ostream& out, const ScalingReport& rep) {
  nlohmann::json j;
  j["schema"] = "tdho.scaling.v1";
  j["epsilon"] = rep.epsilons;
  j["delta_I"] = rep.deltas;
  j["delta_I_ic"] = rep.deltas_ic;
  j["pair_slopes"] = rep.pair_slopes;
  j["slope"] = rep.fitted_slope;
  j["max_residual"] = rep.max_residual;
  if (rep.smoothness_class == kSmoothInfinite)
    j["k"] = "inf";
  else
    j["k"] = rep.smoothness_class;
  j["tau_window"] = rep.tau_window;
  j["truncated"] = rep.truncated;
  j["tail_estimate"] = rep.tail_estimate;
  out << j.dump(2) << "\n";
}

}  // namespace tdho
