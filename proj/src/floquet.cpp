#include "tdho/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <tuple>

#include "tdho/angle_action.hpp"
#include "tdho/csv.hpp"
#include "tdho/errors.hpp"
#include "tdho/oracle.hpp"
#include "tdho/quadrature.hpp"

namespace tdho {

namespace {

constexpr double kPi = 3.14159265358979323846;

double period_of(const FrequencyProfile& profile) {
  if (!profile.period() || !(*profile.period() > 0.0)) throw ParameterError("floquet: profile has no period");
  return *profile.period();
}

FrequencyProfile mathieu(double omega_bar, double eta, double alpha) {
  return builtin_profile("mathieu", {{"omega_bar", omega_bar}, {"eta", eta}, {"alpha", alpha}});
}

double mathieu_mu(double omega_bar, double eta, double alpha) {
  return monodromy(mathieu(omega_bar, eta, alpha)).mu;
}

/// Least-squares slope of y against x and the largest residual.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) res = std::max(res, std::abs(y[i] - icpt - slope * x[i]));
  return {slope, res};
}

}  // namespace

std::string to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::marginal: return "marginal";
    default: return "unstable";
  }
}

Stability classify(double mu, double band) {
  const double d = std::abs(mu) - 1.0;
  if (std::abs(d) < band) return Stability::marginal;
  return d < 0.0 ? Stability::stable : Stability::unstable;
}

MonodromyReport monodromy(const FrequencyProfile& profile, double tol) {
  const double T = period_of(profile);
  const FundamentalMatrix fund = fundamental_matrix(profile, {0.0, T}, tol);
  MonodromyReport r;
  r.T = T;
  r.M = fund.V(T);
  r.mu = 0.5 * r.M.trace();
  const std::complex<double> root = std::sqrt(std::complex<double>(r.mu * r.mu - 1.0, 0.0));
  r.eigenvalues = {r.mu + root, r.mu - root};
  r.classification = classify(r.mu);
  r.det_defect = std::abs(r.M.det() - 1.0);
  return r;
}

Mat2 floquet_extend(const MonodromyReport& report, const FundamentalMatrix& fund, double t, unsigned n) {
  return fund.V(t) * power(report.M, n);
}

TraceReport trace_via_angle_action(const FrequencyProfile& profile, double tol) {
  const double T = period_of(profile);
  const double w0 = profile.omega(0.0);
  const double wT = profile.omega(T);
  const auto a1 = integrate_angle_action(profile, 0.5 * kPi, 0.5 * w0, 0.0, T, tol).at(T);
  const auto a2 = integrate_angle_action(profile, 0.0, 0.5 / w0, 0.0, T, tol).at(T);
  TraceReport r;
  r.psi1_T = a1.psi;
  r.psi2_T = a2.psi;
  // I(T)/I(0) = exp(-2 Psi)
  r.Psi1_T = -0.5 * std::log(a1.I / (0.5 * w0));
  r.Psi2_T = -0.5 * std::log(a2.I / (0.5 / w0));
  const double e1 = std::exp(-r.Psi1_T), e2 = std::exp(-r.Psi2_T);
  r.mu = 0.5 * (e1 * std::sin(r.psi1_T) + e2 * std::cos(r.psi2_T));

  const PhaseState q1 = integrate_qp(profile, 1.0, 0.0, 0.0, T, tol).at(T);
  const PhaseState q2 = integrate_qp(profile, 0.0, 1.0, 0.0, T, tol).at(T);
  const double rebuilt[4] = {std::sqrt(w0 / wT) * std::sin(r.psi1_T) * e1,
                             std::sqrt(wT * w0) * std::cos(r.psi1_T) * e1,
                             std::sin(r.psi2_T) * e2 / std::sqrt(wT * w0),
                             std::sqrt(w0 / wT) * std::cos(r.psi2_T) * e2};
  const double direct[4] = {q1.q, q1.p, q2.q, q2.p};
  for (int i = 0; i < 4; ++i) r.identity_defect = std::max(r.identity_defect, std::abs(rebuilt[i] - direct[i]));
  return r;
}

LeadingOrderTrace mu_leading_order(const FrequencyProfile& profile) {
  const double T = period_of(profile);
  const auto jumps = profile.discontinuities_in(0.0, T);
  LeadingOrderTrace r;
  r.omega_bar = quadrature([&](double z) { return profile.omega(z); }, 0.0, T, 1e-13, jumps) / T;
  auto f = [&](double z) {
    return 0.5 * profile.omega_dot(z) / profile.omega(z) * std::cos(2.0 * r.omega_bar * z);
  };
  r.chi_T = quadrature(f, 0.0, T, 1e-13, jumps);
  r.mu0 = std::cos(r.omega_bar * T) * std::cosh(r.chi_T);
  return r;
}

double mathieu_chi(double psi_star, double eta, double alpha, double omega_bar, double t) {
  if (!(omega_bar > 0.0) || !(alpha > 0.0)) throw ParameterError("mathieu_chi: omega_bar and alpha must be positive");
  const double s0 = std::sin(2.0 * psi_star);
  if (std::abs(alpha - 2.0 * omega_bar) < kResonanceSwitch * omega_bar) {
    return 0.25 * eta * omega_bar *
           (std::cos(2.0 * psi_star) * t + (std::sin(2.0 * psi_star + 4.0 * omega_bar * t) - s0) / (4.0 * omega_bar));
  }
  const double dm = 2.0 * omega_bar - alpha;
  const double dp = 2.0 * omega_bar + alpha;
  return eta * alpha / 8.0 *
         (std::sin(2.0 * psi_star + dm * t) / dm + std::sin(2.0 * psi_star + dp * t) / dp -
          4.0 * omega_bar * s0 / (dm * dp));
}

std::vector<double> resonance_points(double T, int j_max) {
  if (!(T > 0.0)) throw ParameterError("resonance_points: T must be positive");
  if (j_max < 0) throw ParameterError("resonance_points: j_max must be >= 0");
  std::vector<double> out;
  for (int j = 1; j <= j_max; ++j) out.push_back(j * kPi / T);
  return out;
}

std::pair<double, double> analytic_tongue(double alpha, double eta) {
  const double d = 0.125 * alpha * std::abs(eta);
  return {0.5 * alpha - d, 0.5 * alpha + d};
}

StabilityMap stability_map(double alpha, std::pair<double, double> eta_range, std::pair<double, double> omega_bar_range,
                           int grid_n, const ProgressFn& progress) {
  if (grid_n < 2) throw ParameterError("stability_map: grid_n must be >= 2");
  if (!(alpha > 0.0)) throw ParameterError("stability_map: alpha must be positive");
  if (!(omega_bar_range.first > 0.0) || omega_bar_range.second < omega_bar_range.first)
    throw ParameterError("stability_map: invalid omega_bar range");
  if (eta_range.second < eta_range.first || std::max(std::abs(eta_range.first), std::abs(eta_range.second)) >= 1.0)
    throw ParameterError("stability_map: invalid eta range");
  StabilityMap map;
  map.alpha = alpha;
  map.n_omega = grid_n;
  map.n_eta = grid_n;
  const int total = grid_n * grid_n;
  for (int ie = 0; ie < grid_n; ++ie) {
    const double eta = eta_range.first + (eta_range.second - eta_range.first) * ie / (grid_n - 1);
    for (int io = 0; io < grid_n; ++io) {
      const double wb = omega_bar_range.first + (omega_bar_range.second - omega_bar_range.first) * io / (grid_n - 1);
      StabilityCell c;
      c.omega_bar = wb;
      c.eta = eta;
      const MonodromyReport m = monodromy(mathieu(wb, eta, alpha));
      c.mu = m.mu;
      c.classification = m.classification;
      c.det_defect = m.det_defect;
      c.analytic_unstable = std::abs(eta) > 4.0 * std::abs(2.0 * wb / alpha - 1.0);
      map.cells.push_back(c);
      if (progress) progress(ie * grid_n + io + 1, total);
    }
  }
  const double T = 2.0 * kPi / alpha;
  for (double w : resonance_points(T, static_cast<int>(std::floor(omega_bar_range.second * T / kPi))))
    if (w >= omega_bar_range.first) map.resonances.push_back(w);
  return map;
}

TongueWidth measure_tongue(double alpha, double eta, double tol) {
  if (!(eta > 0.0 && eta < 1.0)) throw ParameterError("measure_tongue: need 0 < eta < 1");
  const double centre = 0.5 * alpha;
  if (!(std::abs(mathieu_mu(centre, eta, alpha)) > 1.0))
    throw DomainError("measure_tongue: centre of the tongue is not unstable");
  auto edge = [&](double dir) {
    double inside = centre;
    double step = alpha * eta / 16.0;
    double outside = centre + dir * step;
    while (std::abs(mathieu_mu(outside, eta, alpha)) > 1.0) {
      inside = outside;
      step *= 2.0;
      outside = centre + dir * step;
      if (step > centre) throw DomainError("measure_tongue: no stable side found");
    }
    while (std::abs(outside - inside) > tol) {
      const double mid = 0.5 * (inside + outside);
      (std::abs(mathieu_mu(mid, eta, alpha)) > 1.0 ? inside : outside) = mid;
    }
    return 0.5 * (inside + outside);
  };
  TongueWidth w;
  w.lower = edge(-1.0);
  w.upper = edge(1.0);
  w.half_width = 0.5 * (w.upper - w.lower);
  w.predicted = 0.125 * eta * alpha;
  return w;
}

BeatReport beat_analysis(double eta, double alpha, double omega_bar, double psi_star, double t_max) {
  if (std::abs(alpha - 2.0 * omega_bar) < kResonanceSwitch * omega_bar)
    throw DomainError("beat_analysis: exact resonance alpha = 2 omega_bar has no beat");
  if (!(t_max > 0.0)) throw ParameterError("beat_analysis: t_max must be positive");
  const FrequencyProfile profile = mathieu(omega_bar, eta, alpha);
  const auto traj = integrate_angle_action(profile, psi_star, 1.0, 0.0, t_max, 1e-11);
  const int n = std::max(2001, static_cast<int>(t_max / 0.02));
  std::vector<double> ts(n), lr(n);
  for (int i = 0; i < n; ++i) {
    ts[i] = t_max * i / (n - 1);
    lr[i] = std::log(traj.at(ts[i]).I);
  }
  BeatReport r;
  r.predicted_amplitude = std::abs(eta) * alpha / (4.0 * std::abs(2.0 * omega_bar - alpha));
  r.predicted_period = 2.0 * kPi / std::abs(2.0 * omega_bar - alpha);
  const auto [lo, hi] = std::minmax_element(lr.begin(), lr.end());
  r.measured_amplitude = 0.5 * (*hi - *lo);
  r.max_abs_log_ratio = std::max(std::abs(*hi), std::abs(*lo));
  const double mid = 0.5 * (*hi + *lo);
  // smooth out the fast 2 omega_bar ripple before locating crossings
  const int win = std::max(1, static_cast<int>(kPi / (2.0 * omega_bar) / (ts[1] - ts[0])));
  std::vector<double> sm(n);
  for (int i = 0; i < n; ++i) {
    const int a = std::max(0, i - win), b = std::min(n - 1, i + win);
    double s = 0.0;
    for (int j = a; j <= b; ++j) s += lr[j];
    sm[i] = s / (b - a + 1);
  }
  std::vector<double> up;
  for (int i = win + 1; i < n - win; ++i)
    if (sm[i - 1] < mid && sm[i] >= mid) up.push_back(ts[i - 1] + (mid - sm[i - 1]) / (sm[i] - sm[i - 1]) * (ts[i] - ts[i - 1]));
  r.crossings = static_cast<int>(up.size());
  r.measured_period = up.size() >= 2 ? (up.back() - up.front()) / static_cast<double>(up.size() - 1) : 0.0;
  return r;
}

GrowthFit resonant_growth(double eta, double omega_bar, double psi_star, double t_max) {
  if (!(t_max > 0.0)) throw ParameterError("resonant_growth: t_max must be positive");
  const FrequencyProfile profile = mathieu(omega_bar, eta, 2.0 * omega_bar);
  const auto traj = integrate_angle_action(profile, psi_star, 1.0, 0.0, t_max, 1e-11);
  const int n = 801;
  std::vector<double> ts(n), lr(n);
  for (int i = 0; i < n; ++i) {
    ts[i] = t_max * i / (n - 1);
    lr[i] = std::log(traj.at(ts[i]).I);
  }
  GrowthFit g;
  std::tie(g.rate, g.max_residual) = fit_line(ts, lr);
  g.predicted = 0.5 * eta * omega_bar * std::cos(2.0 * psi_star);
  return g;
}

void write_stability_csv(std::ostream& out, const StabilityMap& map) {
  CsvWriter csv(out, "stability_map", {"omega_bar", "eta", "mu", "abs_mu", "analytic_unstable", "class"});
  for (const StabilityCell& c : map.cells)
    csv.row({c.omega_bar, c.eta, c.mu, std::abs(c.mu), c.analytic_unstable ? 1.0 : 0.0}, {to_string(c.classification)});
}

void write_boundary_csv(std::ostream& out, const StabilityMap& map, int samples) {
  if (map.cells.empty() || samples < 2) throw ParameterError("write_boundary_csv: empty map");
  double lo = map.cells.front().eta, hi = lo;
  for (const auto& c : map.cells) {
    lo = std::min(lo, c.eta);
    hi = std::max(hi, c.eta);
  }
  CsvWriter csv(out, "tongue_boundary", {"eta", "omega_bar_low", "omega_bar_high"});
  for (int i = 0; i < samples; ++i) {
    const double eta = lo + (hi - lo) * i / (samples - 1);
    const auto [a, b] = analytic_tongue(map.alpha, eta);
    csv.row({eta, a, b});
  }
}

}  // namespace tdho
