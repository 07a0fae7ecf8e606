#include "tdho/angle_action.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "collocation.hpp"
#include "tdho/csv.hpp"
#include "tdho/errors.hpp"
#include "tdho/ode.hpp"
#include "tdho/quadrature.hpp"

namespace tdho {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// psi-type sweep: out = phi + D, D accumulating cell integrals of f and the
/// matching offsets at declared jumps.
void sweep_phase(const FrequencyProfile& profile, const detail::Mesh& mesh, const std::vector<double>& phi,
                 const std::vector<double>& phi_nodes, const std::vector<double>* f, std::vector<double>& grid_out,
                 std::vector<double>& nodes_out, std::vector<double>& indicator) {
  const std::size_t nc = mesh.cells();
  const int m = mesh.rule.m;
  const std::size_t star = mesh.star;
  grid_out.assign(mesh.grid.size(), 0.0);
  nodes_out.assign(nc * m, 0.0);
  indicator.assign(mesh.grid.size(), 0.0);
  grid_out[star] = phi[star];

  double D = 0.0;
  double E = 0.0;
  for (std::size_t c = star; c < nc; ++c) {
    if (c != star && mesh.jump[c]) {
      const double td = mesh.grid[c];
      const MatchResult mr = match_discontinuity(phi[c] + D, 1.0, profile.omega_left(td), profile.omega_right(td));
      D = mr.psi - phi[c];
    }
    for (int i = 0; i < m; ++i) {
      const std::size_t k = mesh.node(c, i);
      nodes_out[k] = phi_nodes[k] + D + (f ? detail::cell_partial(mesh, c, i, *f) : 0.0);
    }
    if (f) {
      D += detail::cell_integral(mesh, c, *f);
      E += detail::cell_indicator(mesh, c, *f);
    }
    grid_out[c + 1] = phi[c + 1] + D;
    indicator[c + 1] = E;
  }
  D = 0.0;
  E = 0.0;
  for (std::size_t c = star; c-- > 0;) {
    if (c + 1 != star && mesh.jump[c + 1]) {
      const double td = mesh.grid[c + 1];
      const MatchResult mr =
          match_discontinuity(phi[c + 1] + D, 1.0, profile.omega_right(td), profile.omega_left(td));
      D = mr.psi - phi[c + 1];
    }
    const double left = D - (f ? detail::cell_integral(mesh, c, *f) : 0.0);
    for (int i = 0; i < m; ++i) {
      const std::size_t k = mesh.node(c, i);
      nodes_out[k] = phi_nodes[k] + left + (f ? detail::cell_partial(mesh, c, i, *f) : 0.0);
    }
    if (f) E += detail::cell_indicator(mesh, c, *f);
    grid_out[c] = phi[c] + left;
    indicator[c] = E;
    D = left;
  }
}

/// Grid indices separated from t_star by a declared jump get +inf.
std::vector<double> mask_beyond_jumps(const detail::Mesh& mesh, std::vector<double> v) {
  bool crossed = false;
  for (std::size_t i = mesh.star + 1; i < mesh.grid.size(); ++i) {
    if (crossed) v[i] = kInf;
    if (mesh.jump[i]) crossed = true;
  }
  crossed = false;
  for (std::size_t i = mesh.star; i-- > 0;) {
    if (crossed) v[i] = kInf;
    if (mesh.jump[i]) crossed = true;
  }
  return v;
}

void check_resolution(const std::vector<double>& indicator, const std::vector<double>& bound,
                      const detail::Mesh& mesh, const PicardOptions& opts, const char* what) {
  if (!opts.check_resolution) return;
  for (std::size_t i = 0; i < indicator.size(); ++i) {
    const double budget = std::max(0.01 * bound[i], opts.resolution_floor);
    if (indicator[i] > budget) {
      double hmax = 0.0;
      for (std::size_t c = 0; c < mesh.cells(); ++c) hmax = std::max(hmax, mesh.width(c));
      throw RefinementRequired(std::string(what) + ": grid too coarse for the error budget", 0.5 * hmax);
    }
  }
}

}  // namespace

AngleActionState to_angle_action(const PhaseState& s, double omega) {
  if (!(omega > 0.0)) throw DomainError("to_angle_action: omega must be positive");
  if (s.q == 0.0 && s.p == 0.0) throw DomainError("to_angle_action: origin has no angle");
  double psi = std::atan2(omega * s.q, s.p);
  if (psi < 0.0) psi += 2.0 * kPi;
  return {s.t, psi, (s.p * s.p + omega * omega * s.q * s.q) / (2.0 * omega)};
}

PhaseState to_phase(const AngleActionState& s, double omega) {
  if (!(omega > 0.0)) throw DomainError("to_phase: omega must be positive");
  if (s.I < 0.0) throw DomainError("to_phase: negative action");
  return {s.t, std::sqrt(2.0 * s.I / omega) * std::sin(s.psi), std::sqrt(2.0 * s.I * omega) * std::cos(s.psi)};
}

MatchResult match_discontinuity(double psi_minus, double I_minus, double omega_minus, double omega_plus) {
  if (!(omega_minus > 0.0 && omega_plus > 0.0)) throw DomainError("match_discontinuity: frequencies must be positive");
  const double s = std::sin(psi_minus);
  const double c = std::cos(psi_minus);
  const double delta = std::atan2((omega_plus - omega_minus) * s * c, omega_minus * c * c + omega_plus * s * s);
  const double k = omega_plus / omega_minus;
  return {psi_minus + delta, I_minus * (c * c + k * k * s * s) / k};
}

std::vector<double> compute_phi(const FrequencyProfile& profile, double psi_star, double t_star,
                                const std::vector<double>& grid, double tol) {
  std::vector<double> out;
  out.reserve(grid.size());
  auto w = [&](double z) { return profile.omega(z); };
  for (double t : grid)
    out.push_back(psi_star + quadrature(w, t_star, t, tol, profile.discontinuities_in(t_star, t)));
  return out;
}

std::vector<double> make_grid(const FrequencyProfile& profile, double a, double b, double t_star,
                              double points_per_radian) {
  if (!(b > a)) throw ParameterError("make_grid: need a < b");
  if (t_star < a || t_star > b) throw ParameterError("make_grid: t_star outside [a,b]");
  if (!(points_per_radian > 0.0)) throw ParameterError("make_grid: points_per_radian must be positive");
  const ProfileExtrema ex = sample_extrema(profile, a, b);
  const double spacing = 1.0 / (points_per_radian * ex.omega_max);
  std::vector<double> cuts{a, b, t_star};
  for (double td : profile.discontinuities_in(a, b)) cuts.push_back(td);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<double> grid{cuts.front()};
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    const double len = cuts[j + 1] - cuts[j];
    const long n = std::max(1L, static_cast<long>(std::ceil(len / spacing)));
    for (long i = 1; i < n; ++i) grid.push_back(cuts[j] + len * static_cast<double>(i) / n);
    grid.push_back(cuts[j + 1]);
  }
  return grid;
}

PicardSeries picard_psi(const FrequencyProfile& profile, double psi_star, double t_star,
                        const std::vector<double>& grid, int h, const PicardOptions& opts) {
  if (h < 0) throw ParameterError("picard_psi: order must be >= 0");
  const detail::Mesh mesh(profile, grid, t_star, opts.nodes_per_cell);
  const std::size_t nn = mesh.node_t.size();
  const int m = mesh.rule.m;

  std::vector<double> w(nn), rate(nn);
  for (std::size_t k = 0; k < nn; ++k) {
    const double t = mesh.node_t[k];
    w[k] = profile.omega(t);
    rate[k] = profile.omega_dot(t) / w[k];
  }

  PicardSeries s;
  s.order = h;
  s.t_star = t_star;
  s.psi_star = psi_star;
  s.star_index = mesh.star;
  s.grid = mesh.grid;
  s.nodes_per_cell = m;
  s.phi = detail::cumulative_quadrature(mesh, [&](double z) { return profile.omega(z); }, opts.quad_tol);
  for (double& v : s.phi) v += psi_star;
  std::vector<double> phi_nodes(nn);
  for (std::size_t c = 0; c < mesh.cells(); ++c)
    for (int i = 0; i < m; ++i) phi_nodes[mesh.node(c, i)] = s.phi[c] + detail::cell_partial(mesh, c, i, w);

  std::vector<double> g =
      detail::cumulative_quadrature(mesh, [&](double z) { return std::abs(profile.omega_dot(z) / profile.omega(z)); },
                                    opts.quad_tol);
  for (double& v : g) v = std::abs(v);
  s.g = mask_beyond_jumps(mesh, g);

  s.psi.resize(h + 1);
  s.node_psi.resize(h + 1);
  s.psi_bound.resize(h + 1);
  std::vector<double> indicator;
  sweep_phase(profile, mesh, s.phi, phi_nodes, nullptr, s.psi[0], s.node_psi[0], indicator);
  s.resolution_indicator = indicator;
  std::vector<double> f(nn);
  for (int k = 0; k <= h; ++k) {
    s.psi_bound[k].resize(s.grid.size());
    for (std::size_t i = 0; i < s.grid.size(); ++i)
      s.psi_bound[k][i] = std::pow(s.g[i], k + 1) / (2.0 * factorial(k + 1));
    if (k == 0) continue;
    for (std::size_t j = 0; j < nn; ++j) f[j] = 0.5 * rate[j] * std::sin(2.0 * s.node_psi[k - 1][j]);
    sweep_phase(profile, mesh, s.phi, phi_nodes, &f, s.psi[k], s.node_psi[k], indicator);
    check_resolution(indicator, s.psi_bound[k], mesh, opts, "picard_psi");
    s.resolution_indicator = indicator;
  }
  return s;
}

PicardSeries picard_I(const FrequencyProfile& profile, const PicardSeries& series, double I_star,
                      const PicardOptions& opts) {
  if (!(I_star > 0.0)) throw ParameterError("picard_I: I_star must be positive");
  if (series.node_psi.size() != static_cast<std::size_t>(series.order + 1))
    throw ParameterError("picard_I: series lacks collocation data");
  const detail::Mesh mesh(profile, series.grid, series.t_star, series.nodes_per_cell);
  const std::size_t nn = mesh.node_t.size();
  const std::size_t nc = mesh.cells();
  const std::size_t star = mesh.star;
  std::vector<double> rate(nn);
  for (std::size_t k = 0; k < nn; ++k) rate[k] = profile.omega_dot(mesh.node_t[k]) / profile.omega(mesh.node_t[k]);

  PicardSeries out = series;
  out.I_star = I_star;
  out.I.assign(series.order + 1, std::vector<double>(series.grid.size(), 0.0));
  out.log_I_bound.assign(series.order + 1, std::vector<double>(series.grid.size(), 0.0));
  std::vector<double> u(nn, 0.0);
  std::vector<double> logI(series.grid.size());
  std::vector<double> indicator(series.grid.size());
  for (int k = 0; k <= series.order; ++k) {
    if (k > 0)
      for (std::size_t j = 0; j < nn; ++j) u[j] = -rate[j] * std::cos(2.0 * series.node_psi[k - 1][j]);
    const auto& psi_k = series.psi[k];
    std::fill(logI.begin(), logI.end(), 0.0);
    std::fill(indicator.begin(), indicator.end(), 0.0);
    double L = 0.0;
    double E = 0.0;
    for (std::size_t c = star; c < nc; ++c) {
      if (c != star && mesh.jump[c]) {
        const double td = mesh.grid[c];
        L += std::log(match_discontinuity(psi_k[c], 1.0, profile.omega_left(td), profile.omega_right(td)).I);
      }
      if (k > 0) {
        L += detail::cell_integral(mesh, c, u);
        E += detail::cell_indicator(mesh, c, u);
      }
      logI[c + 1] = L;
      indicator[c + 1] = E;
    }
    L = 0.0;
    E = 0.0;
    for (std::size_t c = star; c-- > 0;) {
      if (c + 1 != star && mesh.jump[c + 1]) {
        const double td = mesh.grid[c + 1];
        L += std::log(match_discontinuity(psi_k[c + 1], 1.0, profile.omega_right(td), profile.omega_left(td)).I);
      }
      if (k > 0) {
        L -= detail::cell_integral(mesh, c, u);
        E += detail::cell_indicator(mesh, c, u);
      }
      logI[c] = L;
      indicator[c] = E;
    }
    for (std::size_t i = 0; i < series.grid.size(); ++i) {
      out.I[k][i] = I_star * std::exp(logI[i]);
      out.log_I_bound[k][i] = std::pow(series.g[i], k + 1) / factorial(k + 1);
    }
    if (k > 0) check_resolution(indicator, out.log_I_bound[k], mesh, opts, "picard_I");
  }
  return out;
}

void write_picard_csv(std::ostream& out, const PicardSeries& s) {
  std::vector<std::string> cols{"t", "phi"};
  for (int k = 0; k <= s.order; ++k) cols.push_back("psi_" + std::to_string(k));
  const bool has_I = !s.I.empty();
  if (has_I)
    for (int k = 0; k <= s.order; ++k) cols.push_back("I_" + std::to_string(k));
  cols.push_back("g");
  cols.push_back("psi_bound");
  if (has_I) cols.push_back("log_I_bound");
  CsvWriter csv(out, "picard", cols);
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    std::vector<double> row{s.grid[i], s.phi[i]};
    for (int k = 0; k <= s.order; ++k) row.push_back(s.psi[k][i]);
    if (has_I)
      for (int k = 0; k <= s.order; ++k) row.push_back(s.I[k][i]);
    row.push_back(s.g[i]);
    row.push_back(s.psi_bound[s.order][i]);
    if (has_I) row.push_back(s.log_I_bound[s.order][i]);
    csv.row(row);
  }
}

void write_picard_json(std::ostream& out, const PicardSeries& s) {
  auto finite_or_null = [](const std::vector<double>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : v) a.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr));
    return a;
  };
  nlohmann::json j;
  j["schema"] = "tdho.picard.v1";
  j["order"] = s.order;
  j["t_star"] = s.t_star;
  j["psi_star"] = s.psi_star;
  j["grid"] = s.grid;
  j["phi"] = s.phi;
  j["psi"] = s.psi;
  j["g"] = finite_or_null(s.g);
  j["psi_bound"] = nlohmann::json::array();
  for (const auto& b : s.psi_bound) j["psi_bound"].push_back(finite_or_null(b));
  if (!s.I.empty()) {
    j["I_star"] = s.I_star;
    j["I"] = s.I;
    j["log_I_bound"] = nlohmann::json::array();
    for (const auto& b : s.log_I_bound) j["log_I_bound"].push_back(finite_or_null(b));
  }
  out << j.dump(1) << "\n";
}

PhaseState approx_zeroth(const FrequencyProfile& profile, double psi_star, double I_star, double t_star, double t) {
  const double phi = compute_phi(profile, psi_star, t_star, {t})[0];
  const double w = profile.omega(t);
  return {t, std::sqrt(2.0 * I_star / w) * std::sin(phi), std::sqrt(2.0 * I_star * w) * std::cos(phi)};
}

PhaseState approx_tilde(const FrequencyProfile& profile, double psi_star, double I_star, double t_star, double t) {
  const double w_star = profile.omega(t_star);
  const double w = profile.omega(t);
  const double arg = psi_star + w * (t - t_star);
  const double amp = std::sqrt(2.0 * I_star / w_star);
  return {t, amp * std::sin(arg), (w + profile.omega_dot(t) * (t - t_star)) * amp * std::cos(arg)};
}

std::vector<double> approx_hat(const FrequencyProfile& profile, double psi_star, double I_star, double t_star,
                               const std::vector<double>& grid) {
  const PicardSeries s = picard_I(profile, picard_psi(profile, psi_star, t_star, grid, 1), I_star);
  std::vector<double> q(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    q[i] = std::sqrt(2.0 * s.I[1][i] / profile.omega(grid[i])) * std::sin(s.phi[i]);
  return q;
}

double approx_hat(const FrequencyProfile& profile, double psi_star, double I_star, double t_star, double t) {
  if (t == t_star) return std::sqrt(2.0 * I_star / profile.omega(t)) * std::sin(psi_star);
  const auto grid = make_grid(profile, std::min(t, t_star), std::max(t, t_star), t_star, 16.0);
  const auto q = approx_hat(profile, psi_star, I_star, t_star, grid);
  return t > t_star ? q.back() : q.front();
}

EnvelopeBounds envelope_bounds(const FrequencyProfile& profile, double t_h, double t, int h, double I_h) {
  if (t < t_h) throw ParameterError("envelope_bounds: need t >= t_h");
  if (!(I_h > 0.0)) throw ParameterError("envelope_bounds: I_h must be positive");
  if (!profile.discontinuities_in(t_h, t).empty()) throw DomainError("envelope_bounds: interval crosses a discontinuity");
  const int samples = 513;
  double dmax = 0.0;
  std::vector<double> d(samples);
  for (int i = 0; i < samples; ++i) {
    d[i] = profile.omega_dot(t_h + (t - t_h) * i / (samples - 1));
    dmax = std::max(dmax, std::abs(d[i]));
  }
  const double thr = 1e-14 * dmax;
  const bool pos = std::any_of(d.begin(), d.end(), [&](double x) { return x > thr; });
  const bool neg = std::any_of(d.begin(), d.end(), [&](double x) { return x < -thr; });
  if (pos && neg) throw DomainError("envelope_bounds: omega is not monotone on the interval");
  const bool even = (h % 2 == 0);
  const double parity = even ? 1.0 : -1.0;

  EnvelopeBounds e;
  e.t = t;
  e.phi_is_lower = (!neg && even) || (!pos && !even);
  const double w_h = profile.omega(t_h);
  const double psi_h = h * kPi / 2.0;
  auto phi1_of = [&](double z, double phi) { return phi + parity * 0.5 * std::log(profile.omega(z) / w_h); };
  auto rhs = [&](double z, const ode::State<3>& y) {
    const double w = profile.omega(z);
    const double r = profile.omega_dot(z) / w;
    return ode::State<3>{w, -r * std::cos(2.0 * y[0]), -r * std::cos(2.0 * phi1_of(z, y[0]))};
  };
  ode::Options o;
  o.rtol = o.atol = 1e-12;
  const auto sol = ode::integrate<3>(rhs, t_h, ode::State<3>{psi_h, 0.0, 0.0}, t, o);
  const ode::State<3> y = sol.y_end();
  e.phi = y[0];
  e.phi1 = phi1_of(t, y[0]);
  e.psi_low = std::min(e.phi, e.phi1);
  e.psi_high = std::max(e.phi, e.phi1);
  e.I_low = I_h * std::exp(y[1]);
  e.I_high = I_h * std::exp(y[2]);

  // validity endpoint: phi1 (case phi lower) or phi (otherwise) reaching (h+1) pi/2
  const double target = (h + 1) * kPi / 2.0;
  auto level = [&](double z) {
    const double ph = sol(z)[0];
    return (e.phi_is_lower ? phi1_of(z, ph) : ph) - target;
  };
  if (t > t_h && level(t) >= 0.0) {
    double lo = t_h;
    double hi = t;
    for (const auto& st : sol.steps()) {
      const double te = st.t0 + st.h;
      if (level(te) >= 0.0) {
        hi = te;
        break;
      }
      lo = te;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (level(mid) >= 0.0 ? hi : lo) = mid;
    }
    e.t_bar = hi;
    if (t > hi) {
      if (e.phi_is_lower) e.I_high_valid = false;
      else e.I_low_valid = false;
    }
  }
  return e;
}

LambdaNormBound lambda_norm_bound(const FrequencyProfile& profile, double a, double b, double t_star, int h,
                                  double lambda, double psi_star, int lambda_grid) {
  if (h < 0) throw ParameterError("lambda_norm_bound: order must be >= 0");
  LambdaNormBound r;
  r.mu = sample_extrema(profile, a, b, 8193).log_rate_max;
  if (!(lambda > r.mu / 2.0)) throw ParameterError("lambda_norm_bound: requires lambda > mu/2");
  r.lambda = lambda;
  r.nu = r.mu / (2.0 * lambda);
  r.grid = make_grid(profile, a, b, t_star, 16.0);
  const PicardSeries s = picard_psi(profile, psi_star, t_star, r.grid, 1);
  const std::size_t n = r.grid.size();
  std::vector<double> diff(n), dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = std::abs(s.phi[i] - s.psi[1][i]);
    dist[i] = std::abs(r.grid[i] - t_star);
  }
  auto evaluate = [&](double lam, std::vector<double>& out) {
    const double nu = r.mu / (2.0 * lam);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm = std::max(norm, std::exp(-lam * dist[i]) * diff[i]);
    out.resize(n);
    const double factor = std::pow(nu, h) / (1.0 - nu);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(lam * dist[i]) * factor * norm;
    return norm;
  };
  r.norm = evaluate(lambda, r.bound);
  r.best_bound = r.bound;
  const double lam_lo = r.mu > 0.0 ? 0.5 * r.mu * (1.0 + 1e-3) : 1e-6;
  const double lam_hi = std::max(100.0 * lambda, r.mu > 0.0 ? 1e4 * r.mu : 1e3);
  std::vector<double> tmp;
  for (int j = 0; j < lambda_grid; ++j) {
    const double lam = lam_lo * std::pow(lam_hi / lam_lo, static_cast<double>(j) / std::max(1, lambda_grid - 1));
    evaluate(lam, tmp);
    for (std::size_t i = 0; i < n; ++i) r.best_bound[i] = std::min(r.best_bound[i], tmp[i]);
  }
  return r;
}

}  // namespace tdho
