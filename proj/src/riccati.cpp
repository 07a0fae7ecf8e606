#include "tdho/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "collocation.hpp"
#include "tdho/angle_action.hpp"
#include "tdho/csv.hpp"
#include "tdho/errors.hpp"
#include "tdho/oracle.hpp"
#include "tdho/quadrature.hpp"

namespace tdho {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kGapSlack = 1e-9;

double omega_sq_integral(const FrequencyProfile& profile, double a, double b) {
  auto w2 = [&](double z) {
    const double w = profile.omega(z);
    return w * w;
  };
  return quadrature(w2, a, b, 1e-13, profile.discontinuities_in(a, b));
}

/// Integrate node data f from the star outward; grid values start at v_star.
void sweep(const detail::Mesh& mesh, double v_star, const std::vector<double>& f, std::vector<double>& grid_out,
           std::vector<double>& nodes_out) {
  const std::size_t nc = mesh.cells();
  const int m = mesh.rule.m;
  grid_out.assign(mesh.grid.size(), kNaN);
  nodes_out.assign(nc * m, kNaN);
  grid_out[mesh.star] = v_star;
  double v = v_star;
  for (std::size_t c = mesh.star; c < nc; ++c) {
    for (int i = 0; i < m; ++i) nodes_out[mesh.node(c, i)] = v + detail::cell_partial(mesh, c, i, f);
    v += detail::cell_integral(mesh, c, f);
    grid_out[c + 1] = v;
  }
  v = v_star;
  for (std::size_t c = mesh.star; c-- > 0;) {
    const double left = v - detail::cell_integral(mesh, c, f);
    for (int i = 0; i < m; ++i) nodes_out[mesh.node(c, i)] = left + detail::cell_partial(mesh, c, i, f);
    grid_out[c] = left;
    v = left;
  }
}

bool cell_ok(const detail::Mesh& mesh, std::size_t c, const std::vector<double>& nodes, double limit) {
  for (int i = 0; i < mesh.rule.m; ++i) {
    const double x = nodes[mesh.node(c, i)];
    if (!std::isfinite(x) || std::abs(x) > limit) return false;
  }
  return true;
}

/// NaN-out everything past the first cell (counted from the star) that leaves the working range.
void truncate(const detail::Mesh& mesh, double limit, std::vector<double>& grid_v, std::vector<double>& nodes,
              std::size_t& lo, std::size_t& hi) {
  const int m = mesh.rule.m;
  auto kill_cell = [&](std::size_t c) {
    for (int i = 0; i < m; ++i) nodes[mesh.node(c, i)] = kNaN;
  };
  hi = mesh.star;
  bool dead = false;
  for (std::size_t c = mesh.star; c < mesh.cells(); ++c) {
    if (!dead && (!cell_ok(mesh, c, nodes, limit) || !std::isfinite(grid_v[c + 1]) ||
                  std::abs(grid_v[c + 1]) > limit))
      dead = true;
    if (dead) {
      kill_cell(c);
      grid_v[c + 1] = kNaN;
    } else {
      hi = c + 1;
    }
  }
  lo = mesh.star;
  dead = false;
  for (std::size_t c = mesh.star; c-- > 0;) {
    if (!dead && (!cell_ok(mesh, c, nodes, limit) || !std::isfinite(grid_v[c]) || std::abs(grid_v[c]) > limit))
      dead = true;
    if (dead) {
      kill_cell(c);
      grid_v[c] = kNaN;
    } else {
      lo = c;
    }
  }
}

long floor_div4(long h) { return ((h % 4) + 4) % 4; }

/// Dense psi and (q, p) of one solution on [lo, hi], with data given at t_i.
class WindowSolution {
 public:
  WindowSolution(const FrequencyProfile& profile, double q_i, double p_i, double t_i, double lo, double hi,
                 double tol)
      : t_i_(t_i),
        psi_i_(to_angle_action({t_i, q_i, p_i}, profile.omega(t_i)).psi),
        I_i_(to_angle_action({t_i, q_i, p_i}, profile.omega(t_i)).I),
        aa_back_(integrate_angle_action(profile, psi_i_, I_i_, t_i, lo, tol)),
        aa_fwd_(integrate_angle_action(profile, psi_i_, I_i_, t_i, hi, tol)),
        qp_back_(integrate_qp(profile, q_i, p_i, t_i, lo, tol)),
        qp_fwd_(integrate_qp(profile, q_i, p_i, t_i, hi, tol)) {}

  [[nodiscard]] double psi(double t) const { return t < t_i_ ? aa_back_.at(t).psi : aa_fwd_.at(t).psi; }
  [[nodiscard]] PhaseState qp(double t) const { return t < t_i_ ? qp_back_.at(t) : qp_fwd_.at(t); }

  [[nodiscard]] std::vector<double> sample_times() const {
    std::vector<double> ts;
    for (const auto& s : aa_back_.samples()) ts.push_back(s.t);
    for (const auto& s : aa_fwd_.samples()) ts.push_back(s.t);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
  }

 private:
  double t_i_, psi_i_, I_i_;
  AngleActionTrajectory aa_back_, aa_fwd_;
  Trajectory qp_back_, qp_fwd_;
};

/// Bisection of a sign change of g on [a, b] until the bracket is below width.
double bisect(const std::function<double(double)>& g, double a, double b, double width, double& bracket) {
  double ga = g(a);
  if (ga == 0.0) {
    bracket = 0.0;
    return a;
  }
  for (int it = 0; it < 200 && b - a > width; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double gm = g(mid);
    if (gm == 0.0) {
      bracket = 0.0;
      return mid;
    }
    if ((gm > 0.0) == (ga > 0.0)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
    }
  }
  bracket = b - a;
  return 0.5 * (a + b);
}

/// Sampled omega on [a, b] with one-sided values at declared jumps on the ends.
std::vector<double> omega_samples(const FrequencyProfile& profile, double a, double b, int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    double t = a + (b - a) * i / (n - 1);
    if (i == 0 && profile.is_discontinuity(a)) {
      w[i] = profile.omega_right(a);
      continue;
    }
    if (i == n - 1 && profile.is_discontinuity(b)) {
      w[i] = profile.omega_left(b);
      continue;
    }
    w[i] = profile.omega(t);
  }
  return w;
}

bool sampled_monotone(const std::vector<double>& w) {
  bool up = true, down = true;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i] < w[i - 1]) up = false;
    if (w[i] > w[i - 1]) down = false;
  }
  return up || down;
}

GapCertificate certify_gap(const FrequencyProfile& profile, const WindowSolution& sol, const SpecialPoint& a,
                           const SpecialPoint& b, double omega_l0, double omega_u0) {
  GapCertificate g;
  g.h = a.h;
  g.gap = b.t - a.t;
  const ProfileExtrema ex = sample_extrema(profile, a.t, b.t);
  g.omega_l = ex.omega_min;
  g.omega_u = ex.omega_max;
  g.bound_low = kPi / (2.0 * g.omega_u);
  g.bound_high = kPi / (2.0 * g.omega_l);
  const double slack = kGapSlack * std::max(1.0, g.gap);
  g.rough_ok = g.gap >= g.bound_low - slack && g.gap <= g.bound_high + slack;

  const auto w = omega_samples(profile, a.t, b.t, 513);
  g.monotone = profile.discontinuities_in(a.t, b.t).empty() && sampled_monotone(w);
  auto om = [&](double z) { return profile.omega(z); };
  g.phase_defect = 0.5 * kPi - quadrature(om, a.t, b.t, 1e-13, profile.discontinuities_in(a.t, b.t));
  g.phase_limit = ((a.h % 2 == 0) ? 0.5 : -0.5) * std::log(w.back() / w.front());
  if (g.monotone)
    g.refined_ok = g.phase_defect >= std::min(0.0, g.phase_limit) - kGapSlack &&
                   g.phase_defect <= std::max(0.0, g.phase_limit) + kGapSlack;

  // single refinement pass starting from bounds valid on the whole window
  double omega_u = sample_extrema(profile, a.t, a.t + kPi / (2.0 * omega_u0)).omega_max;
  if (sample_extrema(profile, a.t, a.t + kPi / (2.0 * omega_u)).omega_max > omega_u) omega_u = omega_u0;
  const double omega_l = sample_extrema(profile, a.t, a.t + kPi / (2.0 * omega_l0)).omega_min;
  g.predicted_low = kPi / (2.0 * omega_u);
  g.predicted_high = kPi / (2.0 * omega_l);
  g.predicted_ok = g.gap >= g.predicted_low - slack && g.gap <= g.predicted_high + slack;

  g.quadrant = static_cast<int>(floor_div4(a.h)) + 1;
  const PhaseState mid = sol.qp(0.5 * (a.t + b.t));
  const bool qpos = mid.q > 0.0, ppos = mid.p > 0.0;
  switch (g.quadrant) {
    case 1: g.quadrant_ok = qpos && ppos; break;
    case 2: g.quadrant_ok = qpos && !ppos && mid.p != 0.0; break;
    case 3: g.quadrant_ok = !qpos && !ppos && mid.q != 0.0 && mid.p != 0.0; break;
    default: g.quadrant_ok = !qpos && ppos && mid.q != 0.0; break;
  }
  return g;
}

}  // namespace

double riccati_rhs(RiccatiKind kind, double value, double omega) {
  const double w2 = omega * omega;
  return kind == RiccatiKind::r ? -w2 - value * value : 1.0 + w2 * value * value;
}

RiccatiSeries riccati_picard(RiccatiKind kind, const FrequencyProfile& profile, double v_star, double t_star,
                             const std::vector<double>& grid, int h, const RiccatiOptions& opts) {
  if (h < 0) throw ParameterError("riccati_picard: order must be >= 0");
  if (!(opts.blowup > 0.0)) throw ParameterError("riccati_picard: blowup threshold must be positive");
  if (!std::isfinite(v_star)) throw ParameterError("riccati_picard: v_star must be finite");
  const detail::Mesh mesh(profile, grid, t_star, opts.nodes_per_cell);
  const std::size_t nn = mesh.node_t.size();

  std::vector<double> w2(nn);
  for (std::size_t k = 0; k < nn; ++k) {
    const double w = profile.omega(mesh.node_t[k]);
    w2[k] = w * w;
  }

  RiccatiSeries s;
  s.kind = kind;
  s.order = h;
  s.t_star = t_star;
  s.v_star = v_star;
  s.star_index = mesh.star;
  s.grid = mesh.grid;
  s.nodes_per_cell = mesh.rule.m;
  s.values.assign(1, std::vector<double>(mesh.grid.size(), v_star));
  s.node_values.assign(1, std::vector<double>(nn, v_star));
  s.valid_lo.assign(1, 0);
  s.valid_hi.assign(1, mesh.grid.size() - 1);
  if (std::abs(v_star) > opts.blowup) throw ParameterError("riccati_picard: v_star beyond the blow-up threshold");

  std::vector<double> f(nn);
  for (int k = 1; k <= h; ++k) {
    const auto& prev = s.node_values.back();
    for (std::size_t j = 0; j < nn; ++j) f[j] = riccati_rhs(kind, prev[j], std::sqrt(w2[j]));
    std::vector<double> gv, nv;
    sweep(mesh, v_star, f, gv, nv);
    std::size_t lo = 0, hi = 0;
    truncate(mesh, opts.blowup, gv, nv, lo, hi);
    s.values.push_back(std::move(gv));
    s.node_values.push_back(std::move(nv));
    s.valid_lo.push_back(lo);
    s.valid_hi.push_back(hi);
  }
  return s;
}

std::vector<double> reconstruct_q(const RiccatiSeries& series, int k, double q_star) {
  if (k < 0 || k > series.order) throw ParameterError("reconstruct_q: order out of range");
  if (series.kind == RiccatiKind::s && series.v_star == 0.0)
    throw DomainError("reconstruct_q: 1/s is singular at t_star when s_star = 0");
  // Mesh rebuilt only for its rule and layout; the grid already satisfies its checks.
  const FrequencyProfile unit([](double) { return 1.0; }, [](double) { return 0.0; });
  const detail::Mesh mesh(unit, series.grid, series.t_star, series.nodes_per_cell);
  std::vector<double> f = series.node_values[k];
  if (series.kind == RiccatiKind::s)
    for (double& x : f) x = 1.0 / x;
  std::vector<double> logq, nodes;
  sweep(mesh, 0.0, f, logq, nodes);
  std::vector<double> q(logq.size(), kNaN);
  for (std::size_t i = series.valid_lo[k]; i <= series.valid_hi[k]; ++i) q[i] = q_star * std::exp(logq[i]);
  return q;
}

std::vector<double> reconstruct_q(RiccatiKind kind, const std::function<double(double)>& v,
                                  const std::vector<double>& grid, double q_star, double t_star) {
  std::function<double(double)> f = v;
  if (kind == RiccatiKind::s) f = [&v](double z) { return 1.0 / v(z); };
  std::vector<double> q;
  q.reserve(grid.size());
  for (double t : grid) q.push_back(q_star * std::exp(quadrature(f, t_star, t, 1e-12)));
  return q;
}

double first_order_r(const FrequencyProfile& profile, double r_star, double t_star, double t) {
  return r_star - r_star * r_star * (t - t_star) - omega_sq_integral(profile, t_star, t);
}

double first_order_s(const FrequencyProfile& profile, double s_star, double t_star, double t) {
  return s_star + (t - t_star) + s_star * s_star * omega_sq_integral(profile, t_star, t);
}

double first_order_q_r(const FrequencyProfile& profile, double q_star, double p_star, double t_star, double t) {
  if (q_star == 0.0) throw DomainError("first_order_q_r: q_star must be nonzero");
  const double r = p_star / q_star;
  const double d = t - t_star;
  auto kernel = [&](double z) {
    const double w = profile.omega(z);
    return (t - z) * w * w;
  };
  const double mem = quadrature(kernel, t_star, t, 1e-13, profile.discontinuities_in(t_star, t));
  return q_star * std::exp(r * d - 0.5 * r * r * d * d - mem);
}

double first_order_q_s(const FrequencyProfile& profile, double q_star, double p_star, double t_star, double t) {
  if (q_star == 0.0) return p_star * first_order_s(profile, 0.0, t_star, t);
  if (p_star == 0.0) throw DomainError("first_order_q_s: p_star must be nonzero");
  const double s = q_star / p_star;
  auto inv = [&](double z) { return 1.0 / first_order_s(profile, s, t_star, z); };
  const double v = q_star * std::exp(quadrature(inv, t_star, t, 1e-12));
  if (!std::isfinite(v)) throw DomainError("first_order_q_s: s^(1) vanishes on the interval");
  return v;
}

bool ZeroSequence::parities_alternate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Parity want = (points[i].h % 2 == 0) ? Parity::q_zero : Parity::p_zero;
    if (points[i].parity != want) return false;
    if (i > 0 && (points[i].parity == points[i - 1].parity || points[i].h != points[i - 1].h + 1)) return false;
  }
  return true;
}

bool ZeroSequence::strictly_increasing() const {
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i].t > points[i - 1].t)) return false;
  return true;
}

bool ZeroSequence::all_certified() const {
  if (!parities_alternate() || !strictly_increasing()) return false;
  return std::all_of(gaps.begin(), gaps.end(), [](const GapCertificate& g) {
    return g.rough_ok && g.predicted_ok && g.quadrant_ok && g.refined_ok.value_or(true);
  });
}

ZeroSequence find_zero_sequence_window(const FrequencyProfile& profile, double q_i, double p_i, double t_i,
                                       double lo, double hi, double tol) {
  if (!(lo <= t_i && t_i <= hi)) throw ParameterError("find_zero_sequence: need lo <= t_i <= hi");
  if (!(tol > 0.0)) throw ParameterError("find_zero_sequence: tol must be positive");
  const ProfileExtrema ex = sample_extrema(profile, lo, hi > lo ? hi : lo + 1.0);
  if (!(ex.omega_min > 0.0)) throw DomainError("find_zero_sequence: omega must stay positive");

  const WindowSolution sol(profile, q_i, p_i, t_i, lo, hi, tol);
  const std::vector<double> ts = sol.sample_times();
  std::vector<double> psis;
  psis.reserve(ts.size());
  for (double t : ts) psis.push_back(sol.psi(t));

  const double quarter = 0.5 * kPi;
  const long h_first = static_cast<long>(std::ceil(psis.front() / quarter));
  const long h_last = static_cast<long>(std::floor(psis.back() / quarter));

  ZeroSequence zs;
  std::size_t j = 0;
  for (long h = h_first; h <= h_last; ++h) {
    const double level = h * quarter;
    while (j < ts.size() && psis[j] < level) ++j;
    if (j == ts.size()) break;
    SpecialPoint sp;
    sp.h = h;
    sp.parity = (h % 2 == 0) ? Parity::q_zero : Parity::p_zero;
    double t_psi = ts[j];
    if (j > 0 && psis[j] > level) {
      double br = 0.0;
      t_psi = bisect([&](double t) { return sol.psi(t) - level; }, ts[j - 1], ts[j], 1e-14, br);
    }
    // refine on q (even h) or p (odd h) from the psi estimate
    auto comp = [&](double t) {
      const PhaseState s = sol.qp(t);
      return sp.parity == Parity::q_zero ? s.q : s.p;
    };
    double d = 1e-9 * std::max(1.0, std::abs(t_psi));
    double a = std::max(lo, t_psi - d), b = std::min(hi, t_psi + d);
    while ((comp(a) > 0.0) == (comp(b) > 0.0) && comp(a) != 0.0 && comp(b) != 0.0 && (a > lo || b < hi)) {
      d *= 4.0;
      a = std::max(lo, t_psi - d);
      b = std::min(hi, t_psi + d);
    }
    if ((comp(a) > 0.0) == (comp(b) > 0.0) && comp(a) != 0.0 && comp(b) != 0.0) {
      sp.t = t_psi;
      sp.bracket = std::numeric_limits<double>::infinity();
    } else {
      sp.t = bisect(comp, a, b, tol * std::max(1.0, std::abs(t_psi)), sp.bracket);
    }
    zs.points.push_back(sp);
  }

  for (std::size_t i = 0; i + 1 < zs.points.size(); ++i)
    zs.gaps.push_back(certify_gap(profile, sol, zs.points[i], zs.points[i + 1], ex.omega_min, ex.omega_max));
  return zs;
}

ZeroSequence find_zero_sequence(const FrequencyProfile& profile, double q0, double p0, double t0, double t_max,
                                double tol) {
  if (!(t_max > t0)) throw ParameterError("find_zero_sequence: need t_max > t0");
  return find_zero_sequence_window(profile, q0, p0, t0, t0, t_max, tol);
}

MonotonicityReport check_monotonicity_in_ti(const FrequencyProfile& profile, double q_i, double p_i,
                                            const std::vector<double>& ti_grid, long h_min, long h_max) {
  if (ti_grid.empty()) throw ParameterError("check_monotonicity_in_ti: empty grid");
  if (h_min > h_max) throw ParameterError("check_monotonicity_in_ti: empty h range");
  if (!std::is_sorted(ti_grid.begin(), ti_grid.end()))
    throw ParameterError("check_monotonicity_in_ti: ti grid must be increasing");
  MonotonicityReport rep;
  rep.ti = ti_grid;
  for (long h = h_min; h <= h_max; ++h) rep.h.push_back(h);
  rep.t_h.assign(rep.h.size(), std::vector<double>(ti_grid.size(), kNaN));

  // window reach: enough quarter periods at the slowest frequency met
  const double span = static_cast<double>(std::max(std::abs(h_min), std::abs(h_max)) + 2);
  const double a = ti_grid.front(), b = ti_grid.back();
  double reach = span * kPi / (2.0 * profile.omega(a));
  for (int it = 0; it < 6; ++it) {
    const double w = sample_extrema(profile, a - reach, b + reach).omega_min;
    if (!(w > 0.0)) throw DomainError("check_monotonicity_in_ti: omega must stay positive");
    const double next = span * kPi / (2.0 * w);
    if (next <= reach) break;
    reach = next;
  }

  for (std::size_t i = 0; i < ti_grid.size(); ++i) {
    const double ti = ti_grid[i];
    const ZeroSequence zs = find_zero_sequence_window(profile, q_i, p_i, ti, ti - reach, ti + reach);
    for (const SpecialPoint& sp : zs.points)
      if (sp.h >= h_min && sp.h <= h_max) rep.t_h[sp.h - h_min][i] = sp.t;
  }
  for (std::size_t k = 0; k < rep.h.size(); ++k) {
    for (std::size_t i = 0; i < ti_grid.size(); ++i) {
      if (std::isnan(rep.t_h[k][i])) {
        rep.strictly_growing = false;
        rep.violations.push_back("h=" + std::to_string(rep.h[k]) + " not located at ti=" + format_double(ti_grid[i]));
      } else if (i > 0 && !std::isnan(rep.t_h[k][i - 1]) && ti_grid[i] > ti_grid[i - 1] &&
                 !(rep.t_h[k][i] > rep.t_h[k][i - 1])) {
        rep.strictly_growing = false;
        rep.violations.push_back("h=" + std::to_string(rep.h[k]) + " not growing at ti=" + format_double(ti_grid[i]));
      }
    }
  }
  return rep;
}

void write_zero_sequence_csv(std::ostream& out, const ZeroSequence& zs) {
  CsvWriter csv(out, "zero_sequence",
                {"h", "t_h", "gap", "bound_low", "bound_high", "omega_l", "omega_u", "phase_defect", "phase_limit",
                 "predicted_low", "predicted_high", "quadrant", "parity", "rough_ok", "refined_ok", "predicted_ok",
                 "quadrant_ok"});
  auto flag = [](bool b) { return std::string(b ? "1" : "0"); };
  for (std::size_t i = 0; i < zs.points.size(); ++i) {
    const SpecialPoint& p = zs.points[i];
    const std::string parity = p.parity == Parity::q_zero ? "q" : "p";
    if (i < zs.gaps.size()) {
      const GapCertificate& g = zs.gaps[i];
      csv.row({static_cast<double>(p.h), p.t, g.gap, g.bound_low, g.bound_high, g.omega_l, g.omega_u, g.phase_defect,
               g.phase_limit, g.predicted_low, g.predicted_high, static_cast<double>(g.quadrant)},
              {parity, flag(g.rough_ok), g.refined_ok ? flag(*g.refined_ok) : "na", flag(g.predicted_ok),
               flag(g.quadrant_ok)});
    } else {
      csv.row({static_cast<double>(p.h), p.t, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, kNaN},
              {parity, "na", "na", "na", "na"});
    }
  }
}

}  // namespace tdho
