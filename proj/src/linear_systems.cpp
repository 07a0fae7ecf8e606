#include "tdho/linear_systems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "tdho/csv.hpp"
#include "tdho/errors.hpp"
#include "tdho/quadrature.hpp"

namespace tdho {

FundamentalMatrix::FundamentalMatrix(FrequencyProfile profile, Trajectory q1, Trajectory q2,
                                     std::vector<double> grid)
    : profile_(std::move(profile)), q1_(std::move(q1)), q2_(std::move(q2)), grid_(std::move(grid)) {
  for (double t : grid_) drift_ = std::max(drift_, std::abs(V(t).det() - 1.0));
}

Mat2 FundamentalMatrix::V(double t) const {
  const PhaseState a = q1_.at(t);
  const PhaseState b = q2_.at(t);
  return {a.q, b.q, a.p, b.p};
}

Mat2 FundamentalMatrix::V_inv(double t) const {
  const Mat2 v = V(t);
  return {v.a22, -v.a12, -v.a21, v.a11};
}

namespace {

/// Integrate from 0 to both ends of [lo, hi] and stitch into one trajectory.
Trajectory two_sided(const FrequencyProfile& profile, double q0, double p0, double lo, double hi, double tol) {
  std::vector<ode::DenseSolution<2>> pieces;
  if (hi > 0.0) {
    const Trajectory f = integrate_qp(profile, q0, p0, 0.0, hi, tol);
    pieces.insert(pieces.end(), f.pieces().begin(), f.pieces().end());
  }
  if (lo < 0.0) {
    const Trajectory b = integrate_qp(profile, q0, p0, 0.0, lo, tol);
    pieces.insert(pieces.end(), b.pieces().begin(), b.pieces().end());
  }
  if (pieces.empty()) pieces.emplace_back(0.0, ode::State<2>{q0, p0});
  return Trajectory(std::move(pieces), tol, profile.kind());
}

}  // namespace

FundamentalMatrix fundamental_matrix(const FrequencyProfile& profile, const std::vector<double>& t_grid, double tol) {
  if (t_grid.empty()) throw ParameterError("fundamental_matrix: empty grid");
  const double lo = std::min(0.0, *std::min_element(t_grid.begin(), t_grid.end()));
  const double hi = std::max(0.0, *std::max_element(t_grid.begin(), t_grid.end()));
  return FundamentalMatrix(profile, two_sided(profile, 1.0, 0.0, lo, hi, tol),
                           two_sided(profile, 0.0, 1.0, lo, hi, tol), t_grid);
}

Mat2 propagator(const FundamentalMatrix& fund, double t, double t_star) {
  return fund.V(t) * fund.V_inv(t_star);
}

Vec2 solve_inhomogeneous(const FundamentalMatrix& fund, const std::function<Vec2(double)>& forcing,
                         const Vec2& x_star, double t_star, double t, double tol) {
  const Mat2 v_star = fund.V(t_star);
  auto component = [&](int i) {
    return [&, i](double z) {
      const Vec2 c = v_star * (fund.V_inv(z) * forcing(z));
      return c[i];
    };
  };
  const auto jumps = fund.profile().discontinuities_in(t_star, t);
  Vec2 y = x_star;
  if (forcing) {
    y[0] += quadrature(component(0), t_star, t, tol, jumps);
    y[1] += quadrature(component(1), t_star, t, tol, jumps);
  }
  return propagator(fund, t, t_star) * y;
}

Reduction::Reduction(GeneralSystem sys, double t0, double t1, int samples)
    : sys_(std::move(sys)), t0_(t0), t1_(t1) {
  if (!sys_.A) throw ParameterError("reduce_general_system: coefficient matrix required");
  if (!(t1 > t0)) throw ParameterError("reduce_general_system: need t0 < t1");
  samples = std::max(samples, 2);
  double scale = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Mat2 a = sys_.A(t0 + (t1 - t0) * i / (samples - 1));
    scale = std::max({scale, std::abs(a.a11), std::abs(a.a12), std::abs(a.a21), std::abs(a.a22)});
  }
  const double sign0 = sys_.A(t0).a12;
  for (int i = 0; i < samples; ++i) {
    const double t = t0 + (t1 - t0) * i / (samples - 1);
    const double a12 = sys_.A(t).a12;
    if (std::abs(a12) <= 1e-14 * std::max(scale, 1e-300) || a12 * sign0 <= 0.0)
      throw DomainError("reduce_general_system: A~12 vanishes on the domain (index-swapped branch not implemented)");
    ts_.push_back(t);
    w2_.push_back(omega_sq(t));
  }
  omega_sq_min_ = *std::min_element(w2_.begin(), w2_.end());
  positive_ = omega_sq_min_ > 0.0;
}

Mat2 Reduction::A_dot(double t) const {
  if (sys_.A_dot) return sys_.A_dot(t);
  const double h = 1e-5 * std::max(1.0, std::abs(t));
  const Mat2 p = sys_.A(t + h);
  const Mat2 m = sys_.A(t - h);
  return {(p.a11 - m.a11) / (2 * h), (p.a12 - m.a12) / (2 * h), (p.a21 - m.a21) / (2 * h), (p.a22 - m.a22) / (2 * h)};
}

double Reduction::b(double t) const {
  const Mat2 a = sys_.A(t);
  return 0.5 * (a.a11 - a.a22 - A_dot(t).a12 / a.a12);
}

double Reduction::omega_sq(double t) const {
  const double h = 1e-4 * std::max(1.0, std::abs(t));
  const double bd = (b(t + h) - b(t - h)) / (2 * h);
  const double bb = b(t);
  const Mat2 a = sys_.A(t);
  return -(bd + bb * bb + a.a12 * a.a21);
}

double Reduction::lambda(double t) const {
  auto tr = [&](double z) {
    const Mat2 a = sys_.A(z);
    return a.a11 + a.a22;
  };
  return -0.5 * quadrature(tr, t0_, t, 1e-12) - 0.5 * std::log(std::abs(sys_.A(t).a12 / sys_.A(t0_).a12));
}

Mat2 Reduction::B(double t) const { return {1.0, 0.0, b(t), sys_.A(t).a12}; }

Vec2 Reduction::to_reduced(double t, const Vec2& x) const {
  const Vec2 y = B(t) * x;
  const double e = std::exp(lambda(t));
  return {e * y[0], e * y[1]};
}

Vec2 Reduction::to_original(double t, const Vec2& x) const {
  const Vec2 y = B(t).inverse() * x;
  const double e = std::exp(-lambda(t));
  return {e * y[0], e * y[1]};
}

Vec2 Reduction::reduced_forcing(double t) const {
  if (!sys_.a) return {0.0, 0.0};
  return to_reduced(t, sys_.a(t));
}

FrequencyProfile Reduction::profile() const {
  if (!positive_) throw DomainError("reduction: omega^2 is not positive on the domain");
  ProfileOptions o;
  o.kind = "reduced";
  auto self = *this;
  return FrequencyProfile([self](double t) { return std::sqrt(self.omega_sq(t)); },
                          [self](double t) {
                            const double h = 1e-4 * std::max(1.0, std::abs(t));
                            const double d = (self.omega_sq(t + h) - self.omega_sq(t - h)) / (2 * h);
                            return d / (2.0 * std::sqrt(self.omega_sq(t)));
                          },
                          o);
}

Reduction reduce_general_system(const GeneralSystem& sys, double t0, double t1, int samples) {
  return Reduction(sys, t0, t1, samples);
}

ErmakovReport ermakov_check(const FundamentalMatrix& fund, const ErmakovOptions& opts) {
  if (opts.L == 0.0) throw ParameterError("ermakov_check: L must be nonzero");
  const Mat2& C = opts.C;
  const double w = C.det();
  if (w == 0.0) throw ParameterError("ermakov_check: C must be invertible");
  const double k = opts.L / w;
  const double L2 = opts.L * opts.L;
  const FrequencyProfile& prof = fund.profile();

  struct RhoState {
    double rho, rho_dot;
  };
  auto rho_at = [&](double t) {
    const Mat2 V = fund.V(t);
    const double u = C.a11 * V.a11 + C.a12 * V.a12;
    const double ud = C.a11 * V.a21 + C.a12 * V.a22;
    const double v = C.a21 * V.a11 + C.a22 * V.a12;
    const double vd = C.a21 * V.a21 + C.a22 * V.a22;
    const double r = std::sqrt(u * u + k * k * v * v);
    return RhoState{r, (u * ud + k * k * v * vd) / r};
  };

  ErmakovReport rep;
  rep.L = opts.L;
  rep.rho_min = std::numeric_limits<double>::infinity();
  const double h = opts.fd_step;
  const double lo = fund.t_min() + 2 * h;
  const double hi = fund.t_max() - 2 * h;
  const int n = std::max(opts.samples, 2);
  std::vector<double> ts(n);
  for (int i = 0; i < n; ++i) ts[i] = lo + (hi - lo) * i / (n - 1);

  // theta = integral of L / rho^2 from 0 on the sample grid plus the FD stencils
  auto theta = [&](double t) {
    return quadrature([&](double z) { return opts.L / std::pow(rho_at(z).rho, 2); }, 0.0, t, 1e-12,
                      prof.discontinuities_in(0.0, t));
  };

  for (double t : ts) {
    const RhoState r = rho_at(t);
    rep.rho_min = std::min(rep.rho_min, r.rho);
    rep.rho_max = std::max(rep.rho_max, r.rho);
    if (prof.discontinuities_in(t - h, t + h).empty() && !prof.is_discontinuity(t)) {
      const double rdd = (rho_at(t + h).rho_dot - rho_at(t - h).rho_dot) / (2 * h);
      const double om = prof.omega(t);
      rep.ermakov_residual =
          std::max(rep.ermakov_residual, std::abs(rdd + om * om * r.rho - L2 / (r.rho * r.rho * r.rho)));
    }
  }

  for (const Vec2& ic : opts.test_solutions) {
    auto inv = [&](double t) {
      const Mat2 V = fund.V(t);
      const double q = ic[0] * V.a11 + ic[1] * V.a12;
      const double qd = ic[0] * V.a21 + ic[1] * V.a22;
      const RhoState r = rho_at(t);
      const double a = q * r.rho_dot - qd * r.rho;
      return 0.5 * (a * a + L2 * (q / r.rho) * (q / r.rho));
    };
    const double i0 = inv(0.0);
    rep.invariant_values.push_back(i0);
    for (double t : ts) rep.invariant_drift = std::max(rep.invariant_drift, std::abs(inv(t) - i0) / std::abs(i0));
    const bool is_q1 = ic[0] == 1.0 && ic[1] == 0.0;
    const bool is_q2 = ic[0] == 0.0 && ic[1] == 1.0;
    if ((is_q1 || is_q2) && C.max_abs_diff(Mat2::identity()) == 0.0)
      for (double t : ts) rep.fundamental_defect = std::max(rep.fundamental_defect, std::abs(2.0 * inv(t) - L2));
  }

  // general solution A rho sin(theta + alpha); q' = A (rho' sin + rho theta' cos)
  const int n_gen = std::min(n, 121);
  for (const Vec2& aa : opts.amplitude_phase) {
    auto qdot = [&](double t, double th) {
      const RhoState r = rho_at(t);
      return aa[0] * (r.rho_dot * std::sin(th + aa[1]) + opts.L / r.rho * std::cos(th + aa[1]));
    };
    for (int i = 0; i < n_gen; ++i) {
      const double t = lo + (hi - lo) * i / (n_gen - 1);
      if (!prof.discontinuities_in(t - h, t + h).empty() || prof.is_discontinuity(t)) continue;
      const double th = theta(t);
      const double thp = th + quadrature([&](double z) { return opts.L / std::pow(rho_at(z).rho, 2); }, t, t + h, 1e-14);
      const double thm = th - quadrature([&](double z) { return opts.L / std::pow(rho_at(z).rho, 2); }, t - h, t, 1e-14);
      const double qdd = (qdot(t + h, thp) - qdot(t - h, thm)) / (2 * h);
      const double q = aa[0] * rho_at(t).rho * std::sin(th + aa[1]);
      const double om = prof.omega(t);
      rep.general_solution_residual = std::max(rep.general_solution_residual, std::abs(qdd + om * om * q));
    }
  }
  return rep;
}

void write_fundamental_csv(std::ostream& out, const FundamentalMatrix& fund) {
  CsvWriter csv(out, "fundamental", {"t", "q1", "q2", "q1_dot", "q2_dot", "det_V"});
  for (double t : fund.grid()) {
    const Mat2 V = fund.V(t);
    csv.row({t, V.a11, V.a12, V.a21, V.a22, V.det()});
  }
}

}  // namespace tdho
