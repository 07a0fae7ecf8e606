#include "tdho/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <utility>

#include "tdho/angle_action.hpp"
#include "tdho/csv.hpp"
#include "tdho/errors.hpp"

namespace tdho {

namespace {

/// Breakpoints from t0 to t1 (in integration order) including the declared jumps between them.
std::vector<double> segment_points(const FrequencyProfile& profile, double t0, double t1) {
  std::vector<double> pts = profile.discontinuities_in(t0, t1);
  if (t1 < t0) std::reverse(pts.begin(), pts.end());
  pts.insert(pts.begin(), t0);
  pts.push_back(t1);
  return pts;
}

template <class Piece>
const Piece& locate(const std::vector<Piece>& pieces, double t) {
  for (const auto& p : pieces)
    if (p.contains(t)) return p;
  throw DomainError("trajectory: time outside integrated range");
}

template <class Piece>
double lowest(const std::vector<Piece>& pieces) {
  double v = pieces.front().t_begin();
  for (const auto& p : pieces) v = std::min({v, p.t_begin(), p.t_end()});
  return v;
}

template <class Piece>
double highest(const std::vector<Piece>& pieces) {
  double v = pieces.front().t_begin();
  for (const auto& p : pieces) v = std::max({v, p.t_begin(), p.t_end()});
  return v;
}

/// Step-point times of all pieces in increasing order, without duplicates.
template <class Piece>
std::vector<double> step_times(const std::vector<Piece>& pieces) {
  std::vector<double> ts;
  for (const auto& p : pieces) {
    ts.push_back(p.t_begin());
    for (const auto& s : p.steps()) ts.push_back(s.t0 + s.h);
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

/// omega and omega_dot inside the piece [a,b] (either order), using one-sided
/// limits at declared jumps sitting on the piece ends.
std::pair<double, double> piece_omega(const FrequencyProfile& profile, double t, double a, double b) {
  const bool fwd = b > a;
  auto inward = [&](double end, bool is_start) {
    const double off = 1e-13 * std::max(1.0, std::abs(end));
    return (fwd == is_start) ? end + off : end - off;
  };
  if ((t == a || t == b) && profile.is_discontinuity(t)) {
    const double z = inward(t, t == a);
    return {profile.omega(z), profile.omega_dot(z)};
  }
  return {profile.omega(t), profile.omega_dot(t)};
}

void check_tol(double tol) {
  if (!(tol > 0.0)) throw ParameterError("oracle: tol must be positive");
}

}  // namespace

ode::Options oracle_options(double tol) {
  // per-step tolerance; global error over a few dozen periods stays below tol
  constexpr double kStepSafety = 1.0 / 32.0;
  ode::Options o;
  o.rtol = tol * kStepSafety;
  o.atol = tol * kStepSafety;
  return o;
}

Trajectory::Trajectory(std::vector<ode::DenseSolution<2>> pieces, double tol, std::string kind)
    : pieces_(std::move(pieces)), tol_(tol), kind_(std::move(kind)) {
  if (pieces_.empty()) throw ParameterError("trajectory: no pieces");
}

PhaseState Trajectory::at(double t) const {
  const auto y = locate(pieces_, t)(t);
  return {t, y[0], y[1]};
}

double Trajectory::t_begin() const { return lowest(pieces_); }
double Trajectory::t_end() const { return highest(pieces_); }

std::vector<PhaseState> Trajectory::samples() const {
  std::vector<PhaseState> out;
  for (double t : step_times(pieces_)) out.push_back(at(t));
  return out;
}

AngleActionTrajectory::AngleActionTrajectory(std::vector<ode::DenseSolution<2>> pieces, double tol,
                                             std::string kind)
    : pieces_(std::move(pieces)), tol_(tol), kind_(std::move(kind)) {
  if (pieces_.empty()) throw ParameterError("trajectory: no pieces");
}

AngleActionState AngleActionTrajectory::at(double t) const {
  const auto y = locate(pieces_, t)(t);
  return {t, y[0], std::exp(y[1])};
}

double AngleActionTrajectory::t_begin() const { return lowest(pieces_); }
double AngleActionTrajectory::t_end() const { return highest(pieces_); }

std::vector<AngleActionState> AngleActionTrajectory::samples() const {
  std::vector<AngleActionState> out;
  for (double t : step_times(pieces_)) out.push_back(at(t));
  return out;
}

Trajectory integrate_qp(const FrequencyProfile& profile, double q0, double p0, double t0, double t1, double tol) {
  check_tol(tol);
  const auto pts = segment_points(profile, t0, t1);
  std::vector<ode::DenseSolution<2>> pieces;
  ode::State<2> y{q0, p0};
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double a = pts[k];
    const double b = pts[k + 1];
    auto rhs = [&](double t, const ode::State<2>& s) {
      const double w = piece_omega(profile, t, a, b).first;
      return ode::State<2>{s[1], -w * w * s[0]};
    };
    pieces.push_back(ode::integrate<2>(rhs, a, y, b, oracle_options(tol)));
    y = pieces.back().y_end();
  }
  if (pieces.empty()) pieces.emplace_back(t0, y);
  return Trajectory(std::move(pieces), tol, profile.kind());
}

AngleActionTrajectory integrate_angle_action(const FrequencyProfile& profile, double psi0, double I0, double t0,
                                             double t1, double tol) {
  check_tol(tol);
  if (!(I0 > 0.0)) throw ParameterError("integrate_angle_action: I0 must be positive");
  const auto pts = segment_points(profile, t0, t1);
  std::vector<ode::DenseSolution<2>> pieces;
  ode::State<2> y{psi0, std::log(I0)};
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double a = pts[k];
    const double b = pts[k + 1];
    const bool fwd = b > a;
    if (k > 0) {
      const double from = fwd ? profile.omega_left(a) : profile.omega_right(a);
      const double to = fwd ? profile.omega_right(a) : profile.omega_left(a);
      const MatchResult mr = match_discontinuity(y[0], std::exp(y[1]), from, to);
      y = {mr.psi, std::log(mr.I)};
    }
    auto rhs = [&](double t, const ode::State<2>& s) {
      const auto [w, wd] = piece_omega(profile, t, a, b);
      const double r = wd / w;
      return ode::State<2>{w + 0.5 * r * std::sin(2.0 * s[0]), -r * std::cos(2.0 * s[0])};
    };
    pieces.push_back(ode::integrate<2>(rhs, a, y, b, oracle_options(tol)));
    y = pieces.back().y_end();
  }
  if (pieces.empty()) pieces.emplace_back(t0, y);
  return AngleActionTrajectory(std::move(pieces), tol, profile.kind());
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const AngleActionTrajectory* aa) {
  std::vector<std::string> cols{"t", "q", "p"};
  if (aa) {
    cols.push_back("psi");
    cols.push_back("I");
  }
  CsvWriter csv(out, "trajectory", cols);
  for (const PhaseState& s : traj.samples()) {
    std::vector<double> row{s.t, s.q, s.p};
    if (aa) {
      const AngleActionState a = aa->at(s.t);
      row.push_back(a.psi);
      row.push_back(a.I);
    }
    csv.row(row);
  }
}

}  // namespace tdho
