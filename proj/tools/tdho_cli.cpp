#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tdho/adiabatic.hpp"
#include "tdho/angle_action.hpp"
#include "tdho/config.hpp"
#include "tdho/csv.hpp"
#include "tdho/errors.hpp"
#include "tdho/floquet.hpp"
#include "tdho/linear_systems.hpp"
#include "tdho/oracle.hpp"
#include "tdho/riccati.hpp"

namespace {

using namespace tdho;

constexpr int kExitCertificate = 1;
constexpr int kExitConfig = 2;

struct CommonArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string out = "-";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config, "key = value run configuration file");
  cmd->add_option("--set", args.overrides, "override a configuration key (key=value), repeatable");
  cmd->add_option("-o,--out", args.out, "output path, '-' for stdout")->capture_default_str();
}

RunConfig load(const CommonArgs& args) {
  RunConfig cfg = args.config.empty() ? RunConfig{} : RunConfig::from_file(args.config);
  for (const auto& s : args.overrides) cfg.set(s);
  return cfg;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw ParameterError("cannot open output '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct Certificates {
  int failed = 0;
  void check(bool ok, const std::string& what) {
    if (ok) return;
    ++failed;
    std::cerr << "tdho: certificate failed: " << what << "\n";
  }
  [[nodiscard]] int exit_code() const { return failed == 0 ? 0 : kExitCertificate; }
};

const std::set<std::string> kProfileKeys{"profile", "profile."};

std::set<std::string> with_profile(std::set<std::string> keys) {
  keys.insert(kProfileKeys.begin(), kProfileKeys.end());
  return keys;
}

// Picard angle-action data for one initial condition, checked against the oracle.
struct SolvedRun {
  std::vector<double> grid;
  std::vector<PhaseState> qp;
  std::vector<AngleActionState> aa;
  PicardSeries series;
  double psi_star = 0.0, I_star = 0.0;
};

SolvedRun solve_one(const FrequencyProfile& profile, double q0, double p0, double t0, double t1, int order,
                    double ppr, double tol, Certificates& cert, const std::string& label) {
  SolvedRun run;
  const AngleActionState star = to_angle_action({t0, q0, p0}, profile.omega(t0));
  run.psi_star = star.psi;
  run.I_star = star.I;
  run.grid = make_grid(profile, t0, t1, t0, ppr);
  run.series = picard_I(profile, picard_psi(profile, star.psi, t0, run.grid, order), star.I);
  const Trajectory qp = integrate_qp(profile, q0, p0, t0, t1, tol);
  const AngleActionTrajectory aa = integrate_angle_action(profile, star.psi, star.I, t0, t1, tol);
  // collocation error floor of the Picard iterates on top of the oracle tolerance
  const double slack = 1e-8;
  double worst_psi = 0.0, worst_I = 0.0;
  for (std::size_t i = 0; i < run.grid.size(); ++i) {
    run.qp.push_back(qp.at(run.grid[i]));
    run.aa.push_back(aa.at(run.grid[i]));
    const double dpsi = std::abs(run.aa[i].psi - run.series.psi[order][i]) - run.series.psi_bound[order][i];
    const double dI = std::abs(std::log(run.aa[i].I / run.series.I[order][i])) - run.series.log_I_bound[order][i];
    worst_psi = std::max(worst_psi, dpsi);
    worst_I = std::max(worst_I, dI);
  }
  cert.check(worst_psi <= slack, label + " angle outside the order-" + std::to_string(order) + " bound");
  cert.check(worst_I <= slack, label + " action outside the order-" + std::to_string(order) + " bound");
  return run;
}

int cmd_solve(const CommonArgs& args, bool fundamental) {
  RunConfig cfg = load(args);
  cfg.validate(with_profile({"q0", "p0", "t0", "t_max", "order", "tol", "points_per_radian"}));
  const FrequencyProfile profile = profile_from_config(cfg);
  const double t0 = cfg.get_double("t0", 0.0);
  const double t1 = cfg.get_double("t_max", 30.0);
  const int order = static_cast<int>(cfg.get_int("order", 1));
  const double tol = cfg.get_double("tol", 1e-12);
  const double ppr = cfg.get_double("points_per_radian", 32.0);
  if (!(t1 > t0)) throw ParameterError("t_max must exceed t0");
  if (order < 1) throw ParameterError("order must be >= 1");

  Certificates cert;
  Output out(args.out);
  if (!fundamental) {
    const SolvedRun run =
        solve_one(profile, cfg.get_double("q0", 1.0), cfg.get_double("p0", 0.0), t0, t1, order, ppr, tol, cert, "solution");
    CsvWriter csv(out.stream(), "solve",
                  {"t", "omega", "q", "p", "psi", "I", "q_zeroth", "q_tilde", "q_hat", "I_first", "psi_order",
                   "I_order", "psi_bound", "log_I_bound"});
    const auto q_hat = approx_hat(profile, run.psi_star, run.I_star, t0, run.grid);
    for (std::size_t i = 0; i < run.grid.size(); ++i) {
      const double t = run.grid[i];
      csv.row({t, profile.omega(t), run.qp[i].q, run.qp[i].p, run.aa[i].psi, run.aa[i].I,
               approx_zeroth(profile, run.psi_star, run.I_star, t0, t).q,
               approx_tilde(profile, run.psi_star, run.I_star, t0, t).q, q_hat[i], run.series.I[1][i],
               run.series.psi[order][i], run.series.I[order][i], run.series.psi_bound[order][i],
               run.series.log_I_bound[order][i]});
    }
    return cert.exit_code();
  }

  // q1 from (1, 0) and q2 from (0, 1) at t0
  const SolvedRun a = solve_one(profile, 1.0, 0.0, t0, t1, order, ppr, tol, cert, "q1");
  const SolvedRun b = solve_one(profile, 0.0, 1.0, t0, t1, order, ppr, tol, cert, "q2");
  const auto hat_a = approx_hat(profile, a.psi_star, a.I_star, t0, a.grid);
  const auto hat_b = approx_hat(profile, b.psi_star, b.I_star, t0, b.grid);
  CsvWriter csv(out.stream(), "solve.fundamental",
                {"t", "omega", "q1", "q1_zeroth", "q1_tilde", "q1_hat", "I1", "I1_tilde", "I1_first", "q2",
                 "q2_zeroth", "q2_tilde", "q2_hat", "I2", "I2_tilde", "I2_first"});
  auto tilde_action = [&](const PhaseState& s) {
    const double w = profile.omega(s.t);
    return (s.p * s.p + w * w * s.q * s.q) / (2.0 * w);
  };
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    const double t = a.grid[i];
    const PhaseState ta = approx_tilde(profile, a.psi_star, a.I_star, t0, t);
    const PhaseState tb = approx_tilde(profile, b.psi_star, b.I_star, t0, t);
    csv.row({t, profile.omega(t), a.qp[i].q, approx_zeroth(profile, a.psi_star, a.I_star, t0, t).q, ta.q, hat_a[i],
             a.aa[i].I, tilde_action(ta), a.series.I[1][i], b.qp[i].q,
             approx_zeroth(profile, b.psi_star, b.I_star, t0, t).q, tb.q, hat_b[i], b.aa[i].I, tilde_action(tb),
             b.series.I[1][i]});
  }
  return cert.exit_code();
}

int cmd_zeros(const CommonArgs& args) {
  RunConfig cfg = load(args);
  cfg.validate(with_profile({"q0", "p0", "t0", "t_max", "tol"}));
  const FrequencyProfile profile = profile_from_config(cfg);
  const ZeroSequence zs = find_zero_sequence(profile, cfg.get_double("q0", 1.0), cfg.get_double("p0", 0.0),
                                             cfg.get_double("t0", 0.0), cfg.get_double("t_max", 30.0),
                                             cfg.get_double("tol", 1e-12));
  Output out(args.out);
  write_zero_sequence_csv(out.stream(), zs);
  Certificates cert;
  cert.check(zs.parities_alternate(), "zero parities do not alternate");
  cert.check(zs.strictly_increasing(), "zeros are not strictly increasing");
  for (const auto& g : zs.gaps) {
    const std::string at = " on gap h=" + std::to_string(g.h);
    cert.check(g.rough_ok, "gap bound" + at);
    cert.check(g.refined_ok.value_or(true), "refined gap bound" + at);
    cert.check(g.predicted_ok, "predicted gap" + at);
    cert.check(g.quadrant_ok, "quadrant" + at);
  }
  return cert.exit_code();
}

int cmd_floquet_map(const CommonArgs& args, int grid_flag, const std::string& boundary, const std::string& markers,
                    bool progress) {
  RunConfig cfg = load(args);
  cfg.validate({"alpha", "eta_min", "eta_max", "omega_bar_min", "omega_bar_max", "grid", "j_max"});
  const double alpha = cfg.get_double("alpha", 2.0);
  const long n = grid_flag > 0 ? grid_flag : cfg.get_int("grid", 64);
  const std::pair<double, double> eta{cfg.get_double("eta_min", 0.0), cfg.get_double("eta_max", 0.4)};
  const std::pair<double, double> wb{cfg.get_double("omega_bar_min", 0.25 * alpha),
                                     cfg.get_double("omega_bar_max", 0.75 * alpha)};
  ProgressFn report;
  if (progress)
    report = [](int done, int total) {
      if (done == total || done % 256 == 0) std::cerr << "floquet-map: " << done << "/" << total << "\n";
    };
  const StabilityMap map = stability_map(alpha, eta, wb, static_cast<int>(n), report);
  Output out(args.out);
  write_stability_csv(out.stream(), map);
  if (!boundary.empty()) {
    Output b(boundary);
    write_boundary_csv(b.stream(), map);
  }
  if (!markers.empty()) {
    Output m(markers);
    CsvWriter csv(m.stream(), "resonances", {"j", "omega_bar"});
    const double T = 2.0 * M_PI / alpha;
    for (double w : map.resonances) csv.row({std::round(w * T / M_PI), w});
  }
  Certificates cert;
  double worst = 0.0;
  for (const auto& c : map.cells) worst = std::max(worst, c.det_defect);
  cert.check(worst < 1e-9, "det M deviates from 1 by " + format_double(worst));
  for (const auto& c : map.cells)
    if (c.eta == 0.0) cert.check(c.classification != Stability::unstable, "eta = 0 cell classified unstable");
  return cert.exit_code();
}

int cmd_adiabatic(const CommonArgs& args) {
  RunConfig cfg = load(args);
  cfg.validate({"family", "family.", "mode", "epsilons", "format", "k", "T", "q0", "p0"});
  const SlowTimeFamily family = family_from_config(cfg);
  const std::string mode = cfg.get_string("mode", "scaling");
  const std::vector<double> eps = cfg.get_list("epsilons", {0.2, 0.1, 0.05, 0.025});
  Output out(args.out);
  Certificates cert;
  if (mode == "scaling") {
    const std::string format = cfg.get_string("format", "csv");
    if (format != "csv" && format != "json") throw ParameterError("format must be csv or json");
    const int k = static_cast<int>(cfg.get_int("k", family.smoothness));
    const ScalingReport rep = scaling_experiment(family, k, eps);
    if (format == "json")
      write_scaling_json(out.stream(), rep);
    else
      write_scaling_csv(out.stream(), rep);
    bool zero = true, positive = true;
    for (double d : rep.deltas) {
      zero = zero && d == 0.0;
      positive = positive && d > 0.0 && std::isfinite(d);
    }
    if (!zero) {
      cert.check(positive, "net action change is not positive and finite for every epsilon");
      cert.check(std::isfinite(rep.fitted_slope), "log-log slope is not finite");
    }
    return cert.exit_code();
  }
  if (mode != "window") throw ParameterError("mode must be scaling or window");
  const double T = cfg.get_double("T", 1.0);
  const double q0 = cfg.get_double("q0", 1.0), p0 = cfg.get_double("p0", 0.0);
  CsvWriter csv(out.stream(), "adiabatic.window",
                {"epsilon", "T", "I0", "max_deviation", "c0", "c1", "omega_u", "M", "bound", "bound_applicable"});
  for (double e : eps) {
    const WindowReport r = adiabatic_window(family.with_epsilon(e), T, q0, p0);
    csv.row({r.epsilon, r.T, r.I0, r.max_deviation, r.c0, r.c1, r.omega_u, r.M, r.bound,
             r.bound_applicable ? 1.0 : 0.0});
    if (r.bound_applicable)
      cert.check(r.max_deviation <= r.bound, "action deviation exceeds the bound at epsilon " + format_double(e));
  }
  return cert.exit_code();
}

int cmd_trace_check(const CommonArgs& args) {
  RunConfig cfg = load(args);
  cfg.validate({"alpha", "omega_bar", "eta", "tol"});
  const double alpha = cfg.get_double("alpha", 2.0);
  const auto wbs = cfg.get_list("omega_bar", {0.8, 0.9, 1.0, 1.1, 1.2});
  const auto etas = cfg.get_list("eta", {0.0, 0.075, 0.15, 0.225, 0.3});
  const double tol = cfg.get_double("tol", 1e-12);
  Output out(args.out);
  CsvWriter csv(out.stream(), "trace_check",
                {"omega_bar", "eta", "mu_monodromy", "mu_trace", "mu_leading", "abs_diff", "det_defect",
                 "identity_defect"});
  Certificates cert;
  for (double eta : etas)
    for (double wb : wbs) {
      const FrequencyProfile p = builtin_profile("mathieu", {{"omega_bar", wb}, {"eta", eta}, {"alpha", alpha}});
      const MonodromyReport m = monodromy(p, tol);
      const TraceReport tr = trace_via_angle_action(p, tol);
      const LeadingOrderTrace lo = mu_leading_order(p);
      const double diff = std::abs(tr.mu - m.mu);
      csv.row({wb, eta, m.mu, tr.mu, lo.mu0, diff, m.det_defect, tr.identity_defect});
      const std::string at = " at omega_bar=" + format_double(wb) + " eta=" + format_double(eta);
      cert.check(diff < 1e-7, "trace formula disagrees with monodromy" + at);
      cert.check(m.det_defect < 1e-9, "det M deviates from 1" + at);
    }
  return cert.exit_code();
}

int cmd_ermakov_check(const CommonArgs& args, const std::string& series) {
  RunConfig cfg = load(args);
  cfg.validate(with_profile({"t_min", "t_max", "L", "samples", "tol"}));
  const FrequencyProfile profile = profile_from_config(cfg);
  const double a = cfg.get_double("t_min", 0.0), b = cfg.get_double("t_max", 30.0);
  if (!(b > a)) throw ParameterError("t_max must exceed t_min");
  ErmakovOptions opts;
  opts.L = cfg.get_double("L", 1.0);
  opts.samples = static_cast<int>(cfg.get_int("samples", 601));
  const FundamentalMatrix fund = fundamental_matrix(profile, make_grid(profile, a, b, std::clamp(0.0, a, b), 16.0),
                                                    cfg.get_double("tol", 1e-12));
  const ErmakovReport rep = ermakov_check(fund, opts);
  Output out(args.out);
  CsvWriter csv(out.stream(), "ermakov_check",
                {"L", "rho_min", "rho_max", "ermakov_residual", "invariant_drift", "fundamental_defect",
                 "general_solution_residual", "wronskian_drift"});
  csv.row({rep.L, rep.rho_min, rep.rho_max, rep.ermakov_residual, rep.invariant_drift, rep.fundamental_defect,
           rep.general_solution_residual, fund.wronskian_drift()});
  if (!series.empty()) {
    Output s(series);
    write_fundamental_csv(s.stream(), fund);
  }
  Certificates cert;
  cert.check(fund.wronskian_drift() < 1e-9, "Wronskian drift " + format_double(fund.wronskian_drift()));
  cert.check(rep.invariant_drift < 1e-8, "Ermakov invariant drift " + format_double(rep.invariant_drift));
  return cert.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-dependent harmonic oscillator experiments"};
  app.require_subcommand(1);

  CommonArgs solve_args, zeros_args, map_args, adiabatic_args, trace_args, ermakov_args;
  bool fundamental = false, progress = false;
  int grid = 0;
  std::string boundary, markers, series;

  auto* solve = app.add_subcommand("solve", "oracle and angle-action solution with approximants and Picard bounds");
  add_common(solve, solve_args);
  solve->add_flag("--fundamental", fundamental, "emit q1 and q2 with their approximants");

  auto* zeros = app.add_subcommand("zeros", "interlaced zeros of q and q' with gap certificates");
  add_common(zeros, zeros_args);

  auto* fmap = app.add_subcommand("floquet-map", "Mathieu stability map over (omega_bar, eta)");
  add_common(fmap, map_args);
  fmap->add_option("--grid", grid, "points per axis (overrides the 'grid' key)");
  fmap->add_option("--boundary", boundary, "write the analytic tongue boundary CSV here");
  fmap->add_option("--markers", markers, "write the resonance markers CSV here");
  fmap->add_flag("--progress", progress, "report progress on stderr");

  auto* adiabatic = app.add_subcommand("adiabatic", "action change under slow frequency variation");
  add_common(adiabatic, adiabatic_args);

  auto* trace = app.add_subcommand("trace-check", "trace formula against the monodromy matrix");
  add_common(trace, trace_args);

  auto* ermakov = app.add_subcommand("ermakov-check", "Wronskian and Ermakov invariant checks");
  add_common(ermakov, ermakov_args);
  ermakov->add_option("--series", series, "write the fundamental matrix time series CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*solve) return cmd_solve(solve_args, fundamental);
    if (*zeros) return cmd_zeros(zeros_args);
    if (*fmap) return cmd_floquet_map(map_args, grid, boundary, markers, progress);
    if (*adiabatic) return cmd_adiabatic(adiabatic_args);
    if (*trace) return cmd_trace_check(trace_args);
    if (*ermakov) return cmd_ermakov_check(ermakov_args, series);
  } catch (const ParameterError& e) {
    std::cerr << "tdho: error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "tdho: error: " << e.what() << "\n";
    return kExitCertificate;
  }
  return kExitConfig;
}
