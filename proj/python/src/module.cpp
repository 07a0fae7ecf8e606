#include <algorithm>

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tdho/adiabatic.hpp"
#include "tdho/angle_action.hpp"
#include "tdho/errors.hpp"
#include "tdho/floquet.hpp"
#include "tdho/frequency.hpp"
#include "tdho/linear_systems.hpp"
#include "tdho/oracle.hpp"
#include "tdho/riccati.hpp"

namespace py = pybind11;
using namespace tdho;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t k) { return rows.at(k); }

FrequencyProfile custom_profile(py::function omega, py::function omega_dot, std::vector<double> jumps,
                                std::optional<double> period) {
  ProfileOptions o;
  o.discontinuities = std::move(jumps);
  o.period = period;
  // the GIL is held for every call back into Python
  return {[omega](double t) { return omega(t).cast<double>(); },
          [omega_dot](double t) { return omega_dot(t).cast<double>(); }, o};
}

py::dict solve(const FrequencyProfile& p, double q0, double p0, double t0, double t1, double tol, int n) {
  const auto traj = integrate_qp(p, q0, p0, t0, t1, tol);
  std::vector<double> t(n + 1), q(n + 1), pp(n + 1), psi(n + 1), I(n + 1);
  double unwrap = 0.0, prev = 0.0;
  for (int i = 0; i <= n; ++i) {
    t[i] = t0 + (t1 - t0) * i / n;
    const auto s = traj.at(t[i]);
    const auto a = to_angle_action(s, p.omega(t[i]));
    if (i > 0) unwrap += std::remainder(a.psi - prev, 2 * M_PI);
    psi[i] = i == 0 ? a.psi : psi[0] + unwrap;
    prev = a.psi;
    q[i] = s.q;
    pp[i] = s.p;
    I[i] = a.I;
  }
  py::dict d;
  d["t"] = to_array(t);
  d["q"] = to_array(q);
  d["p"] = to_array(pp);
  d["psi"] = to_array(psi);
  d["I"] = to_array(I);
  return d;
}

py::dict picard(const FrequencyProfile& p, double psi_star, double I_star, double t_star, double t_end, int order,
                double points_per_radian) {
  const auto grid = make_grid(p, t_star, t_end, t_star, points_per_radian);
  const auto s = picard_I(p, picard_psi(p, psi_star, t_star, grid, order), I_star);
  py::dict d;
  d["t"] = to_array(s.grid);
  d["phi"] = to_array(s.phi);
  d["g"] = to_array(s.g);
  py::list psi, I, psi_bound, log_I_bound;
  for (int k = 0; k <= s.order; ++k) {
    psi.append(to_array(column(s.psi, k)));
    I.append(to_array(column(s.I, k)));
    psi_bound.append(to_array(column(s.psi_bound, k)));
    log_I_bound.append(to_array(column(s.log_I_bound, k)));
  }
  d["psi"] = psi;
  d["I"] = I;
  d["psi_bound"] = psi_bound;
  d["log_I_bound"] = log_I_bound;
  return d;
}

py::dict zeros(const FrequencyProfile& p, double q0, double p0, double t0, double t_max) {
  const auto z = find_zero_sequence(p, q0, p0, t0, t_max);
  std::vector<double> t, bracket;
  std::vector<int> parity;
  for (const auto& s : z.points) {
    t.push_back(s.t);
    bracket.push_back(s.bracket);
    parity.push_back(s.parity == Parity::q_zero ? 0 : 1);
  }
  py::list gaps;
  for (const auto& g : z.gaps) {
    py::dict e;
    e["gap"] = g.gap;
    e["bound_low"] = g.bound_low;
    e["bound_high"] = g.bound_high;
    e["rough_ok"] = g.rough_ok;
    e["monotone"] = g.monotone;
    e["refined_ok"] = g.refined_ok.has_value() ? py::cast(*g.refined_ok) : py::none();
    gaps.append(e);
  }
  py::dict d;
  d["t"] = to_array(t);
  d["parity"] = parity;
  d["bracket"] = to_array(bracket);
  d["gaps"] = gaps;
  d["alternating"] = z.parities_alternate();
  d["certified"] = z.all_certified();
  return d;
}

py::dict stability(double alpha, std::pair<double, double> eta, std::pair<double, double> omega_bar, int n) {
  const auto m = stability_map(alpha, eta, omega_bar, n);
  py::array_t<double> mu({m.n_eta, m.n_omega});
  py::array_t<int> cls({m.n_eta, m.n_omega});
  auto mu_v = mu.mutable_unchecked<2>();
  auto cls_v = cls.mutable_unchecked<2>();
  std::vector<double> w(m.n_omega), e(m.n_eta);
  for (int i = 0; i < m.n_eta; ++i)
    for (int j = 0; j < m.n_omega; ++j) {
      const auto& c = m.cells[i * m.n_omega + j];
      mu_v(i, j) = c.mu;
      cls_v(i, j) = static_cast<int>(c.classification);
      w[j] = c.omega_bar;
      e[i] = c.eta;
    }
  py::dict d;
  d["omega_bar"] = to_array(w);
  d["eta"] = to_array(e);
  d["mu"] = mu;
  d["classification"] = cls;  // 0 stable, 1 marginal, 2 unstable
  d["resonances"] = to_array(m.resonances);
  return d;
}

}  // namespace

PYBIND11_MODULE(_tdho, m) {
  m.doc() = "Time-dependent harmonic oscillator core";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  py::class_<PhaseState>(m, "PhaseState")
      .def(py::init<double, double, double>(), py::arg("t") = 0.0, py::arg("q") = 0.0, py::arg("p") = 0.0)
      .def_readwrite("t", &PhaseState::t)
      .def_readwrite("q", &PhaseState::q)
      .def_readwrite("p", &PhaseState::p)
      .def("__repr__", [](const PhaseState& s) {
        return "PhaseState(t=" + std::to_string(s.t) + ", q=" + std::to_string(s.q) + ", p=" + std::to_string(s.p) + ")";
      });

  py::class_<AngleActionState>(m, "AngleActionState")
      .def(py::init<double, double, double>(), py::arg("t") = 0.0, py::arg("psi") = 0.0, py::arg("I") = 0.0)
      .def_readwrite("t", &AngleActionState::t)
      .def_readwrite("psi", &AngleActionState::psi)
      .def_readwrite("I", &AngleActionState::I)
      .def("__repr__", [](const AngleActionState& s) {
        return "AngleActionState(t=" + std::to_string(s.t) + ", psi=" + std::to_string(s.psi) +
               ", I=" + std::to_string(s.I) + ")";
      });

  py::class_<FrequencyProfile>(m, "Profile")
      .def(py::init(&builtin_profile), py::arg("name"), py::arg("params") = std::map<std::string, double>{},
           "Built-in law: constant, mathieu, step, ...")
      .def_static("custom", &custom_profile, py::arg("omega"), py::arg("omega_dot"),
                  py::arg("discontinuities") = std::vector<double>{}, py::arg("period") = std::nullopt)
      .def("omega", py::vectorize(&FrequencyProfile::omega))
      .def("omega_dot", py::vectorize(&FrequencyProfile::omega_dot))
      .def_property_readonly("kind", &FrequencyProfile::kind)
      .def_property_readonly("params", &FrequencyProfile::params)
      .def_property_readonly("period", &FrequencyProfile::period)
      .def_property_readonly("discontinuities", &FrequencyProfile::discontinuities);

  py::class_<SlowTimeFamily>(m, "Family")
      .def(py::init(&builtin_family), py::arg("name"), py::arg("params") = std::map<std::string, double>{})
      .def("with_epsilon", &SlowTimeFamily::with_epsilon)
      .def("profile", &SlowTimeFamily::profile)
      .def_readonly("epsilon", &SlowTimeFamily::epsilon)
      .def_readonly("kind", &SlowTimeFamily::kind)
      .def_readonly("smoothness", &SlowTimeFamily::smoothness);

  m.def("to_angle_action", &to_angle_action, py::arg("state"), py::arg("omega"));
  m.def("to_phase", &to_phase, py::arg("state"), py::arg("omega"));
  m.def(
      "match_discontinuity",
      [](double psi, double I, double w_minus, double w_plus) {
        const auto r = match_discontinuity(psi, I, w_minus, w_plus);
        return py::make_tuple(r.psi, r.I);
      },
      py::arg("psi"), py::arg("I"), py::arg("omega_minus"), py::arg("omega_plus"));
  m.def("total_variation", &total_variation_g, py::arg("profile"), py::arg("t_star"), py::arg("t"),
        "Total variation of log omega between t_star and t.");

  m.def("solve", &solve, py::arg("profile"), py::arg("q0"), py::arg("p0"), py::arg("t0"), py::arg("t1"),
        py::arg("tol") = 1e-12, py::arg("samples") = 1000, "Reference solution on a uniform grid.");
  m.def(
      "angle_action_trajectory",
      [](const FrequencyProfile& p, double psi0, double I0, const std::vector<double>& t, double tol) {
        if (t.size() < 2) throw ParameterError("need at least two times");
        const auto a = integrate_angle_action(p, psi0, I0, t.front(), t.back(), tol);
        std::vector<double> psi, I;
        for (double x : t) {
          const auto s = a.at(x);
          psi.push_back(s.psi);
          I.push_back(s.I);
        }
        py::dict d;
        d["psi"] = to_array(psi);
        d["I"] = to_array(I);
        return d;
      },
      py::arg("profile"), py::arg("psi0"), py::arg("I0"), py::arg("t"), py::arg("tol") = 1e-12,
      "Oracle angle-action solution started at t[0], evaluated at each t.");
  m.def("picard", &picard, py::arg("profile"), py::arg("psi_star"), py::arg("I_star"), py::arg("t_star"),
        py::arg("t_end"), py::arg("order") = 1, py::arg("points_per_radian") = 64.0);
  m.def(
      "approx_hat",
      [](const FrequencyProfile& p, double psi_star, double I_star, double t_star, const std::vector<double>& t) {
        return to_array(approx_hat(p, psi_star, I_star, t_star, t));
      },
      py::arg("profile"), py::arg("psi_star"), py::arg("I_star"), py::arg("t_star"), py::arg("t"));
  m.def(
      "approx_tilde",
      [](const FrequencyProfile& p, double psi_star, double I_star, double t_star, const std::vector<double>& t) {
        std::vector<double> q;
        for (double x : t) q.push_back(approx_tilde(p, psi_star, I_star, t_star, x).q);
        return to_array(q);
      },
      py::arg("profile"), py::arg("psi_star"), py::arg("I_star"), py::arg("t_star"), py::arg("t"));

  m.def("zeros", &zeros, py::arg("profile"), py::arg("q0"), py::arg("p0"), py::arg("t0"), py::arg("t_max"));

  m.def(
      "monodromy",
      [](const FrequencyProfile& p, double tol) {
        const auto r = monodromy(p, tol);
        py::dict d;
        d["T"] = r.T;
        d["mu"] = r.mu;
        d["classification"] = to_string(r.classification);
        d["det_defect"] = r.det_defect;
        return d;
      },
      py::arg("profile"), py::arg("tol") = 1e-12);
  m.def(
      "trace_check",
      [](const FrequencyProfile& p, double tol) {
        const auto mono = monodromy(p, tol);
        const auto tr = trace_via_angle_action(p, tol);
        py::dict d;
        d["mu_monodromy"] = mono.mu;
        d["mu_trace"] = tr.mu;
        d["mu_leading"] = mu_leading_order(p).mu0;
        d["det_defect"] = mono.det_defect;
        return d;
      },
      py::arg("profile"), py::arg("tol") = 1e-12);
  m.def("stability_map", &stability, py::arg("alpha"), py::arg("eta_range"), py::arg("omega_bar_range"),
        py::arg("grid") = 64);
  m.def(
      "measure_tongue",
      [](double alpha, double eta) {
        const auto w = measure_tongue(alpha, eta);
        return py::dict(py::arg("lower") = w.lower, py::arg("upper") = w.upper, py::arg("half_width") = w.half_width,
                        py::arg("predicted") = w.predicted);
      },
      py::arg("alpha"), py::arg("eta"));
  m.def(
      "resonant_growth",
      [](double eta, double omega_bar, double psi_star, double t_max) {
        const auto g = resonant_growth(eta, omega_bar, psi_star, t_max);
        return py::dict(py::arg("rate") = g.rate, py::arg("predicted") = g.predicted,
                        py::arg("max_residual") = g.max_residual);
      },
      py::arg("eta"), py::arg("omega_bar"), py::arg("psi_star"), py::arg("t_max"));
  m.def(
      "beat_analysis",
      [](double eta, double alpha, double omega_bar, double psi_star, double t_max) {
        const auto b = beat_analysis(eta, alpha, omega_bar, psi_star, t_max);
        return py::dict(py::arg("predicted_amplitude") = b.predicted_amplitude,
                        py::arg("predicted_period") = b.predicted_period,
                        py::arg("measured_amplitude") = b.measured_amplitude,
                        py::arg("measured_period") = b.measured_period);
      },
      py::arg("eta"), py::arg("alpha"), py::arg("omega_bar"), py::arg("psi_star"), py::arg("t_max"));

  m.def(
      "scaling_experiment",
      [](const SlowTimeFamily& f, std::optional<int> k, std::vector<double> eps) {
        const auto r = scaling_experiment(f, k.value_or(f.smoothness), std::move(eps));
        return py::dict(py::arg("epsilons") = to_array(r.epsilons), py::arg("deltas") = to_array(r.deltas),
                        py::arg("slope") = r.fitted_slope);
      },
      py::arg("family"), py::arg("k") = std::nullopt,
      py::arg("epsilons") = std::vector<double>{0.2, 0.1, 0.05, 0.025});

  m.def(
      "ermakov_check",
      [](const FrequencyProfile& p, double t_min, double t_max, int samples, double tol) {
        std::vector<double> grid(samples);
        for (int i = 0; i < samples; ++i) grid[i] = t_min + (t_max - t_min) * i / (samples - 1);
        const auto f = fundamental_matrix(p, grid, tol);
        const auto e = ermakov_check(f);
        return py::dict(py::arg("wronskian_drift") = f.wronskian_drift(),
                        py::arg("invariant_drift") = e.invariant_drift,
                        py::arg("ermakov_residual") = e.ermakov_residual);
      },
      py::arg("profile"), py::arg("t_min") = 0.0, py::arg("t_max") = 30.0, py::arg("samples") = 601,
      py::arg("tol") = 1e-12);
}
