#include "tdho/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "tdho/errors.hpp"
#include "tdho/quadrature.hpp"

namespace tdho {

namespace {

double get(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void check_keys(const std::string& name, const std::map<std::string, double>& p,
                const std::vector<std::string>& allowed) {
  for (const auto& [k, v] : p) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || k == a;
    if (!ok) throw ParameterError(name + ": unknown parameter '" + k + "'");
  }
}

const std::map<std::string, std::vector<std::string>>& known_keys() {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"constant", {"omega", "epsilon"}},
      {"mathieu", {"omega_bar", "eta", "alpha"}},
      {"step", {"omega_minus", "omega_plus", "t_d"}},
      {"tanh_ramp", {"a", "b", "epsilon"}},
      {"bump_ramp", {"lo", "hi", "width", "epsilon"}},
      {"spline_ramp", {"lo", "hi", "width", "k", "epsilon"}}};
  return keys;
}

void check_known(const std::string& name, const std::map<std::string, double>& p) {
  const auto it = known_keys().find(name);
  if (it != known_keys().end()) check_keys(name, p, it->second);
}

double one_sided_offset(double t) { return 1e-13 * std::max(1.0, std::abs(t)); }

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

FrequencyProfile::FrequencyProfile(Fn value, Fn derivative, Options opts)
    : value_(std::move(value)), derivative_(std::move(derivative)), opts_(std::move(opts)) {
  if (!value_ || !derivative_) throw ParameterError("FrequencyProfile: value and derivative required");
  std::sort(opts_.discontinuities.begin(), opts_.discontinuities.end());
  if (opts_.period && !(*opts_.period > 0.0)) throw ParameterError("FrequencyProfile: period must be positive");
}

double FrequencyProfile::omega_left(double t) const {
  return is_discontinuity(t) ? value_(t - one_sided_offset(t)) : value_(t);
}

double FrequencyProfile::omega_right(double t) const {
  return is_discontinuity(t) ? value_(t + one_sided_offset(t)) : value_(t);
}

std::vector<double> FrequencyProfile::discontinuities_in(double a, double b) const {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  std::vector<double> out;
  for (double td : opts_.discontinuities)
    if (td > lo && td < hi) out.push_back(td);
  return out;
}

bool FrequencyProfile::is_discontinuity(double t) const {
  return std::binary_search(opts_.discontinuities.begin(), opts_.discontinuities.end(), t);
}

double FrequencyProfile::param(const std::string& name) const {
  auto it = opts_.params.find(name);
  if (it == opts_.params.end()) throw ParameterError("profile has no parameter '" + name + "'");
  return it->second;
}

double eval_zeta(const FrequencyProfile& profile, double t) {
  if (profile.is_discontinuity(t)) throw DomainError("eval_zeta: t is a declared discontinuity");
  const double w = profile.omega(t);
  return profile.omega_dot(t) / (w * w);
}

double total_variation_g(const FrequencyProfile& profile, double t_star, double t) {
  if (!profile.discontinuities_in(t_star, t).empty())
    throw DomainError("total_variation_g: interval crosses a discontinuity");
  auto f = [&](double z) { return std::abs(profile.omega_dot(z) / profile.omega(z)); };
  const double lo = std::min(t_star, t), hi = std::max(t_star, t);
  // kinks of |omega_dot| go in as breakpoints; the rule itself stays adaptive
  const int n = static_cast<int>(std::clamp(64.0 * (hi - lo), 256.0, 1e5));
  std::vector<double> kinks;
  double za = lo, da = profile.omega_dot(lo);
  for (int i = 1; i <= n; ++i) {
    const double zb = lo + (hi - lo) * i / n, db = profile.omega_dot(zb);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      double a = za, b = zb;
      for (int k = 0; k < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++k) {
        const double m = 0.5 * (a + b);
        ((profile.omega_dot(m) > 0.0) == (da > 0.0) ? a : b) = m;
      }
      kinks.push_back(0.5 * (a + b));
    }
    za = zb;
    da = db;
  }
  return quadrature(f, lo, hi, 1e-10, kinks);
}

ProfileExtrema sample_extrema(const FrequencyProfile& profile, double a, double b, int samples) {
  ProfileExtrema e{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  samples = std::max(samples, 2);
  for (int i = 0; i < samples; ++i) {
    const double t = a + (b - a) * i / (samples - 1);
    if (profile.is_discontinuity(t)) {
      if (i > 0) e.omega_min = std::min(e.omega_min, profile.omega_left(t));
      if (i > 0) e.omega_max = std::max(e.omega_max, profile.omega_left(t));
      if (i < samples - 1) e.omega_min = std::min(e.omega_min, profile.omega_right(t));
      if (i < samples - 1) e.omega_max = std::max(e.omega_max, profile.omega_right(t));
      continue;
    }
    const double w = profile.omega(t);
    e.omega_min = std::min(e.omega_min, w);
    e.omega_max = std::max(e.omega_max, w);
    e.log_rate_max = std::max(e.log_rate_max, std::abs(profile.omega_dot(t) / w));
  }
  return e;
}

FrequencyProfile SlowTimeFamily::profile() const {
  const auto b = base;
  const auto db = base_derivative;
  const double eps = epsilon;
  FrequencyProfile::Options o;
  o.kind = kind;
  o.params = params;
  o.params["epsilon"] = eps;
  o.smoothness = smoothness;
  return FrequencyProfile([b, eps](double t) { return b(eps * t); },
                          [db, eps](double t) { return eps * db(eps * t); }, o);
}

SlowTimeFamily SlowTimeFamily::with_epsilon(double eps) const {
  if (!(eps > 0.0)) throw ParameterError("slow-time family: epsilon must be positive");
  SlowTimeFamily f = *this;
  f.epsilon = eps;
  return f;
}

double SlowTimeFamily::zeta_tilde(double tau) const {
  const double w = base(tau);
  return base_derivative(tau) / (w * w);
}

double smoothstep(int m, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double s = 0.0;
  for (int j = 0; j <= m; ++j)
    s += binomial(m + j, j) * binomial(2 * m + 1, m - j) * std::pow(-x, j);
  return s * std::pow(x, m + 1);
}

double smoothstep_derivative(int m, double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  // (2m+1)!/(m!)^2 = (2m+1) * C(2m, m)
  const double c = (2.0 * m + 1.0) * binomial(2 * m, m);
  return c * std::pow(x * (1.0 - x), m);
}

namespace {
double bump_f(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
}  // namespace

double bump_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = bump_f(x);
  const double b = bump_f(1.0 - x);
  return a / (a + b);
}

double bump_step_derivative(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double a = bump_f(x);
  const double b = bump_f(1.0 - x);
  const double da = a / (x * x);
  const double db = -b / ((1.0 - x) * (1.0 - x));
  const double d = a + b;
  return (da * b - a * db) / (d * d);
}

SlowTimeFamily builtin_family(const std::string& name, const std::map<std::string, double>& p) {
  check_known(name, p);
  SlowTimeFamily f;
  f.kind = name;
  f.epsilon = get(p, "epsilon", 1.0);
  if (!(f.epsilon > 0.0)) throw ParameterError("epsilon must be positive");
  if (name == "constant") {
    const double w = get(p, "omega", 1.0);
    if (!(w > 0.0)) throw ParameterError("constant: omega must be positive");
    f.params = {{"omega", w}};
    f.base = [w](double) { return w; };
    f.base_derivative = [](double) { return 0.0; };
    f.support_half_width = 0.0;
  } else if (name == "tanh_ramp") {
    const double a = get(p, "a", 1.5);
    const double b = get(p, "b", 0.5);
    if (!(a > std::abs(b))) throw ParameterError("tanh_ramp: requires a > |b|");
    f.params = {{"a", a}, {"b", b}};
    f.base = [a, b](double tau) { return a + b * std::tanh(tau); };
    f.base_derivative = [b](double tau) {
      const double c = std::cosh(tau);
      return std::isfinite(c) ? b / (c * c) : 0.0;
    };
  } else if (name == "bump_ramp" || name == "spline_ramp") {
    const double lo = get(p, "lo", 1.0);
    const double hi = get(p, "hi", 2.0);
    const double w = get(p, "width", 1.0);
    if (!(lo > 0.0 && hi > 0.0)) throw ParameterError(name + ": lo and hi must be positive");
    if (!(w > 0.0)) throw ParameterError(name + ": width must be positive");
    f.params = {{"lo", lo}, {"hi", hi}, {"width", w}};
    f.support_half_width = w;
    if (name == "bump_ramp") {
      f.base = [lo, hi, w](double tau) { return lo + (hi - lo) * bump_step((tau + w) / (2 * w)); };
      f.base_derivative = [lo, hi, w](double tau) {
        return (hi - lo) / (2 * w) * bump_step_derivative((tau + w) / (2 * w));
      };
    } else {
      const double kd = get(p, "k", 2.0);
      const int k = static_cast<int>(kd);
      if (k < 0 || k != kd || k > 20) throw ParameterError("spline_ramp: k must be an integer in [0,20]");
      f.params["k"] = k;
      f.smoothness = k;
      const int m = k + 1;
      f.base = [lo, hi, w, m](double tau) { return lo + (hi - lo) * smoothstep(m, (tau + w) / (2 * w)); };
      f.base_derivative = [lo, hi, w, m](double tau) {
        return (hi - lo) / (2 * w) * smoothstep_derivative(m, (tau + w) / (2 * w));
      };
    }
  } else {
    throw ParameterError("unknown slow-time family '" + name + "'");
  }
  return f;
}

FrequencyProfile builtin_profile(const std::string& name, const std::map<std::string, double>& p) {
  check_known(name, p);
  if (name == "constant") {
    const double w = get(p, "omega", 1.0);
    if (!(w > 0.0)) throw ParameterError("constant: omega must be positive");
    FrequencyProfile::Options o;
    o.kind = name;
    o.params = {{"omega", w}};
    return FrequencyProfile([w](double) { return w; }, [](double) { return 0.0; }, o);
  }
  if (name == "mathieu") {
    const double wb = get(p, "omega_bar", 1.0);
    const double eta = get(p, "eta", 0.0);
    const double alpha = get(p, "alpha", 2.0);
    if (!(wb > 0.0)) throw ParameterError("mathieu: omega_bar must be positive");
    if (!(std::abs(eta) < 1.0)) throw ParameterError("mathieu: requires |eta| < 1");
    if (!(alpha > 0.0)) throw ParameterError("mathieu: alpha must be positive");
    FrequencyProfile::Options o;
    o.kind = name;
    o.params = {{"omega_bar", wb}, {"eta", eta}, {"alpha", alpha}};
    o.period = 2.0 * std::acos(-1.0) / alpha;
    return FrequencyProfile(
        [=](double t) { return wb * std::sqrt(1.0 + eta * std::sin(alpha * t)); },
        [=](double t) {
          return wb * eta * alpha * std::cos(alpha * t) / (2.0 * std::sqrt(1.0 + eta * std::sin(alpha * t)));
        },
        o);
  }
  if (name == "step") {
    const double wm = get(p, "omega_minus", 1.0);
    const double wp = get(p, "omega_plus", 2.0);
    const double td = get(p, "t_d", 0.0);
    if (!(wm > 0.0 && wp > 0.0)) throw ParameterError("step: frequencies must be positive");
    FrequencyProfile::Options o;
    o.kind = name;
    o.params = {{"omega_minus", wm}, {"omega_plus", wp}, {"t_d", td}};
    o.discontinuities = {td};
    o.smoothness = kPiecewiseC1;
    return FrequencyProfile([=](double t) { return t < td ? wm : wp; }, [](double) { return 0.0; }, o);
  }
  if (name == "tanh_ramp" || name == "bump_ramp" || name == "spline_ramp") {
    return builtin_family(name, p).profile();
  }
  std::ostringstream msg;
  msg << "unknown profile kind '" << name << "'";
  throw ParameterError(msg.str());
}

}  // namespace tdho
