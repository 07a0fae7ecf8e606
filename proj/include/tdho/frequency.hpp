#pragma once

/**
 * @file frequency.hpp
 * @brief Frequency laws t -> omega(t) > 0 with derivative, declared jumps and
 *        the built-in families used by the experiments.
 */

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tdho {

/// Smoothness class meaning "C-infinity".
inline constexpr int kSmoothInfinite = std::numeric_limits<int>::max();
/// Smoothness class meaning "piecewise C1 with declared jumps".
inline constexpr int kPiecewiseC1 = -1;

struct ProfileOptions {
  std::string kind = "custom";
  std::map<std::string, double> params;
  std::vector<double> discontinuities;
  std::optional<double> period;
  /// k such that omega is C^{k+1}; kSmoothInfinite or kPiecewiseC1.
  int smoothness = kSmoothInfinite;
};

class FrequencyProfile {
 public:
  using Fn = std::function<double(double)>;
  using Options = ProfileOptions;

  FrequencyProfile(Fn value, Fn derivative, Options opts = {});

  [[nodiscard]] double omega(double t) const { return value_(t); }
  [[nodiscard]] double omega_dot(double t) const { return derivative_(t); }
  /// omega/omega_dot one-sided limits, used at declared jumps.
  [[nodiscard]] double omega_left(double t) const;
  [[nodiscard]] double omega_right(double t) const;

  [[nodiscard]] const std::vector<double>& discontinuities() const { return opts_.discontinuities; }
  /// Declared jumps strictly inside (min(a,b), max(a,b)), ascending.
  [[nodiscard]] std::vector<double> discontinuities_in(double a, double b) const;
  [[nodiscard]] bool is_discontinuity(double t) const;
  [[nodiscard]] const std::optional<double>& period() const { return opts_.period; }
  [[nodiscard]] int smoothness_class() const { return opts_.smoothness; }
  [[nodiscard]] const std::string& kind() const { return opts_.kind; }
  [[nodiscard]] const std::map<std::string, double>& params() const { return opts_.params; }
  /// Parameter lookup; throws ParameterError when absent.
  [[nodiscard]] double param(const std::string& name) const;

  [[nodiscard]] const Fn& value_fn() const { return value_; }
  [[nodiscard]] const Fn& derivative_fn() const { return derivative_; }

 private:
  Fn value_;
  Fn derivative_;
  Options opts_;
};

/// zeta(t) = omega_dot / omega^2. Throws DomainError at a declared jump.
[[nodiscard]] double eval_zeta(const FrequencyProfile& profile, double t);

/// g = integral of |omega_dot/omega| between t_star and t (adaptive quadrature,
/// tolerance 1e-10). Throws DomainError if a declared jump lies strictly inside.
[[nodiscard]] double total_variation_g(const FrequencyProfile& profile, double t_star, double t);

/// sup |omega_dot/omega| and inf/sup of omega over [a,b], by dense sampling.
struct ProfileExtrema {
  double omega_min;
  double omega_max;
  double log_rate_max;
};
[[nodiscard]] ProfileExtrema sample_extrema(const FrequencyProfile& profile, double a, double b,
                                            int samples = 2049);

/// Slow-time base law tau -> omega~(tau) and its induced profile omega(t) = omega~(eps t).
struct SlowTimeFamily {
  std::function<double(double)> base;
  std::function<double(double)> base_derivative;
  double epsilon = 1.0;
  std::string kind = "custom";
  std::map<std::string, double> params;
  int smoothness = kSmoothInfinite;
  /// Half-width of the support of the base derivative, if compact.
  std::optional<double> support_half_width;

  [[nodiscard]] FrequencyProfile profile() const;
  [[nodiscard]] SlowTimeFamily with_epsilon(double eps) const;
  /// zeta~(tau) = omega~'(tau) / omega~(tau)^2
  [[nodiscard]] double zeta_tilde(double tau) const;
};

/// Polynomial smoothstep of order m: C^m on R, S(0)=0, S(1)=1, S' ~ x^m (1-x)^m.
[[nodiscard]] double smoothstep(int m, double x);
[[nodiscard]] double smoothstep_derivative(int m, double x);
/// C-infinity step with compactly supported derivative on (0,1).
[[nodiscard]] double bump_step(double x);
[[nodiscard]] double bump_step_derivative(double x);

/**
 * Built-in profiles. Names and parameters (defaults in brackets):
 *   constant    : omega [1]
 *   mathieu     : omega_bar [1], eta [0], alpha [2]     omega_bar sqrt(1 + eta sin(alpha t))
 *   tanh_ramp   : a [1.5], b [0.5], epsilon [1]        a + b tanh(eps t)
 *   bump_ramp   : lo [1], hi [2], width [1], epsilon [1]
 *   spline_ramp : lo [1], hi [2], width [1], k [2], epsilon [1]
 *   step        : omega_minus [1], omega_plus [2], t_d [0]
 * Throws ParameterError for unknown names or invalid parameters.
 */
[[nodiscard]] FrequencyProfile builtin_profile(const std::string& name,
                                               const std::map<std::string, double>& params = {});

/// Slow-time families for tanh_ramp, bump_ramp, spline_ramp and constant.
[[nodiscard]] SlowTimeFamily builtin_family(const std::string& name,
                                            const std::map<std::string, double>& params = {});

}  // namespace tdho
