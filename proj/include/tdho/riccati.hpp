#pragma once

/**
 * @file riccati.hpp
 * @brief Riccati reductions r = q'/q and s = q/q', their Picard iterates, and
 *        localization of the interlaced zeros of q and q'.
 */

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tdho/frequency.hpp"

namespace tdho {

enum class RiccatiKind { r, s };

/// r' = -omega^2 - r^2, s' = 1 + omega^2 s^2
[[nodiscard]] double riccati_rhs(RiccatiKind kind, double value, double omega);

struct RiccatiOptions {
  int nodes_per_cell = 8;
  double blowup = 1e6;
};

/// Picard iterates v^(0..order) on a grid; NaN outside [valid_lo[k], valid_hi[k]] (grid indices).
struct RiccatiSeries {
  RiccatiKind kind = RiccatiKind::r;
  int order = 0;
  double t_star = 0.0;
  double v_star = 0.0;
  std::size_t star_index = 0;
  std::vector<double> grid;
  std::vector<std::vector<double>> values;
  std::vector<std::size_t> valid_lo;
  std::vector<std::size_t> valid_hi;
  int nodes_per_cell = 8;
  std::vector<std::vector<double>> node_values;

  [[nodiscard]] bool truncated(int k) const { return valid_lo[k] > 0 || valid_hi[k] + 1 < grid.size(); }
};

[[nodiscard]] RiccatiSeries riccati_picard(RiccatiKind kind, const FrequencyProfile& profile, double v_star,
                                           double t_star, const std::vector<double>& grid, int h,
                                           const RiccatiOptions& opts = {});

/// q = q_star exp(integral of r) (or of 1/s) from the collocation data of iterate k.
[[nodiscard]] std::vector<double> reconstruct_q(const RiccatiSeries& series, int k, double q_star);

/// Same from an arbitrary function v(t) by adaptive quadrature at the grid times.
[[nodiscard]] std::vector<double> reconstruct_q(RiccatiKind kind, const std::function<double(double)>& v,
                                                const std::vector<double>& grid, double q_star, double t_star);

/// Closed-form first-order approximants started from the constant r* (or s*).
[[nodiscard]] double first_order_r(const FrequencyProfile& profile, double r_star, double t_star, double t);
[[nodiscard]] double first_order_s(const FrequencyProfile& profile, double s_star, double t_star, double t);
/// q^(1) from the r route (requires q_star != 0).
[[nodiscard]] double first_order_q_r(const FrequencyProfile& profile, double q_star, double p_star, double t_star,
                                     double t);
/// q^(1) from the s route; for q_star = 0 returns the regular limit p_star s^(1)(t).
[[nodiscard]] double first_order_q_s(const FrequencyProfile& profile, double q_star, double p_star, double t_star,
                                     double t);

enum class Parity { q_zero, p_zero };

struct SpecialPoint {
  long h = 0;
  double t = 0.0;
  Parity parity = Parity::q_zero;
  double bracket = 0.0;  ///< width of the final sign-change bracket
};

struct GapCertificate {
  long h = 0;  ///< gap from t_h to t_{h+1}
  double gap = 0.0;
  double omega_l = 0.0;
  double omega_u = 0.0;
  double bound_low = 0.0;   ///< pi/(2 omega_u)
  double bound_high = 0.0;  ///< pi/(2 omega_l)
  bool rough_ok = false;
  bool monotone = false;
  /// pi/2 - integral of omega over the gap, and its admissible one-sided limit
  double phase_defect = 0.0;
  double phase_limit = 0.0;
  std::optional<bool> refined_ok;  ///< set only on monotone gaps
  double predicted_low = 0.0;      ///< single-pass refinement knowing only t_h
  double predicted_high = 0.0;
  bool predicted_ok = false;
  int quadrant = 1;                ///< 1..4 for the open interval
  bool quadrant_ok = false;        ///< sign pattern of (q, p) at the midpoint
};

struct ZeroSequence {
  std::vector<SpecialPoint> points;
  std::vector<GapCertificate> gaps;
  [[nodiscard]] bool parities_alternate() const;
  [[nodiscard]] bool strictly_increasing() const;
  [[nodiscard]] bool all_certified() const;
};

/// Special points in [t0, t_max] of the solution with (q, p)(t0) = (q0, p0);
/// labels fixed by placing psi(t0) in [0, 2 pi).
[[nodiscard]] ZeroSequence find_zero_sequence(const FrequencyProfile& profile, double q0, double p0, double t0,
                                              double t_max, double tol = 1e-12);

/// Special points of the solution with data (q_i, p_i) at t_i, searched in [lo, hi] (lo <= t_i <= hi).
[[nodiscard]] ZeroSequence find_zero_sequence_window(const FrequencyProfile& profile, double q_i, double p_i,
                                                     double t_i, double lo, double hi, double tol = 1e-12);

struct MonotonicityReport {
  std::vector<double> ti;
  std::vector<long> h;
  std::vector<std::vector<double>> t_h;  ///< [h index][ti index], NaN when not located
  bool strictly_growing = true;
  std::vector<std::string> violations;
};

[[nodiscard]] MonotonicityReport check_monotonicity_in_ti(const FrequencyProfile& profile, double q_i, double p_i,
                                                          const std::vector<double>& ti_grid, long h_min,
                                                          long h_max);

/// CSV: h, t_h, parity, gap, bound_low, bound_high (plus certificate columns).
void write_zero_sequence_csv(std::ostream& out, const ZeroSequence& zs);

}  // namespace tdho
