#pragma once

// Per-cell Gauss-Legendre collocation used to evaluate Volterra-type iterates
// on a user grid: each grid cell carries m nodes, integrals from the cell start
// to the nodes are applied through a precomputed integration matrix.

#include <cstddef>
#include <vector>

#include "tdho/frequency.hpp"

namespace tdho::detail {

struct CellRule {
  int m = 0;
  std::vector<double> x;    // nodes on [0,1]
  std::vector<double> w;    // weights on [0,1]
  std::vector<double> S;    // S[i*m+j] = integral_0^{x_i} L_j
  std::vector<double> top;  // sum_j top[j] f_j = highest Legendre coefficient of the interpolant
  explicit CellRule(int m);
};

struct Mesh {
  std::vector<double> grid;
  std::size_t star = 0;
  CellRule rule;
  std::vector<double> node_t;  // cells()*m, cell-major
  std::vector<char> jump;      // grid[i] is a declared discontinuity

  Mesh(const FrequencyProfile& profile, std::vector<double> grid_in, double t_star, int m);
  [[nodiscard]] std::size_t cells() const { return grid.size() - 1; }
  [[nodiscard]] double width(std::size_t c) const { return grid[c + 1] - grid[c]; }
  [[nodiscard]] std::size_t node(std::size_t c, int i) const { return c * rule.m + i; }
};

/// Weighted sum h * sum_j w_j f[c*m + j] (integral over cell c).
[[nodiscard]] double cell_integral(const Mesh& mesh, std::size_t c, const std::vector<double>& f);
/// Integral from the left end of cell c to node i.
[[nodiscard]] double cell_partial(const Mesh& mesh, std::size_t c, int i, const std::vector<double>& f);
/// |h * highest Legendre coefficient| of the node data on cell c.
[[nodiscard]] double cell_indicator(const Mesh& mesh, std::size_t c, const std::vector<double>& f);

/// Integral of f(t) from t_star along the grid: values at grid points, adaptive quadrature per cell.
[[nodiscard]] std::vector<double> cumulative_quadrature(const Mesh& mesh,
                                                        const std::function<double(double)>& f,
                                                        double tol);

}  // namespace tdho::detail
