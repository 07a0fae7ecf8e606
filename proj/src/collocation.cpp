#include "collocation.hpp"

#include <algorithm>
#include <cmath>

#include "tdho/errors.hpp"
#include "tdho/quadrature.hpp"

namespace tdho::detail {

namespace {

double lagrange(const std::vector<double>& x, int j, double t) {
  double v = 1.0;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (static_cast<int>(k) != j) v *= (t - x[k]) / (x[j] - x[k]);
  return v;
}

}  // namespace

CellRule::CellRule(int m_in) : m(m_in) {
  if (m < 2) throw ParameterError("collocation: need at least 2 nodes per cell");
  const GaussRule g = gauss_legendre(m);
  x.resize(m);
  w.resize(m);
  for (int i = 0; i < m; ++i) {
    x[i] = 0.5 * (g.nodes[i] + 1.0);
    w[i] = 0.5 * g.weights[i];
  }
  S.assign(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += w[k] * lagrange(x, j, x[i] * x[k]);
      S[static_cast<std::size_t>(i) * m + j] = s * x[i];
    }
  }
  top.resize(m);
  for (int j = 0; j < m; ++j) top[j] = (2.0 * m - 1.0) / 2.0 * g.weights[j] * legendre(m - 1, g.nodes[j]);
}

Mesh::Mesh(const FrequencyProfile& profile, std::vector<double> grid_in, double t_star, int m)
    : grid(std::move(grid_in)), rule(m) {
  if (grid.size() < 2) throw ParameterError("grid needs at least two points");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i + 1] > grid[i])) throw ParameterError("grid must be strictly increasing");
  auto it = std::find(grid.begin(), grid.end(), t_star);
  if (it == grid.end()) throw ParameterError("t_star must be a grid point");
  star = static_cast<std::size_t>(it - grid.begin());
  if (profile.is_discontinuity(t_star)) throw DomainError("t_star must not be a discontinuity");
  for (double td : profile.discontinuities_in(grid.front(), grid.back()))
    if (!std::binary_search(grid.begin(), grid.end(), td))
      throw ParameterError("declared discontinuities inside the grid must be grid points");
  jump.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) jump[i] = profile.is_discontinuity(grid[i]) ? 1 : 0;
  node_t.resize(cells() * m);
  for (std::size_t c = 0; c < cells(); ++c)
    for (int i = 0; i < m; ++i) node_t[node(c, i)] = grid[c] + width(c) * rule.x[i];
}

double cell_integral(const Mesh& mesh, std::size_t c, const std::vector<double>& f) {
  double s = 0.0;
  for (int j = 0; j < mesh.rule.m; ++j) s += mesh.rule.w[j] * f[mesh.node(c, j)];
  return mesh.width(c) * s;
}

double cell_partial(const Mesh& mesh, std::size_t c, int i, const std::vector<double>& f) {
  const int m = mesh.rule.m;
  double s = 0.0;
  for (int j = 0; j < m; ++j) s += mesh.rule.S[static_cast<std::size_t>(i) * m + j] * f[mesh.node(c, j)];
  return mesh.width(c) * s;
}

double cell_indicator(const Mesh& mesh, std::size_t c, const std::vector<double>& f) {
  double s = 0.0;
  for (int j = 0; j < mesh.rule.m; ++j) s += mesh.rule.top[j] * f[mesh.node(c, j)];
  return std::abs(mesh.width(c) * s);
}

std::vector<double> cumulative_quadrature(const Mesh& mesh, const std::function<double(double)>& f,
                                          double tol) {
  std::vector<double> out(mesh.grid.size(), 0.0);
  for (std::size_t c = mesh.star; c < mesh.cells(); ++c)
    out[c + 1] = out[c] + quadrature(f, mesh.grid[c], mesh.grid[c + 1], tol);
  for (std::size_t c = mesh.star; c-- > 0;)
    out[c] = out[c + 1] - quadrature(f, mesh.grid[c], mesh.grid[c + 1], tol);
  return out;
}

}  // namespace tdho::detail
