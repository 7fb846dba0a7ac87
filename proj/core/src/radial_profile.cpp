#include "lluv/radial_profile.hpp"
#include "lluv/errors.hpp"
#include <algorithm>
#include <cmath>
#include <numbers>

namespace lluv {

RadialProfile::RadialProfile(std::vector<double> grid, std::vector<double> values,
                             double support_radius)
    : grid_(std::move(grid)), values_(std::move(values)), support_(support_radius) {
  if (grid_.size() < 2)
    throw InvalidInput("RadialProfile: grid needs at least two points");
  if (grid_.size() != values_.size())
    throw InvalidInput("RadialProfile: grid and values differ in length");
  if (grid_[0] != 0.0)
    throw InvalidInput("RadialProfile: grid must start at r = 0");
  for (std::size_t i = 1; i < grid_.size(); ++i)
    if (!(grid_[i] > grid_[i - 1]))
      throw InvalidInput("RadialProfile: grid is not strictly increasing at index " +
                         std::to_string(i));
  if (!(support_ > 0.0) || !std::isfinite(support_))
    throw InvalidInput("RadialProfile: support radius must be positive");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0)
      throw InvalidInput("RadialProfile: values must be finite and nonnegative");
    if (grid_[i] >= support_ && values_[i] != 0.0)
      throw InvalidInput("RadialProfile: nonzero value outside the support radius");
  }
}

RadialProfile RadialProfile::sample(const std::function<double(double)>& f,
                                    std::vector<double> grid, double support_radius) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    v[i] = grid[i] >= support_radius ? 0.0 : std::max(0.0, f(grid[i]));
  return RadialProfile(std::move(grid), std::move(v), support_radius);
}

double RadialProfile::operator()(double r) const {
  if (grid_.empty() || r >= support_ || r < 0.0 || r >= grid_.back())
    return 0.0;
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), r);
  const std::size_t j = static_cast<std::size_t>(it - grid_.begin());
  const double a = grid_[j - 1], b = grid_[j];
  const double t = (r - a) / (b - a);
  return (1.0 - t) * values_[j - 1] + t * values_[j];
}

double RadialProfile::max_spacing() const {
  double h = 0.0;
  for (std::size_t i = 1; i < grid_.size(); ++i)
    h = std::max(h, grid_[i] - grid_[i - 1]);
  return h;
}

RadialProfile RadialProfile::scaled(double c) const {
  if (c < 0.0)
    throw InvalidInput("RadialProfile::scaled: negative factor");
  auto v = values_;
  for (auto& x : v)
    x *= c;
  return RadialProfile(grid_, std::move(v), support_);
}

RadialProfile RadialProfile::dilated(double lambda) const {
  if (!(lambda > 0.0))
    throw InvalidInput("RadialProfile::dilated: lambda must be positive");
  auto g = grid_;
  auto v = values_;
  const double amp = std::pow(lambda, 1.5);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] /= lambda;
    v[i] *= amp;
  }
  return RadialProfile(std::move(g), std::move(v), support_ / lambda);
}

Norms eval_norms(const RadialProfile& phi) {
  // three-point Gauss is exact for the degree <= 4 element integrands
  static const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const auto& r = phi.grid();
  const auto& f = phi.values();
  double l1 = 0.0, l2sq = 0.0, g2 = 0.0;
  for (std::size_t e = 0; e + 1 < r.size(); ++e) {
    const double a = r[e], b = r[e + 1], h = b - a;
    const double fa = f[e], fb = f[e + 1];
    if (fa == 0.0 && fb == 0.0)
      continue;
    for (int q = 0; q < 3; ++q) {
      const double t = 0.5 * (1.0 + gx[q]);
      const double x = a + h * t;
      const double w = 0.5 * h * gw[q] * x * x;
      const double v = (1.0 - t) * fa + t * fb;
      l1 += w * v;
      l2sq += w * v * v;
    }
    const double s = (fb - fa) / h;
    g2 += s * s * (b * b * b - a * a * a) / 3.0;
  }
  const double c = 4.0 * std::numbers::pi;
  return {c * l1, std::sqrt(c * l2sq), c * g2};
}

RadialProfile normalized(const RadialProfile& phi) {
  const double n = eval_norms(phi).l2;
  if (!(n > 0.0))
    throw InvalidInput("normalized: zero profile cannot be normalized");
  return phi.scaled(1.0 / n);
}

std::vector<double> uniform_grid(double L, int cells) {
  if (!(L > 0.0) || cells < 1)
    throw InvalidInput("uniform_grid: need L > 0 and at least one cell");
  std::vector<double> g(cells + 1);
  for (int i = 0; i <= cells; ++i)
    g[i] = L * static_cast<double>(i) / cells;
  g[cells] = L;
  return g;
}

}  // namespace lluv

namespace lluv {

P1Forms assemble_p1(const std::vector<double>& grid) {
  if (grid.size() < 2)
    throw InvalidInput("assemble_p1: grid needs at least two points");
  static const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const std::size_t n = grid.size() - 1;
  const double c = 4.0 * std::numbers::pi;
  P1Forms f;
  f.k_diag.assign(n, 0.0);
  f.m_diag.assign(n, 0.0);
  f.load.assign(n, 0.0);
  f.k_off.assign(n > 0 ? n - 1 : 0, 0.0);
  f.m_off.assign(n > 0 ? n - 1 : 0, 0.0);
  for (std::size_t e = 0; e < n; ++e) {
    const double a = grid[e], b = grid[e + 1], h = b - a;
    double m00 = 0, m01 = 0, m11 = 0, l0 = 0, l1 = 0;
    for (int q = 0; q < 3; ++q) {
      const double t = 0.5 * (1.0 + gx[q]);
      const double x = a + h * t;
      const double w = 0.5 * h * gw[q] * x * x * c;
      m00 += w * (1 - t) * (1 - t);
      m01 += w * (1 - t) * t;
      m11 += w * t * t;
      l0 += w * (1 - t);
      l1 += w * t;
    }
    const double k = c * (b * b * b - a * a * a) / (3.0 * h * h);
    f.k_diag[e] += k;
    f.m_diag[e] += m00;
    f.load[e] += l0;
    if (e + 1 < n) {
      f.k_diag[e + 1] += k;
      f.m_diag[e + 1] += m11;
      f.load[e + 1] += l1;
      f.k_off[e] -= k;
      f.m_off[e] += m01;
    }
  }
  return f;
}

}  // namespace lluv
