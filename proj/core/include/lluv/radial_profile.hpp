#pragma once
#include <functional>
#include <vector>

namespace lluv {

// Nonnegative radial profile, piecewise linear between grid nodes and zero
// for r >= support_radius.
class RadialProfile {
 public:
  RadialProfile() = default;
  RadialProfile(std::vector<double> grid, std::vector<double> values, double support_radius);

  // Samples f on the grid; values at r >= L are forced to zero.
  static RadialProfile sample(const std::function<double(double)>& f, std::vector<double> grid,
                              double support_radius);

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double support_radius() const { return support_; }
  std::size_t size() const { return grid_.size(); }
  bool empty() const { return grid_.empty(); }

  double operator()(double r) const;
  double max_spacing() const;

  RadialProfile scaled(double c) const;
  // phi_lambda(r) = lambda^{3/2} phi(lambda r), grid mapped to r_i / lambda
  RadialProfile dilated(double lambda) const;

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
  double support_ = 0.0;
};

struct Norms {
  double l1 = 0.0;     // 4 pi int r^2 phi
  double l2 = 0.0;     // (4 pi int r^2 phi^2)^{1/2}
  double grad2 = 0.0;  // 4 pi int r^2 phi'^2
};

// Exact integrals of the piecewise-linear interpolant.
Norms eval_norms(const RadialProfile& phi);

RadialProfile normalized(const RadialProfile& phi);

// cells + 1 equally spaced points on [0, L].
std::vector<double> uniform_grid(double L, int cells);

}  // namespace lluv

namespace lluv {

// Tridiagonal P1 forms on a grid whose last node is held at zero:
// stiffness 4pi int r^2 N_i' N_j', mass 4pi int r^2 N_i N_j, load 4pi int r^2 N_i.
// Index i runs over nodes 0 .. size-2; off-diagonals couple i and i+1.
struct P1Forms {
  std::vector<double> k_diag, k_off;
  std::vector<double> m_diag, m_off;
  std::vector<double> load;
};

P1Forms assemble_p1(const std::vector<double>& grid);

}  // namespace lluv
