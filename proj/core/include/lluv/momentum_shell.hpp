#pragma once
#include "lluv/radial_profile.hpp"
#include <Eigen/Dense>
#include <array>
#include <complex>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace lluv {

inline constexpr int kDefaultRadialOrder = 12;
inline constexpr int kDefaultAngularOrder = 10;
inline constexpr int kMinAngularOrder = 2;
inline constexpr int kMaxAngularOrder = 64;

// Product rule on sigma <= |k| < Lambda: radial Gauss-Legendre (weight r^2)
// times Gauss-Legendre in cos(theta) with n_angular points and a uniform
// azimuth with 2 n_angular points.  Nodes are stored orbit by orbit: node
// s * n_azimuth + p is node s * n_azimuth rotated by 2 pi p / n_azimuth
// about z.  n_azimuth = 1 means no such structure is assumed.
struct ShellQuadrature {
  std::vector<Eigen::Vector3d> nodes;
  std::vector<double> weights;
  std::vector<Eigen::Vector3d> e1, e2;
  double sigma = 0.0;
  double lambda = 0.0;
  int n_radial = 0;
  int n_angular = 0;
  int n_azimuth = 1;

  std::size_t size() const { return nodes.size(); }
  int n_orbits() const { return static_cast<int>(nodes.size()) / n_azimuth; }
  double volume() const;
  double max_transversality_error() const;
  // Copy with every node and frame recomputed after the rotation R.
  ShellQuadrature rotated(const Eigen::Matrix3d& R) const;
};

bool angular_order_supported(int n_angular);

ShellQuadrature build_shell(double sigma, double lambda, int n_radial = kDefaultRadialOrder,
                            int n_angular = kDefaultAngularOrder);

// e1 = normalize(z x k) (x x k when k is parallel to z), e2 = khat x e1
std::pair<Eigen::Vector3d, Eigen::Vector3d> transverse_frame(const Eigen::Vector3d& k);

// Gauss quadrature for f^(q) = (2pi)^{-3/2} 4pi int r^2 f(r) j0(q r) dr
// over the elements of a radial grid.
class RadialTransform {
 public:
  RadialTransform(const std::vector<double>& grid, int points_per_element);

  const std::vector<double>& points() const { return r_; }
  const std::vector<double>& weights() const { return w_; }
  double r_max() const { return r_max_; }

  double operator()(std::span<const double> f, double q) const;
  double derivative(std::span<const double> f, double q) const;

  // P1 interpolant of phi at the quadrature points
  std::vector<double> sample(const RadialProfile& phi) const;

 private:
  std::vector<double> r_, w_;
  double r_max_ = 0.0;
};

// Gauss points per element adequate for |q| <= q_max on this grid.
int transform_order(const std::vector<double>& grid, double q_max);

// Callable q -> phi^(q), accurate for q <= q_max.
std::function<double(double)> radial_fourier(const RadialProfile& phi, double q_max = 64.0);

// Cubic Hermite table of a radial transform on [0, q_max].
class KernelTable {
 public:
  KernelTable() = default;
  KernelTable(const RadialTransform& T, std::span<const double> f, double q_max);

  double operator()(double q) const;
  std::size_t size() const { return value_.size(); }
  double step() const { return dq_; }

  // Adds weight * d value(q) / d(table entries) into the adjoint buffers.
  void accumulate(double q, double weight, std::vector<double>& w_value,
                  std::vector<double>& w_slope) const;
  // d/df of sum_t w_value[t] value[t] + w_slope[t] slope[t].
  std::vector<double> pullback(const RadialTransform& T, const std::vector<double>& w_value,
                               const std::vector<double>& w_slope) const;

 private:
  std::vector<double> value_, slope_;
  double dq_ = 0.0;
};

// Symmetric operator on frame coordinates, stored as a block-circulant
// family C_0 .. C_{m-1} (m = n_azimuth): the entry between dof (s,c) of
// azimuth p and dof (s',c') of azimuth p' is C_{(p'-p) mod m}[2s+c, 2s'+c'].
// m = 1 is an ordinary dense matrix.
class ShellOperator {
 public:
  ShellOperator() = default;
  ShellOperator(std::vector<Eigen::MatrixXd> circulant, Eigen::VectorXd k_block);
  static ShellOperator from_dense(Eigen::MatrixXd A, Eigen::VectorXd k_diag);

  int n_azimuth() const { return static_cast<int>(circulant_.size()); }
  Eigen::Index block_size() const { return k_block_.size(); }
  Eigen::Index dofs() const { return block_size() * n_azimuth(); }
  const std::vector<Eigen::MatrixXd>& circulant() const { return circulant_; }
  const Eigen::VectorXd& k_block() const { return k_block_; }

  Eigen::MatrixXd dense() const;
  Eigen::VectorXd k_diag() const;
  double trace() const;
  double symmetry_error() const;

  // Hermitian diagonal block A_l = sum_d C_d exp(2 pi i l d / m).
  Eigen::MatrixXcd fourier_block(int l) const;
  // Blocks l = 0 .. floor(m/2) with the number of times each occurs.
  std::vector<std::pair<int, int>> distinct_blocks() const;
  // Inverse of fourier_block: C_d = (1/m) sum_l B_l exp(-2 pi i l d / m).
  static std::vector<Eigen::MatrixXd> circulant_from_fourier(
      const std::vector<Eigen::MatrixXcd>& blocks);

  ShellOperator scaled(double c) const;
  ShellOperator operator+(const ShellOperator& other) const;
  // Smallest eigenvalue over all Fourier blocks.
  double min_eigenvalue() const;
  double max_abs_eigenvalue() const;

 private:
  std::vector<Eigen::MatrixXd> circulant_;
  Eigen::VectorXd k_block_;
};

// Pair data of a shell that does not depend on the profile.
class ShellGeometry {
 public:
  explicit ShellGeometry(const ShellQuadrature& shell);

  const ShellQuadrature& shell() const { return shell_; }
  double q_max() const { return q_max_; }
  int n_azimuth() const { return m_; }
  int n_orbits() const { return n_orbits_; }

  // Operator with entries prefactor * kernel(|k_i - k_j|) sqrt(w_i w_j) E_i^T E_j.
  ShellOperator assemble(const std::function<double(double)>& kernel, double prefactor) const;

  // sum over all entries of W_ij * d kernel / d table, for W given as a
  // circulant family (the real-space form of a weight operator).
  void accumulate(const KernelTable& table, const std::vector<Eigen::MatrixXd>& W,
                  double prefactor, std::vector<double>& w_value,
                  std::vector<double>& w_slope) const;

 private:
  ShellQuadrature shell_;
  int m_ = 1;
  int n_orbits_ = 0;
  double q_max_ = 0.0;
  // indexed [(d * n_orbits + s) * n_orbits + s']
  std::vector<double> q_;
  std::vector<std::array<double, 4>> frame_;
};

struct AssemblyOptions {
  bool verify_psd = true;
  double psd_tolerance = 1e-8;  // relative to the largest eigenvalue
};

// Table of rho^ for rho = phi^2 covering all pair distances of the shell.
KernelTable density_table(const RadialProfile& phi, const RadialTransform& T, double q_max);

// Theta: alpha (2pi)^{-3/2} rho^(|k_i - k_j|) sqrt(w_i w_j) E_i^T E_j, rho = phi^2.
ShellOperator assemble_theta(const RadialProfile& phi, double alpha, const ShellQuadrature& shell,
                             const AssemblyOptions& opt = {});
ShellOperator assemble_theta(const RadialProfile& phi, double alpha, const ShellGeometry& geom,
                             const AssemblyOptions& opt = {});

// (2pi)^{-3/2} phi^(|k_i - k_j|) sqrt(w_i w_j) E_i^T E_j, i.e. Theta with phi in
// place of rho and without the coupling.
ShellOperator main_term_operator(const RadialProfile& phi, const ShellQuadrature& shell,
                                 const AssemblyOptions& opt = {});

}  // namespace lluv
