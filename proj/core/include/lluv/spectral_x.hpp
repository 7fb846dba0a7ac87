#pragma once
#include "lluv/momentum_shell.hpp"
#include "lluv/radial_profile.hpp"
#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace lluv {

struct XReport {
  double value = 0.0;
  double eig_min = 0.0;  // smallest eigenvalue of K^2 + A before clamping
  int clamped_count = 0;
  double identity_residual = 0.0;  // NaN when not computed
};

struct XOptions {
  bool with_identity = true;
};

// X(A) = sum_i sqrt(lambda_i(K^2 + A)) - sum_i k_i
XReport x_of(const ShellOperator& A, const XOptions& opt = {});
XReport x_of(const Eigen::MatrixXd& A, const Eigen::VectorXd& k, const XOptions& opt = {});

// |Tr[K_A - K_0] - Tr[A^{1/2} (K_A + K_0)^{-1} A^{1/2}]| / (1 + |Tr[K_A - K_0]|)
double x_identity_residual(const ShellOperator& A);
double x_identity_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& k);

// 1/2 Tr[(K^2 + A)^{-1/2} H]
double x_directional_derivative(const ShellOperator& A, const ShellOperator& H);
double x_directional_derivative(const Eigen::MatrixXd& A, const Eigen::MatrixXd& H,
                                const Eigen::VectorXd& k);

// X(A) together with the circulant family of (K^2 + A)^{-1/2}.
struct XGradient {
  XReport report;
  std::vector<Eigen::MatrixXd> inv_sqrt;
};
XGradient x_with_gradient(const ShellOperator& A);

// Tr[A^{1/2}] with negative eigenvalues clamped.
double trace_sqrt(const ShellOperator& A);

struct PropertyReport {
  int trials = 0;
  int monotone_violations = 0;
  int subadditive_violations = 0;
  int concavity_violations = 0;
  double worst_margin = 0.0;  // most negative slack seen (0 if none)
  std::vector<std::string> counterexamples;
  bool ok() const {
    return monotone_violations == 0 && subadditive_violations == 0 && concavity_violations == 0;
  }
};

// X(A) <= X(A+B) <= X(A) + X(B) and X((A+B)/2) >= (X(A) + X(B))/2 on
// random PSD pairs of side n, slack 1e-10 (relative to 1 + |X|).
PropertyReport x_property_suite(std::uint64_t seed, int n, int trials);

// X(A) - (Tr[A^{1/2}] - 2 Lambda^{1-p} Tr[A^{p/2}]); requires k <= Lambda.
double x_lower_bound_check(const Eigen::MatrixXd& A, const Eigen::VectorXd& k, double p,
                           double Lambda);

// Random symmetric PSD matrix G G^T / n scaled by `scale`, with G Gaussian.
Eigen::MatrixXd random_psd(int n, std::uint64_t seed, double scale = 1.0, int rank = -1);

// 1/2 |grad phi|^2 + 1/2 X(2 Theta)
double effective_energy(const RadialProfile& phi, double alpha, const ShellQuadrature& shell);
double effective_energy(const RadialProfile& phi, double alpha, const ShellGeometry& geom,
                        XReport* report = nullptr);

struct GapTerms {
  double half_x = 0.0;       // 1/2 X(2 Theta)
  double gap = 0.0;          // half_x - beta |phi|_1
  double beta = 0.0;
  double l1 = 0.0;
  double grad_norm = 0.0;    // |grad phi|_2
  double upper_eps = 0.0;    // eps alpha^{1/2} Lambda^3 |phi|_1
  double upper_sigma = 0.0;  // alpha^{1/2} sigma^{3/2} Lambda^{3/2} |phi|_1
  double upper_kinetic = 0.0;  // eps^{-2} Lambda^2 L^{3/2} |grad phi|_2
  double lower = 0.0;        // alpha^{1/4} Lambda^{7/2} L^{3/2} |phi|_1^{1/2}
};

GapTerms gap_terms(const RadialProfile& phi, double alpha, const ShellQuadrature& shell, double eps,
                   double L, double beta);

}  // namespace lluv
