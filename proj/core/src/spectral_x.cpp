#include "lluv/spectral_x.hpp"
#include "lluv/errors.hpp"
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace lluv {

namespace {

template <class F>
void for_each_block(const ShellOperator& A, F&& fn) {
  if (A.n_azimuth() == 1) {
    fn(A.circulant()[0], 1, 0);
    return;
  }
  for (auto [l, mult] : A.distinct_blocks())
    fn(A.fourier_block(l), mult, l);
}

template <class Mat>
Mat add_k2(const Mat& A, const Eigen::VectorXd& k) {
  Mat H = A;
  for (Eigen::Index i = 0; i < k.size(); ++i)
    H(i, i) += k(i) * k(i);
  return H;
}

template <class Mat>
Eigen::SelfAdjointEigenSolver<Mat> solve(const Mat& H, int options) {
  Eigen::SelfAdjointEigenSolver<Mat> es(H, options);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("symmetric eigensolver did not converge");
  return es;
}

struct Accumulator {
  double x = 0.0;
  double eig_min = std::numeric_limits<double>::infinity();
  int clamped = 0;
  double rhs = 0.0;
};

// One diagonal block: X contribution and optionally the resolvent form.
template <class Mat>
void x_block(const Mat& A, const Eigen::VectorXd& k, int mult, bool identity, Accumulator& acc) {
  using Scalar = typename Mat::Scalar;
  const Mat H = add_k2(A, k);
  const auto es = solve(H, identity ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& lam = es.eigenvalues();
  double s = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < 0.0)
      acc.clamped += mult;
    s += std::sqrt(std::max(lam(i), 0.0));
  }
  acc.eig_min = std::min(acc.eig_min, lam.minCoeff());
  acc.x += mult * (s - k.sum());
  if (!identity)
    return;
  // Tr[A^{1/2} (K_A + K_0)^{-1} A^{1/2}]
  const auto ea = solve(A, Eigen::ComputeEigenvectors);
  const Eigen::VectorXd ra = ea.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Mat Ahalf = ea.eigenvectors() * ra.cast<Scalar>().asDiagonal() * ea.eigenvectors().adjoint();
  const Eigen::VectorXd rl = lam.cwiseMax(0.0).cwiseSqrt();
  Mat M = es.eigenvectors() * rl.cast<Scalar>().asDiagonal() * es.eigenvectors().adjoint();
  for (Eigen::Index i = 0; i < k.size(); ++i)
    M(i, i) += k(i);
  const Mat Y = M.ldlt().solve(Ahalf);
  acc.rhs += mult * std::real((Ahalf * Y).trace());
}

XReport finish(const Accumulator& acc, bool identity) {
  XReport r;
  r.value = acc.x;
  r.eig_min = acc.eig_min;
  r.clamped_count = acc.clamped;
  r.identity_residual = identity ? std::abs(acc.x - acc.rhs) / (1.0 + std::abs(acc.x))
                                 : std::numeric_limits<double>::quiet_NaN();
  return r;
}

void check_k(const Eigen::VectorXd& k) {
  for (Eigen::Index i = 0; i < k.size(); ++i)
    if (!(k(i) >= 0.0))
      throw InvalidInput("x_of: k_diag entries must be nonnegative");
}

}  // namespace

XReport x_of(const ShellOperator& A, const XOptions& opt) {
  check_k(A.k_block());
  Accumulator acc;
  for_each_block(A, [&](const auto& B, int mult, int) {
    x_block(B, A.k_block(), mult, opt.with_identity, acc);
  });
  return finish(acc, opt.with_identity);
}

XReport x_of(const Eigen::MatrixXd& A, const Eigen::VectorXd& k, const XOptions& opt) {
  if (A.rows() != A.cols() || A.rows() != k.size())
    throw InvalidInput("x_of: shape mismatch");
  return x_of(ShellOperator::from_dense(A, k), opt);
}

double x_identity_residual(const ShellOperator& A) { return x_of(A).identity_residual; }

double x_identity_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& k) {
  return x_of(A, k).identity_residual;
}

namespace {

template <class Mat>
Mat inv_sqrt_of(const Mat& A, const Eigen::VectorXd& k) {
  using Scalar = typename Mat::Scalar;
  const auto es = solve(add_k2(A, k), Eigen::ComputeEigenvectors);
  const Eigen::VectorXd lam = es.eigenvalues();
  if (lam.minCoeff() <= 0.0)
    throw NumericalFailure("x_directional_derivative: K^2 + A is not positive definite");
  const Eigen::VectorXd d = lam.cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * d.cast<Scalar>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double x_directional_derivative(const ShellOperator& A, const ShellOperator& H) {
  if (A.n_azimuth() != H.n_azimuth() || A.block_size() != H.block_size())
    throw InvalidInput("x_directional_derivative: layout mismatch");
  if (A.n_azimuth() == 1) {
    const Eigen::MatrixXd S = inv_sqrt_of(A.circulant()[0], A.k_block());
    return 0.5 * (S.cwiseProduct(H.circulant()[0])).sum();
  }
  double total = 0.0;
  for (auto [l, mult] : A.distinct_blocks()) {
    const Eigen::MatrixXcd S = inv_sqrt_of(A.fourier_block(l), A.k_block());
    total += mult * std::real((S * H.fourier_block(l)).trace());
  }
  return 0.5 * total;
}

double x_directional_derivative(const Eigen::MatrixXd& A, const Eigen::MatrixXd& H,
                                const Eigen::VectorXd& k) {
  return x_directional_derivative(ShellOperator::from_dense(A, k), ShellOperator::from_dense(H, k));
}

XGradient x_with_gradient(const ShellOperator& A) {
  check_k(A.k_block());
  XGradient out;
  Accumulator acc;
  const Eigen::VectorXd& k = A.k_block();
  const int m = A.n_azimuth();

  // X from the same eigendecomposition that yields (K^2 + A)^{-1/2}
  auto handle = [&](const auto& B, int mult) {
    using Mat = std::decay_t<decltype(B)>;
    using Scalar = typename Mat::Scalar;
    const auto es = solve(add_k2(B, k), Eigen::ComputeEigenvectors);
    const Eigen::VectorXd& lam = es.eigenvalues();
    double s = 0.0;
    Eigen::VectorXd d(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      if (lam(i) <= 0.0)
        acc.clamped += mult;
      const double v = std::max(lam(i), 0.0);
      s += std::sqrt(v);
      d(i) = v > 0.0 ? 1.0 / std::sqrt(v) : 0.0;
    }
    acc.eig_min = std::min(acc.eig_min, lam.minCoeff());
    acc.x += mult * (s - k.sum());
    return Mat(es.eigenvectors() * d.cast<Scalar>().asDiagonal() * es.eigenvectors().adjoint());
  };

  if (m == 1) {
    out.inv_sqrt.push_back(handle(A.circulant()[0], 1));
  } else {
    std::vector<Eigen::MatrixXcd> blocks(m);
    for (auto [l, mult] : A.distinct_blocks()) {
      blocks[l] = handle(A.fourier_block(l), mult);
      if (mult == 2)
        blocks[m - l] = blocks[l].conjugate();
    }
    out.inv_sqrt = ShellOperator::circulant_from_fourier(blocks);
  }
  out.report = finish(acc, false);
  return out;
}

double trace_sqrt(const ShellOperator& A) {
  double total = 0.0;
  for_each_block(A, [&](const auto& B, int mult, int) {
    const auto es = solve(B, Eigen::EigenvaluesOnly);
    total += mult * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  });
  return total;
}

Eigen::MatrixXd random_psd(int n, std::uint64_t seed, double scale, int rank) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  const int r = rank < 0 ? n : rank;
  Eigen::MatrixXd G(n, r);
  for (int j = 0; j < r; ++j)
    for (int i = 0; i < n; ++i)
      G(i, j) = N(rng);
  Eigen::MatrixXd A = scale * G * G.transpose() / std::max(1, n);
  return 0.5 * (A + A.transpose());
}

namespace {

std::string serialize_instance(const Eigen::VectorXd& k, const Eigen::MatrixXd& A,
                               const Eigen::MatrixXd& B) {
  std::ostringstream os;
  os.precision(17);
  os << "k = " << k.transpose() << "\nA =\n" << A << "\nB =\n" << B << "\n";
  return os.str();
}

}  // namespace

PropertyReport x_property_suite(std::uint64_t seed, int n, int trials) {
  if (n < 1 || trials < 0)
    throw InvalidInput("x_property_suite: need n >= 1 and trials >= 0");
  PropertyReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.5, 2.0);
  std::uniform_real_distribution<double> S(0.1, 10.0);
  const XOptions fast{false};
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd k(n);
    for (int i = 0; i < n; ++i)
      k(i) = U(rng);
    const std::uint64_t sa = rng();
    const double ca = S(rng);
    const std::uint64_t sb = rng();
    const double cb = S(rng);
    const Eigen::MatrixXd A = random_psd(n, sa, ca);
    const Eigen::MatrixXd B = random_psd(n, sb, cb);
    const double xa = x_of(A, k, fast).value;
    const double xb = x_of(B, k, fast).value;
    const double xab = x_of(A + B, k, fast).value;
    const double xmid = x_of(0.5 * (A + B), k, fast).value;
    const double tol = 1e-10 * (1.0 + std::abs(xab));
    const double m1 = xab - xa;
    const double m2 = xa + xb - xab;
    const double m3 = xmid - 0.5 * (xa + xb);
    rep.worst_margin = std::min({rep.worst_margin, m1, m2, m3});
    bool bad = false;
    if (m1 < -tol) {
      ++rep.monotone_violations;
      bad = true;
    }
    if (m2 < -tol) {
      ++rep.subadditive_violations;
      bad = true;
    }
    if (m3 < -tol) {
      ++rep.concavity_violations;
      bad = true;
    }
    if (bad)
      rep.counterexamples.push_back(serialize_instance(k, A, B));
    ++rep.trials;
  }
  return rep;
}

double x_lower_bound_check(const Eigen::MatrixXd& A, const Eigen::VectorXd& k, double p,
                           double Lambda) {
  if (!(p > 0.0 && p < 1.0))
    throw InvalidInput("x_lower_bound_check: p must lie in (0, 1)");
  if (k.size() > 0 && k.maxCoeff() > Lambda * (1.0 + 1e-12))
    throw InvalidInput("x_lower_bound_check: k_diag exceeds Lambda");
  const double x = x_of(A, k, XOptions{false}).value;
  const auto ea = solve(Eigen::MatrixXd(A), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd lam = ea.eigenvalues().cwiseMax(0.0);
  double tr_half = 0.0, tr_p = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    tr_half += std::sqrt(lam(i));
    tr_p += std::pow(lam(i), 0.5 * p);
  }
  return x - (tr_half - 2.0 * std::pow(Lambda, 1.0 - p) * tr_p);
}

double effective_energy(const RadialProfile& phi, double alpha, const ShellGeometry& geom,
                        XReport* report) {
  const Norms n = eval_norms(phi);
  if (std::abs(n.l2 - 1.0) > 1e-6)
    throw InvalidInput("effective_energy: profile is not normalized");
  AssemblyOptions opt;
  opt.verify_psd = false;
  const ShellOperator theta2 = assemble_theta(phi, 2.0 * alpha, geom, opt);
  const XReport x = x_of(theta2, XOptions{false});
  if (report)
    *report = x;
  return 0.5 * n.grad2 + 0.5 * x.value;
}

double effective_energy(const RadialProfile& phi, double alpha, const ShellQuadrature& shell) {
  return effective_energy(phi, alpha, ShellGeometry(shell));
}

GapTerms gap_terms(const RadialProfile& phi, double alpha, const ShellQuadrature& shell, double eps,
                   double L, double beta) {
  if (!(eps > 0.0 && eps <= 1.0))
    throw InvalidInput("gap_terms: eps must lie in (0, 1]");
  if (!(L > 0.0))
    throw InvalidInput("gap_terms: L must be positive");
  GapTerms g;
  const Norms n = eval_norms(phi);
  g.beta = beta;
  g.l1 = n.l1;
  g.grad_norm = std::sqrt(n.grad2);
  if (n.l2 > 0.0) {
    AssemblyOptions opt;
    opt.verify_psd = false;
    g.half_x = 0.5 * x_of(assemble_theta(phi, 2.0 * alpha, shell, opt), XOptions{false}).value;
  }
  g.gap = g.half_x - beta * n.l1;
  const double La = shell.lambda, sg = shell.sigma;
  g.upper_eps = eps * std::sqrt(alpha) * La * La * La * n.l1;
  g.upper_sigma = std::sqrt(alpha) * std::pow(sg, 1.5) * std::pow(La, 1.5) * n.l1;
  g.upper_kinetic = La * La * std::pow(L, 1.5) * g.grad_norm / (eps * eps);
  g.lower = std::pow(alpha, 0.25) * std::pow(La, 3.5) * std::pow(L, 1.5) * std::sqrt(n.l1);
  return g;
}

}  // namespace lluv
