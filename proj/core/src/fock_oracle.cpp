#include "lluv/fock_oracle.hpp"
#include "lluv/errors.hpp"
#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace lluv {

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(const Eigen::MatrixXd& A) {
  const Eigen::MatrixXd S = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("symmetric eigensolver did not converge");
  return es;
}

template <class F>
Eigen::MatrixXd sym_apply(const Eigen::MatrixXd& A, F f) {
  const auto es = eig(A);
  Eigen::VectorXd d = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

double min_eig(const Eigen::MatrixXd& A) {
  return A.size() == 0 ? 0.0 : eig(A).eigenvalues().minCoeff();
}

void require_square(const Eigen::MatrixXd& A, int n, const char* name) {
  if (A.rows() != n || A.cols() != n)
    throw InvalidInput(std::string("QuadraticBlocks: block ") + name + " has the wrong shape");
}

}  // namespace

Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& A) {
  return sym_apply(A, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

Eigen::MatrixXd sym_inv_sqrt(const Eigen::MatrixXd& A) {
  return sym_apply(A, [](double x) {
    if (!(x > 0.0))
      throw NumericalFailure("sym_inv_sqrt: matrix is not positive definite");
    return 1.0 / std::sqrt(x);
  });
}

void QuadraticBlocks::validate(double tol) const {
  const int m = n();
  if (m < 1)
    throw InvalidInput("QuadraticBlocks: need at least one mode");
  require_square(a, m, "a");
  require_square(b, m, "b");
  require_square(d, m, "d");
  if (y.size() != 0 && y.size() != m)
    throw InvalidInput("QuadraticBlocks: y has the wrong length");
  for (const auto* M : {&a, &b, &d}) {
    const double scale = 1.0 + M->cwiseAbs().maxCoeff();
    if ((*M - M->transpose()).cwiseAbs().maxCoeff() > tol * scale)
      throw InvalidInput("QuadraticBlocks: block is not symmetric");
    if (min_eig(*M) < -tol * scale)
      throw InvalidInput("QuadraticBlocks: block is not positive semidefinite");
  }
}

Eigen::MatrixXd QuadraticBlocks::T() const {
  const int m = n();
  Eigen::MatrixXd t(2 * m, 2 * m);
  t << a + b, b, b, d + b;
  return t;
}

QuadraticBlocks theta_embedding(const Eigen::VectorXd& k, const Eigen::MatrixXd& theta,
                                const Eigen::VectorXd& y) {
  const Eigen::Index n = k.size();
  if (theta.rows() != n || theta.cols() != n)
    throw InvalidInput("theta_embedding: shape mismatch");
  if (k.minCoeff() <= 0.0)
    throw InvalidInput("theta_embedding: k must be positive");
  const Eigen::VectorXd kis = k.cwiseSqrt().cwiseInverse();
  QuadraticBlocks q;
  q.a = 2.0 * k.asDiagonal().toDenseMatrix();
  q.b = kis.asDiagonal() * theta * kis.asDiagonal();
  q.b = 0.5 * (q.b + q.b.transpose());
  q.d = Eigen::MatrixXd::Zero(n, n);
  q.y = y.size() == 0 ? Eigen::VectorXd::Zero(n) : y;
  return q;
}

std::size_t fock_dimension(int n_modes, int N) {
  // C(N + n, n) computed incrementally, saturating at SIZE_MAX
  long double c = 1.0L;
  for (int i = 1; i <= n_modes; ++i)
    c = c * (N + i) / i;
  if (c > static_cast<long double>(SIZE_MAX))
    return SIZE_MAX;
  return static_cast<std::size_t>(std::llround(static_cast<double>(c)));
}

FockBasis::FockBasis(const FockTruncation& t, std::size_t cap)
    : n_(t.n_modes), N_(t.max_total_occupation) {
  if (n_ < 1 || N_ < 0)
    throw InvalidInput("FockBasis: need n_modes >= 1 and N >= 0");
  const std::size_t dim = fock_dimension(n_, N_);
  if (dim > cap)
    throw InvalidInput("FockBasis: dimension " + std::to_string(dim) + " exceeds cap " +
                       std::to_string(cap));
  states_.reserve(dim);
  std::vector<int> s(n_, 0);
  for (int total = 0; total <= N_; ++total) {
    // tuples with the given total, lexicographically descending in mode 0
    std::fill(s.begin(), s.end(), 0);
    s[0] = total;
    while (true) {
      states_.push_back(s);
      // next composition: move one quantum right
      int i = n_ - 2;
      while (i >= 0 && s[i] == 0)
        --i;
      if (i < 0)
        break;
      --s[i];
      const int rest = s[n_ - 1];
      s[n_ - 1] = 0;
      s[i + 1] = rest + 1;
    }
  }
  for (std::size_t i = 0; i < states_.size(); ++i)
    lookup_.emplace(states_[i], static_cast<long>(i));
}

long FockBasis::index(const std::vector<int>& s) const {
  const auto it = lookup_.find(s);
  return it == lookup_.end() ? -1 : it->second;
}

namespace {

// amplitude of a_i on s (in place); false when it annihilates
bool lower(std::vector<int>& s, int i, double& amp) {
  if (s[i] == 0)
    return false;
  amp *= std::sqrt(static_cast<double>(s[i]));
  --s[i];
  return true;
}

void raise(std::vector<int>& s, int i, double& amp) {
  ++s[i];
  amp *= std::sqrt(static_cast<double>(s[i]));
}

}  // namespace

Eigen::MatrixXd build_dgamma(const QuadraticBlocks& q, const FockTruncation& trunc,
                             std::size_t cap) {
  q.validate(1e-9);
  const int n = q.n();
  if (trunc.n_modes != n)
    throw InvalidInput("build_dgamma: truncation and blocks disagree on the number of modes");
  const FockBasis basis(trunc, cap);
  const Eigen::MatrixXd A = q.a + q.b;
  const Eigen::MatrixXd D = q.d + q.b;
  const Eigen::MatrixXd& B = q.b;
  const Eigen::VectorXd y = q.y.size() == 0 ? Eigen::VectorXd::Zero(n) : q.y;
  const long dim = static_cast<long>(basis.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);

  auto add = [&](const std::vector<int>& target, long col, double v) {
    const long row = basis.index(target);
    if (row >= 0)
      H(row, col) += v;
  };

  for (long c = 0; c < dim; ++c) {
    const auto& s0 = basis.state(c);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (A(i, j) != 0.0) {  // a*_i a_j
          auto s = s0;
          double amp = 1.0;
          if (lower(s, j, amp)) {
            raise(s, i, amp);
            add(s, c, A(i, j) * amp);
          }
        }
        if (B(i, j) != 0.0) {
          {  // a*_i a*_j
            auto s = s0;
            double amp = 1.0;
            raise(s, j, amp);
            raise(s, i, amp);
            add(s, c, B(i, j) * amp);
          }
          {  // a_i a_j
            auto s = s0;
            double amp = 1.0;
            if (lower(s, j, amp) && lower(s, i, amp))
              add(s, c, B(i, j) * amp);
          }
        }
        if (D(i, j) != 0.0) {  // a_i a*_j
          auto s = s0;
          double amp = 1.0;
          raise(s, j, amp);
          if (lower(s, i, amp))
            add(s, c, D(i, j) * amp);
        }
      }
      if (y(i) != 0.0) {
        auto s = s0;
        double amp = 1.0;
        if (lower(s, i, amp))
          add(s, c, 2.0 * y(i) * amp);
        s = s0;
        amp = 1.0;
        raise(s, i, amp);
        add(s, c, 2.0 * y(i) * amp);
      }
    }
  }
  return 0.5 * (H + H.transpose());
}

double ground_energy_bruteforce(const Eigen::MatrixXd& H) {
  if (H.rows() == 0 || H.rows() != H.cols())
    throw InvalidInput("ground_energy_bruteforce: need a nonempty square matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("ground_energy_bruteforce: eigensolver failed");
  return es.eigenvalues()(0);
}

GroundLadder ground_energy_ladder(const QuadraticBlocks& blocks, const std::vector<int>& Ns,
                                  double tol, std::size_t cap) {
  GroundLadder g;
  for (int N : Ns) {
    g.occupations.push_back(N);
    g.energies.push_back(
        ground_energy_bruteforce(build_dgamma(blocks, {blocks.n(), N}, cap)));
  }
  const std::size_t k = g.energies.size();
  g.converged = k >= 2 && std::abs(g.energies[k - 1] - g.energies[k - 2]) < tol;
  return g;
}

double bogolubov_ground_formula(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                const Eigen::MatrixXd& d) {
  QuadraticBlocks q{a, b, d, Eigen::VectorXd()};
  q.validate(1e-9);
  const double amin = min_eig(a);
  if (!(amin > 1e-12 * (1.0 + a.cwiseAbs().maxCoeff())))
    throw InvalidInput("bogolubov_ground_formula: a must be strictly positive");
  const Eigen::MatrixXd m = sym_sqrt(a + d);
  const Eigen::MatrixXd inner = m * (a + d + 4.0 * b) * m;
  return 0.5 * (sym_sqrt(inner) - a + d).trace();
}

double scalar_pair_minimum(double a, double b, double d) {
  auto f = [&](double v) {
    const double t = v - std::sqrt(1.0 + v * v);
    return a * v * v + b * t * t + d * (1.0 + v * v);
  };
  double lo = 0.0, hi = 1.0;
  while (f(hi) < f(0.5 * hi) && hi < 1e8)
    hi *= 2.0;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 300 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return std::min({f(0.5 * (lo + hi)), f1, f2, f(0.0)});
}

WeylShift weyl_shift(const QuadraticBlocks& q) {
  q.validate(1e-9);
  const Eigen::MatrixXd qtq = q.a + q.d + 4.0 * q.b;
  const Eigen::VectorXd y = q.y.size() == 0 ? Eigen::VectorXd::Zero(q.n()) : q.y;
  const auto es = eig(qtq);
  if (es.eigenvalues().minCoeff() <= 1e-14 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff()))
    throw NumericalFailure("weyl_shift: a + d + 4b is singular");
  WeylShift w;
  w.eta = 2.0 * es.eigenvectors() *
          (es.eigenvectors().transpose() * y).cwiseQuotient(es.eigenvalues());
  w.shift = w.eta.dot(qtq * w.eta);
  return w;
}

double contraction_bound_check(const Eigen::MatrixXd& kappa, double delta) {
  if (!(delta > 0.0))
    throw InvalidInput("contraction_bound_check: delta must be positive");
  const Eigen::Index q = kappa.cols();
  Eigen::MatrixXd G = kappa.transpose() * kappa;
  G.diagonal().array() += delta * delta;
  const Eigen::MatrixXd M = kappa * G.ldlt().solve(kappa.transpose());
  if (M.size() == 0 || q == 0)
    return 0.0;
  return eig(M).eigenvalues().cwiseAbs().maxCoeff();
}

bool VYCheck::holds(double tol) const {
  const double s = tol * (1.0 + upper);
  return tr_v2 <= tr_y_minus_1 + s && tr_y_minus_1 <= upper + s;
}

VYCheck v_y_roundtrip_check(const Eigen::MatrixXd& v) {
  if (v.rows() != v.cols())
    throw InvalidInput("v_y_roundtrip_check: v must be square");
  const auto es = eig(v);
  const Eigen::VectorXd nu = es.eigenvalues();
  if (nu.size() > 0 && nu.minCoeff() < -1e-12 * (1.0 + nu.cwiseAbs().maxCoeff()))
    throw InvalidInput("v_y_roundtrip_check: v must be positive semidefinite");
  VYCheck c;
  Eigen::VectorXd yv(nu.size());
  double vnorm = 0.0;
  for (Eigen::Index i = 0; i < nu.size(); ++i) {
    const double x = std::max(nu(i), 0.0);
    const double r = x + std::sqrt(1.0 + x * x);
    yv(i) = r * r;
    c.tr_v2 += x * x;
    c.tr_y_minus_1 += (yv(i) - 1.0) * (yv(i) - 1.0);
    vnorm = std::max(vnorm, x);
  }
  c.upper = 4.0 * (1.0 + 2.0 * vnorm) * (1.0 + 2.0 * vnorm) * c.tr_v2;
  c.y = es.eigenvectors() * yv.asDiagonal() * es.eigenvectors().transpose();
  return c;
}

PositivityCheck positivity_theorem_check(const Eigen::VectorXd& k, const Eigen::MatrixXd& Phi,
                                         const Eigen::VectorXd& w, int N) {
  if (Phi.cols() != k.size() || Phi.rows() != w.size())
    throw InvalidInput("positivity_theorem_check: shape mismatch");
  const Eigen::MatrixXd theta = Phi.transpose() * Phi;
  const Eigen::VectorXd y = k.cwiseSqrt().cwiseInverse().asDiagonal() * (Phi.transpose() * w);
  const QuadraticBlocks with_y = theta_embedding(k, theta, y);
  const QuadraticBlocks without_y = theta_embedding(k, theta);
  const FockTruncation t{static_cast<int>(k.size()), N};
  PositivityCheck p;
  p.e_complex = ground_energy_bruteforce(build_dgamma(with_y, t)) + w.squaredNorm();
  p.e_modulus = ground_energy_bruteforce(build_dgamma(without_y, t));
  p.shift = weyl_shift(with_y).shift;
  return p;
}

BogolubovPair BogolubovPair::from_generator(const Eigen::MatrixXd& X, const Eigen::MatrixXd& R) {
  BogolubovPair p;
  p.u = sym_apply(X, [](double x) { return std::cosh(x); }) * R;
  p.v = sym_apply(X, [](double x) { return std::sinh(x); }) * R;
  return p;
}

BogolubovPair BogolubovPair::random(int n, std::uint64_t seed, double strength) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::MatrixXd X(n, n), G(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      X(i, j) = N(rng);
      G(i, j) = N(rng);
    }
  X = 0.5 * strength * (X + X.transpose()) / std::sqrt(static_cast<double>(n));
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  const Eigen::MatrixXd R = qr.householderQ();
  return from_generator(X, R);
}

double BogolubovPair::symplectic_error() const {
  const Eigen::Index n = u.rows();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const double e1 = (u.transpose() * u - v.transpose() * v - I).cwiseAbs().maxCoeff();
  const double e2 = (u.transpose() * v - v.transpose() * u).cwiseAbs().maxCoeff();
  return std::max(e1, e2);
}

double vacuum_expectation(const BogolubovPair& B, const QuadraticBlocks& q) {
  const Eigen::MatrixXd vtv = B.v.transpose() * B.v;
  const Eigen::MatrixXd utu = B.u.transpose() * B.u;
  const Eigen::MatrixXd utv = B.u.transpose() * B.v;
  return ((q.a + q.b) * vtv).trace() + 2.0 * (q.b * utv).trace() + ((q.d + q.b) * utu).trace();
}

Eigen::MatrixXd y_star(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                       const Eigen::MatrixXd& d) {
  const Eigen::MatrixXd m = sym_sqrt(a + d);
  const Eigen::MatrixXd mi = sym_inv_sqrt(a + d);
  const Eigen::MatrixXd z = sym_sqrt(m * (a + d + 4.0 * b) * m);
  const Eigen::MatrixXd y = mi * z * mi;
  return 0.5 * (y + y.transpose());
}

double pair_functional(const Eigen::MatrixXd& y, const Eigen::MatrixXd& a,
                       const Eigen::MatrixXd& b, const Eigen::MatrixXd& d) {
  const Eigen::MatrixXd m2 = a + d;
  const Eigen::MatrixXd yinv = y.ldlt().solve(Eigen::MatrixXd::Identity(y.rows(), y.cols()));
  return (m2 * y + (m2 + 4.0 * b) * yinv + 2.0 * (d - a)).trace();
}

BogolubovPair optimal_pair(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const Eigen::MatrixXd& d) {
  const Eigen::MatrixXd ys = y_star(a, b, d);
  const Eigen::MatrixXd r = sym_sqrt(ys);
  const Eigen::MatrixXd ri = sym_inv_sqrt(ys);
  const Eigen::MatrixXd v = 0.5 * (r - ri);
  BogolubovPair p;
  p.u = sym_apply(v, [](double x) { return std::sqrt(1.0 + x * x); });
  p.v = -v;
  return p;
}

}  // namespace lluv
