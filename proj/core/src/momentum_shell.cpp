#include "lluv/momentum_shell.hpp"
#include "lluv/errors.hpp"
#include "lluv/quadrature.hpp"
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

namespace lluv {

namespace {

constexpr double kPi = std::numbers::pi;

double fourier_prefactor() { return std::pow(2.0 * kPi, -1.5) * 4.0 * kPi; }

}  // namespace

double ShellQuadrature::volume() const {
  double v = 0.0;
  for (double w : weights)
    v += w;
  return v;
}

double ShellQuadrature::max_transversality_error() const {
  double worst = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    worst = std::max(worst, std::abs(e1[j].dot(nodes[j])));
    worst = std::max(worst, std::abs(e2[j].dot(nodes[j])));
    worst = std::max(worst, std::abs(e1[j].dot(e2[j])));
    worst = std::max(worst, std::abs(e1[j].norm() - 1.0));
    worst = std::max(worst, std::abs(e2[j].norm() - 1.0));
  }
  return worst;
}

ShellQuadrature ShellQuadrature::rotated(const Eigen::Matrix3d& R) const {
  ShellQuadrature out = *this;
  out.n_azimuth = 1;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    out.nodes[j] = R * nodes[j];
    std::tie(out.e1[j], out.e2[j]) = transverse_frame(out.nodes[j]);
  }
  return out;
}

bool angular_order_supported(int n_angular) {
  return n_angular >= kMinAngularOrder && n_angular <= kMaxAngularOrder;
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> transverse_frame(const Eigen::Vector3d& k) {
  const double kn = k.norm();
  if (!(kn > 0.0))
    throw InvalidInput("transverse_frame: k = 0 has no transverse plane");
  const Eigen::Vector3d khat = k / kn;
  Eigen::Vector3d e1 = Eigen::Vector3d::UnitZ().cross(khat);
  if (e1.norm() < 1e-8)
    e1 = Eigen::Vector3d::UnitX().cross(khat);
  e1.normalize();
  Eigen::Vector3d e2 = khat.cross(e1);
  e2.normalize();
  return {e1, e2};
}

ShellQuadrature build_shell(double sigma, double lambda, int n_radial, int n_angular) {
  if (!(sigma >= 0.0) || !(sigma < lambda))
    throw InvalidInput("build_shell: need 0 <= sigma < Lambda");
  if (n_radial < 4)
    throw InvalidInput("build_shell: n_radial must be at least 4");
  if (!angular_order_supported(n_angular))
    throw InvalidInput("build_shell: unsupported angular order " + std::to_string(n_angular) +
                       " (supported " + std::to_string(kMinAngularOrder) + ".." +
                       std::to_string(kMaxAngularOrder) + ")");
  const auto radial = gauss_legendre(n_radial, sigma, lambda);
  const auto polar = gauss_legendre(n_angular);
  const int m = 2 * n_angular;

  ShellQuadrature s;
  s.sigma = sigma;
  s.lambda = lambda;
  s.n_radial = n_radial;
  s.n_angular = n_angular;
  s.n_azimuth = m;
  const std::size_t N = static_cast<std::size_t>(n_radial) * n_angular * m;
  s.nodes.reserve(N);
  s.weights.reserve(N);
  s.e1.reserve(N);
  s.e2.reserve(N);
  for (int ir = 0; ir < n_radial; ++ir) {
    const double r = radial.nodes[ir];
    for (int it = 0; it < n_angular; ++it) {
      const double ct = polar.nodes[it];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      const double w = radial.weights[ir] * r * r * polar.weights[it] * 2.0 * kPi / m;
      for (int p = 0; p < m; ++p) {
        const double ph = 2.0 * kPi * (p + 0.5) / m;
        const Eigen::Vector3d k(r * st * std::cos(ph), r * st * std::sin(ph), r * ct);
        auto [e1, e2] = transverse_frame(k);
        s.nodes.push_back(k);
        s.weights.push_back(w);
        s.e1.push_back(e1);
        s.e2.push_back(e2);
      }
    }
  }
  return s;
}

RadialTransform::RadialTransform(const std::vector<double>& grid, int points_per_element) {
  if (grid.size() < 2)
    throw InvalidInput("RadialTransform: grid needs at least two points");
  if (points_per_element < 1)
    throw InvalidInput("RadialTransform: points_per_element must be positive");
  const auto ref = gauss_legendre(points_per_element);
  const double c = fourier_prefactor();
  for (std::size_t e = 0; e + 1 < grid.size(); ++e) {
    const double a = grid[e], b = grid[e + 1];
    for (int i = 0; i < points_per_element; ++i) {
      const double r = 0.5 * (a + b) + 0.5 * (b - a) * ref.nodes[i];
      r_.push_back(r);
      w_.push_back(c * 0.5 * (b - a) * ref.weights[i] * r * r);
    }
  }
  r_max_ = grid.back();
}

double RadialTransform::operator()(std::span<const double> f, double q) const {
  double s = 0.0;
  for (std::size_t g = 0; g < r_.size(); ++g)
    if (f[g] != 0.0)
      s += w_[g] * f[g] * sph_j0(q * r_[g]);
  return s;
}

double RadialTransform::derivative(std::span<const double> f, double q) const {
  double s = 0.0;
  for (std::size_t g = 0; g < r_.size(); ++g)
    if (f[g] != 0.0)
      s += w_[g] * f[g] * r_[g] * sph_j0_prime(q * r_[g]);
  return s;
}

std::vector<double> RadialTransform::sample(const RadialProfile& phi) const {
  std::vector<double> f(r_.size());
  for (std::size_t g = 0; g < r_.size(); ++g)
    f[g] = phi(r_[g]);
  return f;
}

int transform_order(const std::vector<double>& grid, double q_max) {
  double h = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    h = std::max(h, grid[i] - grid[i - 1]);
  return std::clamp(4 + static_cast<int>(std::ceil(1.5 * q_max * h)), 4, 64);
}

std::function<double(double)> radial_fourier(const RadialProfile& phi, double q_max) {
  if (phi.empty())
    throw InvalidInput("radial_fourier: empty profile");
  auto T = std::make_shared<RadialTransform>(phi.grid(), transform_order(phi.grid(), q_max));
  auto f = std::make_shared<std::vector<double>>(T->sample(phi));
  return [T, f](double q) { return (*T)(*f, std::abs(q)); };
}

KernelTable::KernelTable(const RadialTransform& T, std::span<const double> f, double q_max) {
  if (!(q_max > 0.0))
    throw InvalidInput("KernelTable: q_max must be positive");
  // q spacing times support radius <= 0.02 keeps the Hermite error near 1e-10
  const int n = std::max(64, static_cast<int>(std::ceil(q_max * T.r_max() / 0.02)) + 2);
  dq_ = q_max / (n - 2);
  value_.resize(n);
  slope_.resize(n);
  for (int t = 0; t < n; ++t) {
    value_[t] = T(f, t * dq_);
    slope_[t] = T.derivative(f, t * dq_);
  }
}

namespace {

struct Hermite {
  std::size_t t;
  double h00, h10, h01, h11;
};

Hermite hermite(double q, double dq, std::size_t n) {
  double x = q / dq;
  std::size_t t = static_cast<std::size_t>(x);
  if (t + 1 >= n) {
    t = n - 2;
  }
  const double s = x - static_cast<double>(t);
  const double s2 = s * s, s3 = s2 * s;
  return {t, 2 * s3 - 3 * s2 + 1, (s3 - 2 * s2 + s) * dq, -2 * s3 + 3 * s2, (s3 - s2) * dq};
}

}  // namespace

double KernelTable::operator()(double q) const {
  const auto h = hermite(std::abs(q), dq_, value_.size());
  return h.h00 * value_[h.t] + h.h10 * slope_[h.t] + h.h01 * value_[h.t + 1] +
         h.h11 * slope_[h.t + 1];
}

void KernelTable::accumulate(double q, double weight, std::vector<double>& w_value,
                             std::vector<double>& w_slope) const {
  const auto h = hermite(std::abs(q), dq_, value_.size());
  w_value[h.t] += weight * h.h00;
  w_slope[h.t] += weight * h.h10;
  w_value[h.t + 1] += weight * h.h01;
  w_slope[h.t + 1] += weight * h.h11;
}

std::vector<double> KernelTable::pullback(const RadialTransform& T,
                                          const std::vector<double>& w_value,
                                          const std::vector<double>& w_slope) const {
  const auto& r = T.points();
  const auto& w = T.weights();
  std::vector<double> grad(r.size(), 0.0);
  for (std::size_t t = 0; t < value_.size(); ++t) {
    if (w_value[t] == 0.0 && w_slope[t] == 0.0)
      continue;
    const double q = t * dq_;
    for (std::size_t g = 0; g < r.size(); ++g) {
      const double x = q * r[g];
      grad[g] += w[g] * (w_value[t] * sph_j0(x) + w_slope[t] * r[g] * sph_j0_prime(x));
    }
  }
  return grad;
}

ShellOperator::ShellOperator(std::vector<Eigen::MatrixXd> circulant, Eigen::VectorXd k_block)
    : circulant_(std::move(circulant)), k_block_(std::move(k_block)) {
  if (circulant_.empty())
    throw InvalidInput("ShellOperator: empty circulant family");
  for (const auto& C : circulant_)
    if (C.rows() != k_block_.size() || C.cols() != k_block_.size())
      throw InvalidInput("ShellOperator: block size mismatch");
}

ShellOperator ShellOperator::from_dense(Eigen::MatrixXd A, Eigen::VectorXd k_diag) {
  if (A.rows() != A.cols() || A.rows() != k_diag.size())
    throw InvalidInput("ShellOperator::from_dense: shape mismatch");
  std::vector<Eigen::MatrixXd> c;
  c.push_back(std::move(A));
  return ShellOperator(std::move(c), std::move(k_diag));
}

Eigen::MatrixXd ShellOperator::dense() const {
  const int m = n_azimuth();
  const Eigen::Index b = block_size();
  const int n_orb = static_cast<int>(b / 2);
  if (m == 1)
    return circulant_[0];
  Eigen::MatrixXd A(dofs(), dofs());
  // dof of (orbit s, frame c, azimuth p) is 2 (s m + p) + c
  for (int s = 0; s < n_orb; ++s)
    for (int c = 0; c < 2; ++c)
      for (int p = 0; p < m; ++p) {
        const Eigen::Index I = 2 * (static_cast<Eigen::Index>(s) * m + p) + c;
        for (int s2 = 0; s2 < n_orb; ++s2)
          for (int c2 = 0; c2 < 2; ++c2)
            for (int p2 = 0; p2 < m; ++p2) {
              const Eigen::Index J = 2 * (static_cast<Eigen::Index>(s2) * m + p2) + c2;
              A(I, J) = circulant_[((p2 - p) % m + m) % m](2 * s + c, 2 * s2 + c2);
            }
      }
  return A;
}

Eigen::VectorXd ShellOperator::k_diag() const {
  const int m = n_azimuth();
  if (m == 1)
    return k_block_;
  Eigen::VectorXd k(dofs());
  const int n_orb = static_cast<int>(block_size() / 2);
  for (int s = 0; s < n_orb; ++s)
    for (int p = 0; p < m; ++p)
      for (int c = 0; c < 2; ++c)
        k(2 * (static_cast<Eigen::Index>(s) * m + p) + c) = k_block_(2 * s + c);
  return k;
}

double ShellOperator::trace() const { return n_azimuth() * circulant_[0].trace(); }

double ShellOperator::symmetry_error() const {
  const int m = n_azimuth();
  double err = 0.0;
  for (int d = 0; d < m; ++d)
    err = std::max(err, (circulant_[d] - circulant_[(m - d) % m].transpose()).cwiseAbs().maxCoeff());
  return err;
}

Eigen::MatrixXcd ShellOperator::fourier_block(int l) const {
  const int m = n_azimuth();
  const Eigen::Index b = block_size();
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(b, b);
  for (int d = 0; d < m; ++d) {
    const double ang = 2.0 * kPi * static_cast<double>((static_cast<long>(l) * d) % m) / m;
    const std::complex<double> w(std::cos(ang), std::sin(ang));
    A += w * circulant_[d].cast<std::complex<double>>();
  }
  return 0.5 * (A + A.adjoint());
}

std::vector<std::pair<int, int>> ShellOperator::distinct_blocks() const {
  const int m = n_azimuth();
  std::vector<std::pair<int, int>> out;
  for (int l = 0; l <= m / 2; ++l) {
    const bool self_conjugate = (l == 0) || (2 * l == m);
    out.emplace_back(l, self_conjugate ? 1 : 2);
  }
  return out;
}

std::vector<Eigen::MatrixXd> ShellOperator::circulant_from_fourier(
    const std::vector<Eigen::MatrixXcd>& blocks) {
  const int m = static_cast<int>(blocks.size());
  std::vector<Eigen::MatrixXd> C(m);
  for (int d = 0; d < m; ++d) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(blocks[0].rows(), blocks[0].cols());
    for (int l = 0; l < m; ++l) {
      const double ang = -2.0 * kPi * static_cast<double>((static_cast<long>(l) * d) % m) / m;
      acc += std::complex<double>(std::cos(ang), std::sin(ang)) * blocks[l];
    }
    C[d] = acc.real() / m;
  }
  return C;
}

ShellOperator ShellOperator::scaled(double c) const {
  auto C = circulant_;
  for (auto& M : C)
    M *= c;
  return ShellOperator(std::move(C), k_block_);
}

ShellOperator ShellOperator::operator+(const ShellOperator& other) const {
  if (other.n_azimuth() != n_azimuth() || other.block_size() != block_size())
    throw InvalidInput("ShellOperator::operator+: layout mismatch");
  auto C = circulant_;
  for (std::size_t d = 0; d < C.size(); ++d)
    C[d] += other.circulant_[d];
  return ShellOperator(std::move(C), k_block_);
}

namespace {

Eigen::VectorXd block_eigenvalues(const ShellOperator& A, int l) {
  if (A.n_azimuth() == 1) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.circulant()[0], Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw NumericalFailure("eigensolver failed");
    return es.eigenvalues();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A.fourier_block(l), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("eigensolver failed");
  return es.eigenvalues();
}

}  // namespace

double ShellOperator::min_eigenvalue() const {
  double lo = std::numeric_limits<double>::infinity();
  for (auto [l, mult] : distinct_blocks())
    lo = std::min(lo, block_eigenvalues(*this, l).minCoeff());
  return lo;
}

double ShellOperator::max_abs_eigenvalue() const {
  double hi = 0.0;
  for (auto [l, mult] : distinct_blocks())
    hi = std::max(hi, block_eigenvalues(*this, l).cwiseAbs().maxCoeff());
  return hi;
}

ShellGeometry::ShellGeometry(const ShellQuadrature& shell)
    : shell_(shell), m_(shell.n_azimuth), n_orbits_(shell.n_orbits()) {
  if (shell.nodes.empty())
    throw InvalidInput("ShellGeometry: empty shell");
  const int n = n_orbits_;
  const std::size_t total = static_cast<std::size_t>(m_) * n * n;
  q_.resize(total);
  frame_.resize(total);
  for (int d = 0; d < m_; ++d)
    for (int s = 0; s < n; ++s) {
      const std::size_t i = static_cast<std::size_t>(s) * m_;
      for (int s2 = 0; s2 < n; ++s2) {
        const std::size_t j = static_cast<std::size_t>(s2) * m_ + d;
        const std::size_t idx = (static_cast<std::size_t>(d) * n + s) * n + s2;
        q_[idx] = (shell.nodes[i] - shell.nodes[j]).norm();
        const double sw = std::sqrt(shell.weights[i] * shell.weights[j]);
        frame_[idx] = {sw * shell.e1[i].dot(shell.e1[j]), sw * shell.e1[i].dot(shell.e2[j]),
                       sw * shell.e2[i].dot(shell.e1[j]), sw * shell.e2[i].dot(shell.e2[j])};
        q_max_ = std::max(q_max_, q_[idx]);
      }
    }
  q_max_ = std::max(q_max_, 1e-12) * (1.0 + 1e-12);
}

ShellOperator ShellGeometry::assemble(const std::function<double(double)>& kernel,
                                      double prefactor) const {
  const int n = n_orbits_;
  std::vector<Eigen::MatrixXd> C(m_, Eigen::MatrixXd::Zero(2 * n, 2 * n));
  for (int d = 0; d < m_; ++d)
    for (int s = 0; s < n; ++s)
      for (int s2 = 0; s2 < n; ++s2) {
        const std::size_t idx = (static_cast<std::size_t>(d) * n + s) * n + s2;
        const double v = prefactor * kernel(q_[idx]);
        const auto& f = frame_[idx];
        C[d](2 * s, 2 * s2) = v * f[0];
        C[d](2 * s, 2 * s2 + 1) = v * f[1];
        C[d](2 * s + 1, 2 * s2) = v * f[2];
        C[d](2 * s + 1, 2 * s2 + 1) = v * f[3];
      }
  // exact symmetry: C_d = C_{-d}^T
  for (int d = 0; d <= m_ / 2; ++d) {
    const int e = (m_ - d) % m_;
    Eigen::MatrixXd S = 0.5 * (C[d] + C[e].transpose());
    C[d] = S;
    if (e != d)
      C[e] = S.transpose();
  }
  Eigen::VectorXd k(2 * n);
  for (int s = 0; s < n; ++s)
    k(2 * s) = k(2 * s + 1) = shell_.nodes[static_cast<std::size_t>(s) * m_].norm();
  return ShellOperator(std::move(C), std::move(k));
}

void ShellGeometry::accumulate(const KernelTable& table, const std::vector<Eigen::MatrixXd>& W,
                               double prefactor, std::vector<double>& w_value,
                               std::vector<double>& w_slope) const {
  const int n = n_orbits_;
  for (int d = 0; d < m_; ++d)
    for (int s = 0; s < n; ++s)
      for (int s2 = 0; s2 < n; ++s2) {
        const std::size_t idx = (static_cast<std::size_t>(d) * n + s) * n + s2;
        const auto& f = frame_[idx];
        const double c = W[d](2 * s, 2 * s2) * f[0] + W[d](2 * s, 2 * s2 + 1) * f[1] +
                         W[d](2 * s + 1, 2 * s2) * f[2] + W[d](2 * s + 1, 2 * s2 + 1) * f[3];
        table.accumulate(q_[idx], prefactor * c, w_value, w_slope);
      }
}

namespace {

void verify_psd(const ShellOperator& A, const AssemblyOptions& opt, const char* what) {
  if (!opt.verify_psd)
    return;
  const double scale = A.max_abs_eigenvalue();
  const double lo = A.min_eigenvalue();
  if (lo < -opt.psd_tolerance * std::max(scale, 1e-300)) {
    std::ostringstream os;
    os << what << ": minimum eigenvalue " << lo << " below -" << opt.psd_tolerance << " * "
       << scale;
    throw NumericalFailure(os.str());
  }
}

void check_profile_for_assembly(const RadialProfile& phi, const char* what) {
  if (phi.empty())
    throw InvalidInput(std::string(what) + ": empty profile");
}

}  // namespace

KernelTable density_table(const RadialProfile& phi, const RadialTransform& T, double q_max) {
  auto f = T.sample(phi);
  for (auto& x : f)
    x *= x;
  return KernelTable(T, f, q_max);
}

ShellOperator assemble_theta(const RadialProfile& phi, double alpha, const ShellGeometry& geom,
                             const AssemblyOptions& opt) {
  if (!(alpha > 0.0))
    throw InvalidInput("assemble_theta: alpha must be positive");
  check_profile_for_assembly(phi, "assemble_theta");
  // rho = phi^2 is quadratic on each element
  const RadialTransform T(phi.grid(), transform_order(phi.grid(), geom.q_max()) + 1);
  const KernelTable table = density_table(phi, T, geom.q_max());
  const double pre = alpha * std::pow(2.0 * kPi, -1.5);
  ShellOperator A = geom.assemble([&](double q) { return table(q); }, pre);
  verify_psd(A, opt, "assemble_theta");
  return A;
}

ShellOperator assemble_theta(const RadialProfile& phi, double alpha, const ShellQuadrature& shell,
                             const AssemblyOptions& opt) {
  return assemble_theta(phi, alpha, ShellGeometry(shell), opt);
}

ShellOperator main_term_operator(const RadialProfile& phi, const ShellQuadrature& shell,
                                 const AssemblyOptions& opt) {
  check_profile_for_assembly(phi, "main_term_operator");
  const ShellGeometry geom(shell);
  const RadialTransform T(phi.grid(), transform_order(phi.grid(), geom.q_max()));
  const KernelTable table(T, T.sample(phi), geom.q_max());
  ShellOperator A = geom.assemble([&](double q) { return table(q); }, std::pow(2.0 * kPi, -1.5));
  verify_psd(A, opt, "main_term_operator");
  return A;
}

}  // namespace lluv
