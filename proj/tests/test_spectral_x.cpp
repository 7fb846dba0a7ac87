#include "lluv/errors.hpp"
#include "lluv/spectral_x.hpp"
#include <catch_amalgamated.hpp>
#include <cmath>
#include <random>

using namespace lluv;
using Catch::Approx;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd scalar(double v) { return MatrixXd::Constant(1, 1, v); }
VectorXd kvec(double v) { return VectorXd::Constant(1, v); }

RadialProfile gaussian() {
  return normalized(RadialProfile::sample([](double r) { return std::exp(-0.5 * r * r); },
                                          uniform_grid(8.0, 800), 8.0));
}

}  // namespace

TEST_CASE("X closed forms") {
  CHECK(x_of(MatrixXd::Zero(3, 3), VectorXd::Ones(3)).value == 0.0);
  CHECK(x_of(scalar(7.0), kvec(3.0)).value == Approx(1.0).epsilon(1e-15));
  MatrixXd A(2, 2);
  A << 1, 1, 1, 1;
  CHECK(x_of(A, VectorXd::Ones(2)).value == Approx(std::sqrt(3.0) + 1.0 - 2.0).epsilon(1e-14));
}

TEST_CASE("X identity residual") {
  CHECK(x_identity_residual(MatrixXd::Zero(4, 4), VectorXd::Ones(4)) == 0.0);
  CHECK(x_identity_residual(scalar(3.0), kvec(1.0)) <= 1e-15);
  const VectorXd k = VectorXd::LinSpaced(8, 0.5, 2.0);
  for (std::uint64_t s = 1; s <= 5; ++s)
    CHECK(x_identity_residual(random_psd(8, s), k) <= 1e-10);
  const XReport r = x_of(random_psd(8, 9), k);
  CHECK(r.identity_residual <= 1e-10);
  CHECK(r.clamped_count == 0);
}

TEST_CASE("X property suite") {
  const PropertyReport r = x_property_suite(12345, 24, 100);
  CHECK(r.trials == 100);
  CHECK(r.ok());
  // B = 0 gives equality in monotonicity
  const MatrixXd A = random_psd(6, 3);
  const VectorXd k = VectorXd::Constant(6, 1.1);
  CHECK(x_of(A + MatrixXd::Zero(6, 6), k).value == x_of(A, k).value);
  // A = B: X(2A) <= 2 X(A)
  CHECK(x_of(2.0 * A, k).value <= 2.0 * x_of(A, k).value + 1e-12);
}

TEST_CASE("lower bound margin") {
  const double m = x_lower_bound_check(scalar(4.0), kvec(1.0), 0.5, 1.0);
  CHECK(m == Approx((std::sqrt(5.0) - 1.0) - (2.0 - 2.0 * std::sqrt(2.0))).epsilon(1e-14));
  CHECK(x_lower_bound_check(MatrixXd::Zero(3, 3), VectorXd::Ones(3), 0.5, 1.0) ==
        Approx(0.0).margin(1e-15));
  for (double p : {0.5, 0.75})
    for (std::uint64_t s = 1; s <= 10; ++s)
      CHECK(x_lower_bound_check(random_psd(16, s, 5.0), VectorXd::LinSpaced(16, 0.1, 2.0), p,
                                2.0) >= 0.0);
}

TEST_CASE("directional derivative against finite differences") {
  CHECK(x_directional_derivative(scalar(3.0), MatrixXd::Zero(1, 1), kvec(1.0)) == 0.0);
  CHECK(x_directional_derivative(scalar(3.0), scalar(1.0), kvec(1.0)) ==
        Approx(0.25).epsilon(1e-15));
  std::mt19937_64 g(42);
  std::normal_distribution<double> n;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const int dim = 12;
    const MatrixXd A = random_psd(dim, s, 2.0);
    MatrixXd H(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        H(i, j) = n(g);
    H = 0.5 * (H + H.transpose()).eval();
    const VectorXd k = VectorXd::LinSpaced(dim, 0.5, 2.0);
    const double t = 1e-5;
    const double fd = (x_of(A + t * H, k, {false}).value - x_of(A - t * H, k, {false}).value) / (2 * t);
    const double an = x_directional_derivative(A, H, k);
    CHECK(std::abs(fd - an) <= 1e-5 * std::abs(an));
  }
}

TEST_CASE("circulant X matches the dense path") {
  const ShellQuadrature shell = build_shell(0.0, 3.0, 4, 3);
  const ShellOperator A = assemble_theta(gaussian(), 2.0, shell);
  const XReport c = x_of(A);
  const XReport d = x_of(A.dense(), A.k_diag());
  CHECK(c.value == Approx(d.value).epsilon(1e-12));
  CHECK(c.identity_residual <= 1e-9);
  CHECK(trace_sqrt(A) >= c.value);

  // gradient family against the directional derivative
  const XGradient g = x_with_gradient(A);
  CHECK(g.report.value == Approx(c.value).epsilon(1e-12));
  const ShellOperator H = assemble_theta(gaussian(), 1.0, shell);
  double tr = 0.0;
  for (std::size_t dd = 0; dd < g.inv_sqrt.size(); ++dd)
    tr += (g.inv_sqrt[dd].transpose() * H.circulant()[dd]).trace();
  tr *= 0.5 * static_cast<double>(g.inv_sqrt.size());
  CHECK(tr == Approx(x_directional_derivative(A, H)).epsilon(1e-10));
}

TEST_CASE("effective energy") {
  const ShellQuadrature shell = build_shell(0.0, 3.0, 4, 4);
  const RadialProfile phi = gaussian();
  const double kin = 0.5 * eval_norms(phi).grad2;
  CHECK(effective_energy(phi, 1e-14, shell) == Approx(kin).epsilon(1e-12));
  double prev = kin;
  for (double a : {0.1, 0.5, 1.0, 4.0}) {
    const double e = effective_energy(phi, a, shell);
    CHECK(e >= prev);
    prev = e;
  }
  CHECK(effective_energy(phi, 1.0, shell) == effective_energy(phi, 1.0, shell));
}

TEST_CASE("gap terms") {
  const ShellQuadrature shell = build_shell(0.0, 3.0, 4, 4);
  const GapTerms g = gap_terms(gaussian(), 1.0, shell, 0.5, 8.0, 0.2);
  CHECK(g.upper_sigma == 0.0);
  CHECK(g.gap == Approx(g.half_x - 0.2 * g.l1).epsilon(1e-14));
  CHECK(g.upper_eps > 0.0);
  CHECK(g.lower > 0.0);
}
