#include "lluv/errors.hpp"
#include "lluv/momentum_shell.hpp"
#include "lluv/radial_profile.hpp"
#include <catch_amalgamated.hpp>
#include <Eigen/Geometry>
#include <cmath>
#include <numbers>

using namespace lluv;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
const double kTwoPi32 = std::pow(2.0 * kPi, -1.5);

RadialProfile gaussian(double L = 8.0, int cells = 2000) {
  return RadialProfile::sample([](double r) { return std::exp(-0.5 * r * r); },
                               uniform_grid(L, cells), L);
}

}  // namespace

TEST_CASE("shell volumes") {
  CHECK(build_shell(0.0, 1.0).volume() == Approx(4.0 * kPi / 3.0).epsilon(2e-3));
  CHECK(build_shell(0.5, 1.0).volume() == Approx(4.0 * kPi / 3.0 * 0.875).epsilon(2e-3));
  double prev = 1e300;
  for (int n : {4, 6, 8}) {
    const double err = std::abs(build_shell(0.5, 3.0, n, 4).volume() - 4.0 * kPi / 3.0 * (27.0 - 0.125));
    CHECK(err <= std::max(prev, 1e-12));
    prev = err;
  }
}

TEST_CASE("shell frames are transverse and orthonormal") {
  const ShellQuadrature s = build_shell(0.0, 4.0);
  CHECK(s.max_transversality_error() <= 1e-12);
  for (std::size_t j = 0; j < s.nodes.size(); j += 37) {
    CHECK(std::abs(s.e1[j].norm() - 1.0) <= 1e-12);
    CHECK(std::abs(s.e2[j].norm() - 1.0) <= 1e-12);
    CHECK(std::abs(s.e1[j].dot(s.e2[j])) <= 1e-12);
  }
  const auto [a, b] = transverse_frame(Eigen::Vector3d(0, 0, 2));
  CHECK(std::abs(a.dot(b)) <= 1e-15);
  CHECK(std::abs(a.z()) <= 1e-15);
}

TEST_CASE("shell argument errors") {
  CHECK_THROWS_AS(build_shell(2.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(build_shell(0.0, 1.0, 12, 1), InvalidInput);
  CHECK_THROWS_AS(build_shell(0.0, 1.0, 12, 65), InvalidInput);
}

TEST_CASE("radial fourier transform") {
  const auto g = radial_fourier(gaussian(10.0, 8000), 8.0);
  double worst = 0.0;
  for (double q = 0.0; q <= 5.0; q += 0.05)
    worst = std::max(worst, std::abs(g(q) - std::exp(-0.5 * q * q)));
  CHECK(worst < 1e-6);

  // ball indicator with a very short ramp at the edge
  const double R = 1.3;
  std::vector<double> grid = uniform_grid(R, 2000);
  grid.push_back(R + 1e-7);
  std::vector<double> vals(grid.size(), 1.0);
  vals.back() = 0.0;
  const RadialProfile ball(grid, vals, R + 1e-7);
  const auto b = radial_fourier(ball, 10.0);
  for (double q : {0.3, 1.0, 2.5, 6.0}) {
    const double exact = kTwoPi32 * 4.0 * kPi * (std::sin(q * R) - q * R * std::cos(q * R)) / (q * q * q);
    CHECK(b(q) == Approx(exact).margin(1e-6));
  }
  const RadialProfile phi = gaussian(3.0, 300);
  CHECK(radial_fourier(phi)(0.0) == Approx(kTwoPi32 * eval_norms(phi).l1).epsilon(1e-12));
}

TEST_CASE("theta assembly") {
  const ShellQuadrature shell = build_shell(0.0, 4.0, 8, 6);
  const RadialProfile phi = normalized(gaussian());
  const double vol = shell.volume();

  const ShellOperator t1 = assemble_theta(phi, 1.0, shell);
  CHECK(t1.symmetry_error() <= 1e-12);
  CHECK(t1.trace() == Approx(2.0 * std::pow(2.0 * kPi, -3.0) * vol).epsilon(5e-3));
  CHECK(t1.min_eigenvalue() >= -1e-8 * t1.max_abs_eigenvalue());

  const ShellOperator t2 = assemble_theta(phi, 2.0, shell);
  for (std::size_t d = 0; d < t1.circulant().size(); ++d)
    CHECK((t2.circulant()[d] - 2.0 * t1.circulant()[d]).cwiseAbs().maxCoeff() <=
          1e-14 * (1.0 + t1.circulant()[d].cwiseAbs().maxCoeff()));

  const RadialProfile zero(uniform_grid(2.0, 4), std::vector<double>(5, 0.0), 2.0);
  CHECK(assemble_theta(zero, 1.0, shell).trace() == 0.0);
  CHECK(main_term_operator(zero, shell).trace() == 0.0);

  const double l1 = eval_norms(phi).l1;
  CHECK(main_term_operator(phi, shell).trace() ==
        Approx(2.0 * std::pow(2.0 * kPi, -3.0) * l1 * vol).epsilon(5e-3));
}

TEST_CASE("circulant and dense forms agree") {
  const ShellQuadrature shell = build_shell(0.0, 2.0, 4, 3);
  const ShellOperator A = assemble_theta(normalized(gaussian()), 1.0, shell);
  const ShellOperator D = ShellOperator::from_dense(A.dense(), A.k_diag());
  CHECK(D.trace() == Approx(A.trace()).epsilon(1e-13));
  CHECK(D.min_eigenvalue() == Approx(A.min_eigenvalue()).margin(1e-12));
  CHECK((A.dense() - A.dense().transpose()).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("rotated shells give the same traces") {
  const ShellQuadrature shell = build_shell(0.0, 3.0, 4, 4);
  const Eigen::Matrix3d R =
      Eigen::AngleAxisd(0.7, Eigen::Vector3d(1.0, 2.0, -0.5).normalized()).toRotationMatrix();
  const RadialProfile phi = normalized(gaussian());
  const ShellOperator a = assemble_theta(phi, 1.0, shell);
  const ShellOperator b = assemble_theta(phi, 1.0, shell.rotated(R));
  CHECK(b.trace() == Approx(a.trace()).epsilon(1e-10));
  const Eigen::MatrixXd ad = a.dense(), bd = b.dense();
  CHECK((ad * ad).trace() == Approx((bd * bd).trace()).epsilon(1e-10));
}

TEST_CASE("kernel table interpolates the transform") {
  const RadialProfile phi = normalized(gaussian(6.0, 300));
  const RadialTransform T(phi.grid(), transform_order(phi.grid(), 8.0));
  const std::vector<double> f = T.sample(phi);
  const KernelTable table(T, f, 8.0);
  for (double q : {0.0, 0.37, 2.2, 7.9})
    CHECK(table(q) == Approx(T(f, q)).margin(1e-9));
}
