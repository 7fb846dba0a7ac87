#include "lluv/asymptotics.hpp"
#include "lluv/errors.hpp"
#include <catch_amalgamated.hpp>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

using namespace lluv;
using Catch::Approx;

namespace {

const ShellConfig kSmall{4, 4};

}  // namespace

TEST_CASE("schedule values") {
  for (auto side : {ScheduleSide::upper, ScheduleSide::lower}) {
    const Schedule s = schedule(1.0, 1.0, side);
    CHECK(s.eps == 1.0);
    CHECK(s.delta == 1.0);
    CHECK(s.L == 1.0);
  }
  const Schedule u = schedule(1.0, 128.0, ScheduleSide::upper);
  CHECK(u.eps == Approx(std::pow(2.0, -4.0 / 15.0)).epsilon(1e-14));
  CHECK(u.delta == u.eps);
  CHECK(u.L == Approx(std::pow(2.0, -88.0 / 15.0)).epsilon(1e-14));
  CHECK(u.eps == Approx(0.831).margin(5e-4));
  CHECK(u.L == Approx(0.0171).margin(5e-5));
  const Schedule l = schedule(1.0, 128.0, ScheduleSide::lower);
  CHECK(l.delta == Approx(std::pow(2.0, -4.0 / 7.0)).epsilon(1e-14));
  CHECK(l.L == Approx(std::pow(2.0, -40.0 / 7.0)).epsilon(1e-14));
  // clamping
  CHECK(schedule(1e6, 2.0, ScheduleSide::upper).eps == 1.0);
  CHECK(schedule(1e-9, 1.0, ScheduleSide::upper).L >= 1.0);
  CHECK_THROWS_AS(schedule(1.0, 0.5, ScheduleSide::upper), InvalidInput);
}

TEST_CASE("schedule error monomials coincide") {
  for (auto side : {ScheduleSide::upper, ScheduleSide::lower}) {
    const auto m = schedule_error_monomials(side);
    CHECK(m[0] == m[1]);
    CHECK(m[1] == m[2]);
  }
}

TEST_CASE("power fits") {
  std::vector<double> x{1, 2, 4, 8}, y;
  for (double v : x)
    y.push_back(3.0 * std::pow(v, 1.7));
  const PowerFit f = fit_power(x, y);
  CHECK(f.exponent == Approx(1.7).epsilon(1e-13));
  CHECK(f.prefactor == Approx(3.0).epsilon(1e-13));
  CHECK(f.ci95 <= 1e-10);
  CHECK_THROWS_AS(fit_power({1.0}, {1.0}), InvalidInput);
  CHECK_THROWS_AS(fit_power({1.0, 2.0}, {1.0, -1.0}), InvalidInput);
}

TEST_CASE("exponent report on synthetic records") {
  std::vector<SweepRecord> recs;
  auto add = [&](double a, double l) {
    SweepRecord r;
    r.alpha = a;
    r.lambda = l;
    r.beta_paper = beta_paper(a, l);
    r.beta_emp = r.beta_paper;
    r.e_ll = std::pow(r.beta_paper, 4.0 / 7.0);
    r.ratio_emp = r.ratio_paper = 1.0;
    recs.push_back(r);
  };
  for (double l : {4.0, 8.0, 16.0, 32.0})
    add(1.0, l);
  for (double a : {0.25, 0.5, 2.0})
    add(a, 8.0);
  const double tp = std::pow(2.0 * std::numbers::pi, -3.0);
  const ExponentReport rep = exponent_report(recs, tp);
  REQUIRE(rep.lambda_fit);
  REQUIRE(rep.alpha_fit);
  CHECK(rep.lambda_fit->exponent == Approx(12.0 / 7.0).epsilon(1e-13));
  CHECK(rep.alpha_fit->exponent == Approx(2.0 / 7.0).epsilon(1e-13));
  CHECK(rep.lambda_fit_alpha == 1.0);
  CHECK(rep.alpha_fit_lambda == 8.0);
  CHECK(rep.convention.main_verdict == "(2pi)^-3");
  CHECK(rep.convention.c_conv_beta_spread == Approx(0.0).margin(1e-14));
  CHECK(exponent_report(recs, 1.02).convention.main_verdict == "1");
  CHECK(exponent_report(recs, 0.5).convention.main_verdict == "neither");
}

TEST_CASE("beta measurement scaling in the large-coupling regime") {
  const double a = 1e7;
  const BetaMeasurement m1 = measure_beta(a, 4.0, 0.0, ShellConfig{});
  const BetaMeasurement m4 = measure_beta(4.0 * a, 4.0, 0.0, ShellConfig{});
  const BetaMeasurement l8 = measure_beta(a, 8.0, 0.0, ShellConfig{});
  CHECK(std::abs(m4.beta_emp / m1.beta_emp - 2.0) <= 0.04);
  CHECK(std::abs(l8.beta_emp / m1.beta_emp - 8.0) <= 0.4);
  CHECK(m1.c_conv == Approx(m1.beta_emp / beta_paper(a, 4.0)).epsilon(1e-14));
  CHECK(std::abs(l8.c_conv / m1.c_conv - 1.0) <= 0.1);
}

TEST_CASE("main-term convention factor") {
  const double tp = std::pow(2.0 * std::numbers::pi, -3.0);
  for (double L : {2.0, 4.0, 8.0}) {
    const ShellQuadrature shell = build_shell(0.0, L);
    CHECK(main_term_convention(reference_profile(L, 8.0), shell) == Approx(tp).epsilon(5e-3));
  }
}

TEST_CASE("LL energy gradient") {
  const ShellQuadrature shell = build_shell(0.0, 4.0, 4, 4);
  const LLEnergy E(1.0, 0.5, 8, shell);
  std::vector<double> c{1.0, 0.95, 0.85, 0.7, 0.55, 0.35, 0.2, 0.08};
  std::vector<double> g;
  const double v = E.value_and_gradient(c, g);
  CHECK(v == Approx(E.value(c)).epsilon(1e-12));
  double dot = 0.0;
  for (int p = 0; p < E.size(); ++p) {
    auto cp = c, cm = c;
    const double h = 1e-6;
    cp[p] += h;
    cm[p] -= h;
    const double fd = (E.value(cp) - E.value(cm)) / (2 * h);
    CHECK(g[p] == Approx(fd).epsilon(1e-5).margin(1e-6));
    dot += g[p] * c[p];
  }
  // scale invariance
  CHECK(dot == Approx(0.0).margin(1e-8 * v));
  auto c2 = c;
  for (auto& x : c2)
    x *= 3.0;
  CHECK(E.value(c2) == Approx(v).epsilon(1e-12));
}

TEST_CASE("minimize_ll descends and respects the constraint") {
  const double L = schedule(1.0, 4.0, ScheduleSide::upper).L;
  for (auto method : {LLMethod::gradient, LLMethod::simplex}) {
    LLConfig cfg;
    cfg.basis_size = 8;
    cfg.method = method;
    const LLResult r = minimize_ll(1.0, 4.0, 0.0, L, kSmall, cfg);
    CHECK(r.e_ll <= r.initial_energy);
    for (std::size_t i = 1; i < r.history.size(); ++i)
      CHECK(r.history[i] <= r.history[i - 1]);
    CHECK(r.phi.support_radius() == Approx(L));
    CHECK(eval_norms(r.phi).l2 == Approx(1.0).epsilon(1e-10));
    for (double x : r.phi.values())
      CHECK(x >= 0.0);
  }
  CHECK_THROWS_AS(minimize_ll(1.0, 4.0, 0.0, 0.1, kSmall, LLConfig{}), InvalidInput);
}

TEST_CASE("minimize_ll at vanishing coupling reaches the grid kinetic minimum") {
  const double L = 1.0;
  LLConfig cfg;
  cfg.basis_size = 10;
  cfg.max_iterations = 100;
  cfg.tolerance = 1e-12;
  const LLResult r = minimize_ll(1e-12, 4.0, 0.0, L, kSmall, cfg, 1.0);

  // lowest generalized eigenvalue of the P1 stiffness/mass pair
  const P1Forms f = assemble_p1(uniform_grid(L, cfg.basis_size));
  const int n = static_cast<int>(f.k_diag.size());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n), M = K;
  for (int i = 0; i < n; ++i) {
    K(i, i) = f.k_diag[i];
    M(i, i) = f.m_diag[i];
    if (i + 1 < n) {
      K(i, i + 1) = K(i + 1, i) = f.k_off[i];
      M(i, i + 1) = M(i + 1, i) = f.m_off[i];
    }
  }
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
  CHECK(r.e_ll == Approx(0.5 * es.eigenvalues()(0)).epsilon(1e-7));
  CHECK(r.e_ll > 0.0);
}

TEST_CASE("ratio sweep is deterministic and ordered") {
  SweepConfig cfg;
  cfg.shell = kSmall;
  cfg.optimizer.basis_size = 6;
  cfg.f.grid_cells = 400;
  cfg.seed = 7;
  const std::vector<std::pair<double, double>> grid{{1.0, 4.0}, {1.0, 8.0}};
  const auto a = ratio_sweep(grid, cfg);
  cfg.workers = 2;
  const auto b = ratio_sweep(grid, cfg);
  REQUIRE(a.size() == 2);
  CHECK(a == b);
  CHECK(a[0].lambda == 4.0);
  CHECK(a[1].lambda == 8.0);
  for (const auto& r : a) {
    CHECK(r.e_ll > 0.0);
    CHECK(r.ratio_emp > 0.0);
    CHECK(r.runtime_s == 0.0);
    CHECK(r.seed == 7);
    CHECK(r.f_pred == Approx(minimize_F(1.0, cfg.f).value * std::pow(r.beta_emp, 4.0 / 7.0)));
  }
}

TEST_CASE("F-side localization law") {
  const double R = bessel_minimizer(1.0).support_radius;
  const LocalizationFit f = localization_sweep_F(1.0, {0.1 * R, 0.14 * R, 0.2 * R, 0.28 * R, 1.5 * R}, {});
  CHECK(f.nested);
  CHECK(f.q >= 1.5);
  CHECK(f.q <= 2.5);
  CHECK_THROWS_AS(localization_sweep_F(1.0, {1.0, 2.0}, {}), InvalidInput);
}
