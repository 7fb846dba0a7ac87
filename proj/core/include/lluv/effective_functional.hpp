#pragma once
#include "lluv/radial_profile.hpp"
#include <optional>
#include <vector>

namespace lluv {

// F_beta(phi) = 1/2 |grad phi|^2 + beta |phi|_1 for normalized phi.
double eval_F(const RadialProfile& phi, double beta);

// First positive root of tan x = x (stationary point of j0), by bisection.
double first_j0_stationary_point();

// Closed-form minimizer phi(r) = C (1 - j0(mu r)/j0(x1)) on [0, R], R = x1/mu.
struct BesselMinimizer {
  double beta = 0.0;
  double x1 = 0.0;
  double mu = 0.0;
  double amplitude = 0.0;  // C = beta / mu^2
  double support_radius = 0.0;

  double value(double r) const;
  double derivative(double r) const;
  // F_beta of the analytic profile, by Gauss-Legendre quadrature.
  double energy() const;
  double l1() const;
  double grad2() const;
  double l2() const;
  // sup |(-Lap - mu^2) phi + beta| on interior points, Laplacian by
  // fourth-order finite differences of the analytic profile
  double euler_lagrange_residual(int n_points = 200) const;
  RadialProfile sample(int cells) const;
};

BesselMinimizer bessel_minimizer(double beta);

struct FMinConfig {
  int grid_cells = 2000;
  // radius of the unconstrained search ball, in units of beta^{-2/7}
  double support_cap = 3.0;
  int max_iterations = 20000;
  // stop when the predicted decrease along the search direction is below tolerance * |F|
  double tolerance = 1e-11;
  std::optional<RadialProfile> initial;
};

struct FMinResult {
  double value = 0.0;
  RadialProfile argmin;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // energy after every accepted step, starting value first
};

FMinResult minimize_F(double beta, const FMinConfig& cfg = {});

// Same minimization with phi(r) = 0 for r >= L; the grid spacing matches
// the one minimize_F would use for this beta.
FMinResult restricted_F(double beta, double L, const FMinConfig& cfg = {});

}  // namespace lluv
