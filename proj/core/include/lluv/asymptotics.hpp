#pragma once
#include "lluv/effective_functional.hpp"
#include "lluv/momentum_shell.hpp"
#include "lluv/radial_profile.hpp"
#include "lluv/spectral_x.hpp"
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lluv {

enum class ScheduleSide { upper, lower };

struct Schedule {
  double eps = 1.0;
  double delta = 1.0;
  double L = 1.0;
};

// upper: eps = delta = (alpha/Lambda)^{4/105}, L = alpha^{-17/105} Lambda^{-88/105}
// lower: delta = (alpha/Lambda)^{4/49},        L = alpha^{-9/49} Lambda^{-40/49}
// eps, delta clamped to (0, 1], L to >= 1/Lambda.
Schedule schedule(double alpha, double Lambda, ScheduleSide side);

// Exponents (r, t) as numerators over the common denominator (105 or 49).
struct ScheduleExponents {
  long r, t, den;
};
ScheduleExponents schedule_exponents(ScheduleSide side);
// The three error monomials of the schedule, as numerators over den; all
// three agree for the chosen exponents.
std::array<long, 3> schedule_error_monomials(ScheduleSide side);

double beta_paper(double alpha, double Lambda);

struct ShellConfig {
  int n_radial = kDefaultRadialOrder;
  int n_angular = kDefaultAngularOrder;
};

enum class LLMethod { gradient, simplex };

struct LLConfig {
  int basis_size = 12;
  int max_iterations = 40;
  double tolerance = 1e-7;  // relative predicted decrease at which descent stops
  LLMethod method = LLMethod::gradient;
  // support of the measure_beta reference profile, in units of 1/Lambda
  double reference_extent = 8.0;
};

struct BetaMeasurement {
  double beta_emp = 0.0;
  double beta_paper = 0.0;
  double c_conv = 0.0;  // beta_emp / beta_paper
  double half_x = 0.0;
  double l1 = 0.0;
};

// Bessel-shaped reference profile with support extent / Lambda.
RadialProfile reference_profile(double Lambda, double extent, int cells = 64);

BetaMeasurement measure_beta(double alpha, double Lambda, double sigma, const ShellConfig& shell,
                             double reference_extent = 8.0);

// Energy of P1 profiles on a fixed coarse grid over [0, L] with the value
// at L held at zero.  Coefficients need not be normalized.
class LLEnergy {
 public:
  LLEnergy(double alpha, double L, int basis_size, const ShellQuadrature& shell);

  int size() const { return n_; }
  const std::vector<double>& grid() const { return grid_; }
  const P1Forms& forms() const { return forms_; }
  const ShellGeometry& geometry() const { return geom_; }

  RadialProfile profile(const std::vector<double>& c) const;
  double value(const std::vector<double>& c, XReport* report = nullptr) const;
  // value and gradient with respect to c
  double value_and_gradient(const std::vector<double>& c, std::vector<double>& grad,
                            XReport* report = nullptr) const;
  // coefficients interpolating phi at the free nodes
  std::vector<double> coefficients(const RadialProfile& phi) const;

 private:
  double alpha_;
  double L_;
  int n_;
  std::vector<double> grid_;
  P1Forms forms_;
  ShellGeometry geom_;
  RadialTransform transform_;
  // element index and local coordinate of each quadrature point
  std::vector<std::pair<int, double>> where_;
};

struct LLResult {
  double e_ll = 0.0;
  double initial_energy = 0.0;
  RadialProfile phi;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<double> history;
  XReport x;
};

// Minimizes the effective energy over profiles supported in [0, L].
// beta_hint seeds the Bessel initial guess; measured when absent.
LLResult minimize_ll(double alpha, double Lambda, double sigma, double L, const ShellConfig& shell,
                     const LLConfig& cfg, std::optional<double> beta_hint = std::nullopt,
                     std::optional<RadialProfile> initial = std::nullopt);

struct SweepRecord {
  double alpha = 0.0, lambda = 0.0, sigma = 0.0;
  double L = 0.0, eps = 0.0, delta = 0.0;
  int n_radial = 0, n_angular = 0;
  double e_ll = 0.0;
  double beta_emp = 0.0, beta_paper = 0.0;
  double f_pred = 0.0;
  double ratio_emp = 0.0, ratio_paper = 0.0;
  double runtime_s = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const SweepRecord&) const = default;
};

struct SweepConfig {
  double sigma = 0.0;
  ShellConfig shell;
  LLConfig optimizer;
  FMinConfig f;
  ScheduleSide side = ScheduleSide::upper;
  int workers = 1;
  bool record_runtime = false;
  std::uint64_t seed = 0;
  std::function<void(const std::string&)> progress;
};

// F^[1] from minimize_F, computed once per call.
std::vector<SweepRecord> ratio_sweep(const std::vector<std::pair<double, double>>& grid,
                                     const SweepConfig& cfg);

struct PowerFit {
  double exponent = 0.0;   // slope of log y against log x
  double prefactor = 0.0;  // exp(intercept)
  double stderr_slope = 0.0;
  double ci95 = 0.0;  // half width
  int points = 0;
};

PowerFit fit_power(const std::vector<double>& x, const std::vector<double>& y);

struct LocalizationFit {
  std::vector<double> L;
  std::vector<double> energies;
  bool nested = false;  // energies nonincreasing in L
  double q = 0.0;       // gap ~ c L^{-q}
  double c = 0.0;
  PowerFit fit;
};

// E^(L) for every rung; the gap to the largest rung is fitted on the others.
LocalizationFit localization_sweep(double alpha, double Lambda, std::vector<double> ladder,
                                   const SweepConfig& cfg);
LocalizationFit localization_sweep_F(double beta, std::vector<double> ladder,
                                     const FMinConfig& cfg);

struct ConventionReport {
  double c_conv_main = 0.0;  // Tr(main term) / ((8 pi / 3)(Lambda^3 - sigma^3) |phi|_1)
  double c_conv_beta_mean = 0.0;
  double c_conv_beta_spread = 0.0;  // (max - min) / mean
  double mean_abs_dev_emp = 0.0;    // mean |ratio_emp - 1|
  double mean_abs_dev_paper = 0.0;  // mean |ratio_paper - 1|
  std::string main_verdict;         // "1", "(2pi)^-3" or "neither"
  std::string closer;               // "beta_emp" or "beta_paper"
};

double main_term_convention(const RadialProfile& phi, const ShellQuadrature& shell);

struct ExponentReport {
  std::optional<PowerFit> lambda_fit;  // at the alpha with most records
  double lambda_fit_alpha = 0.0;
  std::optional<PowerFit> alpha_fit;  // at the Lambda with most records
  double alpha_fit_lambda = 0.0;
  ConventionReport convention;
};

ExponentReport exponent_report(const std::vector<SweepRecord>& records,
                               std::optional<double> c_conv_main = std::nullopt);

}  // namespace lluv
