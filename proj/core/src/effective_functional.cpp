#include "lluv/effective_functional.hpp"
#include "lluv/errors.hpp"
#include "lluv/quadrature.hpp"
#include <algorithm>
#include <cmath>
#include <numbers>

namespace lluv {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

// tolerance on the unit-norm precondition
constexpr double kNormTolerance = 1e-6;

}  // namespace

double eval_F(const RadialProfile& phi, double beta) {
  if (!(beta >= 0.0))
    throw InvalidInput("eval_F: beta must be nonnegative");
  const Norms n = eval_norms(phi);
  if (std::abs(n.l2 - 1.0) > kNormTolerance)
    throw InvalidInput("eval_F: profile is not normalized (|phi|_2 = " + std::to_string(n.l2) +
                       ")");
  return 0.5 * n.grad2 + beta * n.l1;
}

double first_j0_stationary_point() {
  // j0'(x) = 0  <=>  sin x - x cos x = 0, sign change on (pi, 3pi/2)
  auto h = [](double x) { return std::sin(x) - x * std::cos(x); };
  double lo = std::numbers::pi, hi = 1.5 * std::numbers::pi;
  double hlo = h(lo), hhi = h(hi);
  if (!(hlo > 0.0 && hhi < 0.0))
    throw NumericalFailure("first_j0_stationary_point: root not bracketed");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double hm = h(mid);
    if (hm > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

// integral of f over [0, x1] with a composite 4 x 32-point rule
template <class F>
double integrate_bessel(double x1, F f) {
  double s = 0.0;
  const int panels = 4;
  for (int p = 0; p < panels; ++p) {
    const auto rule = gauss_legendre(32, x1 * p / panels, x1 * (p + 1) / panels);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      s += rule.weights[i] * f(rule.nodes[i]);
  }
  return s;
}

}  // namespace

BesselMinimizer bessel_minimizer(double beta) {
  if (!(beta > 0.0))
    throw InvalidInput("bessel_minimizer: beta must be positive");
  BesselMinimizer b;
  b.beta = beta;
  b.x1 = first_j0_stationary_point();
  const double j1 = sph_j0(b.x1);
  // |phi|_2^2 = C^2 I / mu^3 with C = beta / mu^2
  const double I = kFourPi * integrate_bessel(b.x1, [&](double s) {
                     const double c = 1.0 - sph_j0(s) / j1;
                     return s * s * c * c;
                   });
  b.mu = std::pow(beta * beta * I, 1.0 / 7.0);
  b.amplitude = beta / (b.mu * b.mu);
  b.support_radius = b.x1 / b.mu;
  return b;
}

double BesselMinimizer::value(double r) const {
  if (r < 0.0 || r >= support_radius)
    return 0.0;
  return amplitude * (1.0 - sph_j0(mu * r) / sph_j0(x1));
}

double BesselMinimizer::derivative(double r) const {
  if (r < 0.0 || r >= support_radius)
    return 0.0;
  return -amplitude * mu * sph_j0_prime(mu * r) / sph_j0(x1);
}

double BesselMinimizer::l1() const {
  const double j1 = sph_j0(x1);
  const double s = integrate_bessel(x1, [&](double x) { return x * x * (1.0 - sph_j0(x) / j1); });
  return kFourPi * amplitude * s / (mu * mu * mu);
}

double BesselMinimizer::l2() const {
  const double j1 = sph_j0(x1);
  const double s = integrate_bessel(x1, [&](double x) {
    const double c = 1.0 - sph_j0(x) / j1;
    return x * x * c * c;
  });
  return std::sqrt(kFourPi * amplitude * amplitude * s / (mu * mu * mu));
}

double BesselMinimizer::grad2() const {
  const double j1 = sph_j0(x1);
  const double s = integrate_bessel(x1, [&](double x) {
    const double d = sph_j0_prime(x) / j1;
    return x * x * d * d;
  });
  return kFourPi * amplitude * amplitude * s / mu;
}

double BesselMinimizer::energy() const { return 0.5 * grad2() + beta * l1(); }

double BesselMinimizer::euler_lagrange_residual(int n_points) const {
  if (n_points < 2)
    throw InvalidInput("euler_lagrange_residual: need at least two points");
  const double R = support_radius;
  const double d = 1e-3 * R / (1.0 + n_points / 500.0);
  double worst = 0.0;
  for (int k = 1; k <= n_points; ++k) {
    const double r = R * k / (n_points + 1.0);
    const double f0 = value(r);
    const double fp1 = value(r + d), fm1 = value(r - d);
    const double fp2 = value(r + 2 * d), fm2 = value(r - 2 * d);
    const double d1 = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * d);
    const double d2 = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * d * d);
    const double lap = d2 + 2.0 * d1 / r;
    worst = std::max(worst, std::abs(-lap - mu * mu * f0 + beta));
  }
  return worst;
}

RadialProfile BesselMinimizer::sample(int cells) const {
  return RadialProfile::sample([this](double r) { return value(r); },
                               uniform_grid(support_radius, cells), support_radius);
}

namespace {

using Vec = std::vector<double>;

// y = T x for symmetric tridiagonal T
void tri_mul(const Vec& diag, const Vec& off, const Vec& x, Vec& y) {
  const std::size_t n = diag.size();
  y.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * x[i];
    if (i > 0)
      s += off[i - 1] * x[i - 1];
    if (i + 1 < n)
      s += off[i] * x[i + 1];
    y[i] = s;
  }
}

// Thomas algorithm for symmetric positive definite tridiagonal T x = b
Vec tri_solve(const Vec& diag, const Vec& off, Vec b) {
  const std::size_t n = diag.size();
  Vec c(n, 0.0), d = diag;
  for (std::size_t i = 1; i < n; ++i) {
    const double m = off[i - 1] / d[i - 1];
    d[i] -= m * off[i - 1];
    b[i] -= m * b[i - 1];
  }
  Vec x(n);
  x[n - 1] = b[n - 1] / d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    x[i] = (b[i] - off[i] * x[i + 1]) / d[i];
  return x;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

struct GridProblem {
  Vec grid;
  P1Forms forms;
  double beta;

  double energy(const Vec& u) const {
    Vec ku;
    tri_mul(forms.k_diag, forms.k_off, u, ku);
    return 0.5 * dot(u, ku) + beta * dot(forms.load, u);
  }
  double mass_norm(const Vec& u) const {
    Vec mu;
    tri_mul(forms.m_diag, forms.m_off, u, mu);
    return std::sqrt(std::max(0.0, dot(u, mu)));
  }
  // clamp to >= 0, then rescale to unit L2 norm
  bool project(Vec& u) const {
    for (auto& x : u)
      x = std::max(0.0, x);
    const double n = mass_norm(u);
    if (!(n > 0.0))
      return false;
    for (auto& x : u)
      x /= n;
    return true;
  }
  RadialProfile profile(const Vec& u) const {
    Vec v(grid.size(), 0.0);
    std::copy(u.begin(), u.end(), v.begin());
    return RadialProfile(grid, std::move(v), grid.back());
  }
};

FMinResult descend(const GridProblem& P, Vec u, const FMinConfig& cfg) {
  const auto& f = P.forms;
  const std::size_t n = u.size();
  if (!P.project(u))
    throw InvalidInput("minimize_F: initial guess vanishes on the grid");
  FMinResult res;
  double E = P.energy(u);
  res.history.push_back(E);
  double t = 1.0;
  Vec g(n), mu_(n), pd(n), trial(n);
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    res.iterations = it;
    Vec ku;
    tri_mul(f.k_diag, f.k_off, u, ku);
    for (std::size_t i = 0; i < n; ++i)
      g[i] = ku[i] + P.beta * f.load[i];
    tri_mul(f.m_diag, f.m_off, u, mu_);
    const double lam = std::max(dot(u, g), 1e-12);
    // Sobolev preconditioner K + lam M
    for (std::size_t i = 0; i < n; ++i)
      pd[i] = f.k_diag[i] + lam * f.m_diag[i];
    Vec po(f.k_off.size());
    for (std::size_t i = 0; i < po.size(); ++i)
      po[i] = f.k_off[i] + lam * f.m_off[i];
    // free set: positive nodes and zero nodes the gradient pushes upward
    std::vector<std::size_t> S;
    for (std::size_t i = 0; i < n; ++i)
      if (u[i] > 0.0 || g[i] - lam * mu_[i] < 0.0)
        S.push_back(i);
    const std::size_t m = S.size();
    Vec sd(m), so(m > 0 ? m - 1 : 0, 0.0), sg(m), sm(m);
    for (std::size_t j = 0; j < m; ++j) {
      sd[j] = pd[S[j]];
      sg[j] = g[S[j]];
      sm[j] = mu_[S[j]];
      if (j + 1 < m && S[j + 1] == S[j] + 1)
        so[j] = po[S[j]];
    }
    const Vec z1 = tri_solve(sd, so, sg);
    const Vec z2 = tri_solve(sd, so, sm);
    const double coef = dot(sm, z1) / dot(sm, z2);
    Vec d(n, 0.0);
    double slope = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      d[S[j]] = -(z1[j] - coef * z2[j]);
      slope += g[S[j]] * d[S[j]];
    }
    if (-slope <= cfg.tolerance * std::abs(E)) {
      res.converged = true;
      break;
    }

    t = std::min(1.0, 2.0 * t);
    bool accepted = false;
    double Et = E;
    for (int bt = 0; bt < 60; ++bt, t *= 0.5) {
      for (std::size_t i = 0; i < n; ++i)
        trial[i] = u[i] + t * d[i];
      if (!P.project(trial))
        continue;
      Et = P.energy(trial);
      if (Et < E) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.converged = true;
      break;
    }
    u.swap(trial);
    E = Et;
    res.history.push_back(E);
  }
  res.argmin = P.profile(u);
  res.value = eval_F(res.argmin, P.beta);
  return res;
}

FMinResult minimize_on_ball(double beta, double L, int cells, const FMinConfig& cfg) {
  GridProblem P;
  P.grid = uniform_grid(L, cells);
  P.forms = assemble_p1(P.grid);
  P.beta = beta;
  Vec u(cells, 0.0);
  if (cfg.initial) {
    for (int i = 0; i < cells; ++i)
      u[i] = (*cfg.initial)(P.grid[i]);
  } else {
    const double L0 = 0.6 * L;
    for (int i = 0; i < cells; ++i) {
      const double s = P.grid[i] / L0;
      u[i] = s < 1.0 ? (1.0 - s) * (1.0 - s) : 0.0;
    }
  }
  return descend(P, std::move(u), cfg);
}

void check_config(const FMinConfig& cfg) {
  if (cfg.grid_cells < 4)
    throw InvalidInput("minimize_F: grid_cells must be at least 4");
  if (!(cfg.support_cap > 0.0))
    throw InvalidInput("minimize_F: support_cap must be positive");
  if (!(cfg.tolerance > 0.0))
    throw InvalidInput("minimize_F: tolerance must be positive");
  if (cfg.max_iterations < 1)
    throw InvalidInput("minimize_F: max_iterations must be positive");
}

}  // namespace

FMinResult minimize_F(double beta, const FMinConfig& cfg) {
  if (!(beta > 0.0))
    throw InvalidInput("minimize_F: beta must be positive (the infimum at beta = 0 is 0 and not "
                       "attained)");
  check_config(cfg);
  const double cap = cfg.support_cap * std::pow(beta, -2.0 / 7.0);
  return minimize_on_ball(beta, cap, cfg.grid_cells, cfg);
}

FMinResult restricted_F(double beta, double L, const FMinConfig& cfg) {
  if (!(beta > 0.0))
    throw InvalidInput("restricted_F: beta must be positive");
  if (!(L > 0.0))
    throw InvalidInput("restricted_F: L must be positive");
  check_config(cfg);
  const double h = cfg.support_cap * std::pow(beta, -2.0 / 7.0) / cfg.grid_cells;
  if (L < 2.0 * h)
    throw InvalidInput("restricted_F: L is smaller than two grid cells");
  const int cells = std::max(2, static_cast<int>(std::lround(L / h)));
  return minimize_on_ball(beta, L, cells, cfg);
}

}  // namespace lluv
