#include "lluv/asymptotics.hpp"
#include "lluv/errors.hpp"
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace lluv {

namespace {

constexpr double kPi = std::numbers::pi;

double theta_prefactor(double alpha) { return alpha * std::pow(2.0 * kPi, -1.5); }

}  // namespace

ScheduleExponents schedule_exponents(ScheduleSide side) {
  return side == ScheduleSide::upper ? ScheduleExponents{4, 17, 105} : ScheduleExponents{4, 9, 49};
}

std::array<long, 3> schedule_error_monomials(ScheduleSide side) {
  const auto e = schedule_exponents(side);
  // upper: 7r, 14t - 2, 5 - 35r - 21t; lower: 7r, 14t - 2, 5 - 7r - 21t
  const long third = side == ScheduleSide::upper ? 5 * e.den - 35 * e.r - 21 * e.t
                                                 : 5 * e.den - 7 * e.r - 21 * e.t;
  return {7 * e.r, 14 * e.t - 2 * e.den, third};
}

Schedule schedule(double alpha, double Lambda, ScheduleSide side) {
  if (!(alpha > 0.0))
    throw InvalidInput("schedule: alpha must be positive");
  if (!(Lambda >= 1.0))
    throw InvalidInput("schedule: Lambda must be at least 1");
  Schedule s;
  const auto e = schedule_exponents(side);
  const double r = static_cast<double>(e.r) / e.den;
  const double t = static_cast<double>(e.t) / e.den;
  const double small = std::pow(alpha / Lambda, r);
  s.delta = std::min(1.0, small);
  s.eps = side == ScheduleSide::upper ? s.delta : 1.0;
  s.L = std::pow(alpha, -t) * std::pow(Lambda, t - 1.0);
  s.L = std::max(s.L, 1.0 / Lambda);
  return s;
}

double beta_paper(double alpha, double Lambda) {
  return std::sqrt(4.0 * alpha / (9.0 * kPi)) * Lambda * Lambda * Lambda;
}

RadialProfile reference_profile(double Lambda, double extent, int cells) {
  if (!(Lambda > 0.0) || !(extent > 0.0))
    throw InvalidInput("reference_profile: Lambda and extent must be positive");
  const BesselMinimizer b = bessel_minimizer(1.0);
  const double L = extent / Lambda;
  const double scale = b.support_radius / L;
  return normalized(RadialProfile::sample([&](double r) { return b.value(r * scale); },
                                          uniform_grid(L, cells), L));
}

BetaMeasurement measure_beta(double alpha, double Lambda, double sigma, const ShellConfig& sc,
                             double reference_extent) {
  if (!(alpha > 0.0))
    throw InvalidInput("measure_beta: alpha must be positive");
  const ShellQuadrature shell = build_shell(sigma, Lambda, sc.n_radial, sc.n_angular);
  const RadialProfile phi = reference_profile(Lambda, reference_extent);
  AssemblyOptions opt;
  opt.verify_psd = false;
  const ShellOperator theta2 = assemble_theta(phi, 2.0 * alpha, shell, opt);
  BetaMeasurement m;
  m.half_x = 0.5 * x_of(theta2, XOptions{false}).value;
  m.l1 = eval_norms(phi).l1;
  m.beta_emp = m.half_x / m.l1;
  m.beta_paper = beta_paper(alpha, Lambda);
  m.c_conv = m.beta_emp / m.beta_paper;
  return m;
}

LLEnergy::LLEnergy(double alpha, double L, int basis_size, const ShellQuadrature& shell)
    : alpha_(alpha),
      L_(L),
      n_(basis_size),
      grid_(uniform_grid(L, basis_size)),
      forms_(assemble_p1(grid_)),
      geom_(shell),
      transform_(grid_, transform_order(grid_, geom_.q_max()) + 1) {
  if (!(alpha > 0.0))
    throw InvalidInput("LLEnergy: alpha must be positive");
  if (basis_size < 2)
    throw InvalidInput("LLEnergy: basis_size must be at least 2");
  const auto& r = transform_.points();
  where_.resize(r.size());
  const double h = L / basis_size;
  for (std::size_t g = 0; g < r.size(); ++g) {
    int e = std::min(basis_size - 1, static_cast<int>(r[g] / h));
    where_[g] = {e, (r[g] - grid_[e]) / (grid_[e + 1] - grid_[e])};
  }
}

namespace {

double quad_form(const std::vector<double>& diag, const std::vector<double>& off,
                 const std::vector<double>& c, std::vector<double>* Tc = nullptr) {
  const std::size_t n = diag.size();
  double s = 0.0;
  if (Tc)
    Tc->assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag[i] * c[i];
    if (i > 0)
      v += off[i - 1] * c[i - 1];
    if (i + 1 < n)
      v += off[i] * c[i + 1];
    s += c[i] * v;
    if (Tc)
      (*Tc)[i] = v;
  }
  return s;
}

}  // namespace

RadialProfile LLEnergy::profile(const std::vector<double>& c) const {
  std::vector<double> v(grid_.size(), 0.0);
  for (int i = 0; i < n_; ++i)
    v[i] = std::max(0.0, c[i]);
  return RadialProfile(grid_, std::move(v), L_);
}

std::vector<double> LLEnergy::coefficients(const RadialProfile& phi) const {
  std::vector<double> c(n_);
  for (int i = 0; i < n_; ++i)
    c[i] = phi(grid_[i]);
  return c;
}

double LLEnergy::value(const std::vector<double>& c, XReport* report) const {
  const double n2 = quad_form(forms_.m_diag, forms_.m_off, c);
  if (!(n2 > 0.0))
    throw InvalidInput("LLEnergy: coefficients vanish");
  const double grad2 = quad_form(forms_.k_diag, forms_.k_off, c) / n2;
  std::vector<double> f(where_.size());
  for (std::size_t g = 0; g < where_.size(); ++g) {
    const auto [e, t] = where_[g];
    const double u = (1.0 - t) * c[e] + (e + 1 < n_ ? t * c[e + 1] : 0.0);
    f[g] = u * u / n2;
  }
  const KernelTable table(transform_, f, geom_.q_max());
  const ShellOperator theta2 =
      geom_.assemble([&](double q) { return table(q); }, theta_prefactor(2.0 * alpha_));
  const XReport x = x_of(theta2, XOptions{false});
  if (report)
    *report = x;
  return 0.5 * grad2 + 0.5 * x.value;
}

double LLEnergy::value_and_gradient(const std::vector<double>& c, std::vector<double>& grad,
                                    XReport* report) const {
  std::vector<double> Mc, Kc;
  const double n2 = quad_form(forms_.m_diag, forms_.m_off, c, &Mc);
  if (!(n2 > 0.0))
    throw InvalidInput("LLEnergy: coefficients vanish");
  const double grad2 = quad_form(forms_.k_diag, forms_.k_off, c, &Kc) / n2;
  std::vector<double> u(where_.size()), f(where_.size());
  for (std::size_t g = 0; g < where_.size(); ++g) {
    const auto [e, t] = where_[g];
    u[g] = (1.0 - t) * c[e] + (e + 1 < n_ ? t * c[e + 1] : 0.0);
    f[g] = u[g] * u[g] / n2;
  }
  const KernelTable table(transform_, f, geom_.q_max());
  const double pre = theta_prefactor(2.0 * alpha_);
  const ShellOperator theta2 = geom_.assemble([&](double q) { return table(q); }, pre);
  const XGradient xg = x_with_gradient(theta2);
  if (report)
    *report = xg.report;

  // dX/df at the quadrature points through the table adjoint
  std::vector<double> w0(table.size(), 0.0), w1(table.size(), 0.0);
  // dX/dA = 1/2 (K^2 + A)^{-1/2}
  geom_.accumulate(table, xg.inv_sqrt, 0.5 * pre * theta2.n_azimuth(), w0, w1);
  const std::vector<double> gf = table.pullback(transform_, w0, w1);

  grad.assign(n_, 0.0);
  double gf_rho = 0.0;
  for (std::size_t g = 0; g < where_.size(); ++g) {
    const auto [e, t] = where_[g];
    const double a = gf[g] * 2.0 * u[g] / n2;
    grad[e] += 0.5 * a * (1.0 - t);
    if (e + 1 < n_)
      grad[e + 1] += 0.5 * a * t;
    gf_rho += gf[g] * f[g];
  }
  for (int p = 0; p < n_; ++p)
    grad[p] += (Kc[p] - grad2 * Mc[p]) / n2 - gf_rho * Mc[p] / n2;
  return 0.5 * grad2 + 0.5 * xg.report.value;
}

namespace {

// clamp to >= 0 and rescale to unit mass norm
bool project(const P1Forms& f, std::vector<double>& c) {
  for (auto& x : c)
    x = std::max(0.0, x);
  const double n2 = quad_form(f.m_diag, f.m_off, c);
  if (!(n2 > 0.0))
    return false;
  const double s = 1.0 / std::sqrt(n2);
  for (auto& x : c)
    x *= s;
  return true;
}

std::vector<double> tri_solve(std::vector<double> d, const std::vector<double>& off,
                              std::vector<double> b) {
  const std::size_t n = d.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = off[i - 1] / d[i - 1];
    d[i] -= m * off[i - 1];
    b[i] -= m * b[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = b[n - 1] / d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    x[i] = (b[i] - off[i] * x[i + 1]) / d[i];
  return x;
}

// Quasi-Newton descent; the inverse Hessian starts from (K + lambda M)^{-1}.
// E is invariant under scaling of c, so steps need no renormalization.
void descend_gradient(const LLEnergy& E, std::vector<double> c, const LLConfig& cfg,
                      LLResult& res) {
  const auto& f = E.forms();
  const int n = E.size();
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  auto initial_inverse = [&](const std::vector<double>& x) {
    const double lam = std::max(quad_form(f.k_diag, f.k_off, x) / quad_form(f.m_diag, f.m_off, x),
                                1e-12);
    std::vector<double> d(n), o(n - 1);
    for (int i = 0; i < n; ++i)
      d[i] = f.k_diag[i] + lam * f.m_diag[i];
    for (int i = 0; i + 1 < n; ++i)
      o[i] = f.k_off[i] + lam * f.m_off[i];
    MatrixXd H(n, n);
    for (int j = 0; j < n; ++j) {
      std::vector<double> e(n, 0.0);
      e[j] = 1.0;
      const auto col = tri_solve(d, o, e);
      for (int i = 0; i < n; ++i)
        H(i, j) = col[i];
    }
    return H;
  };
  auto as_vec = [&](const std::vector<double>& v) { return Eigen::Map<const VectorXd>(v.data(), n); };

  std::vector<double> g;
  double val = E.value_and_gradient(c, g, &res.x);
  ++res.evaluations;
  res.initial_energy = val;
  res.history.push_back(val);
  MatrixXd H = initial_inverse(c);
  std::vector<double> trial(n), gt;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    res.iterations = it;
    VectorXd d = -H * as_vec(g);
    double slope = as_vec(g).dot(d);
    if (!(slope < 0.0)) {
      H = initial_inverse(c);
      d = -H * as_vec(g);
      slope = as_vec(g).dot(d);
    }
    if (-slope <= cfg.tolerance * std::abs(val)) {
      res.converged = true;
      break;
    }
    bool accepted = false;
    double vt = val;
    double t = 1.0;
    for (int bt = 0; bt < 30; ++bt, t *= 0.5) {
      for (int i = 0; i < n; ++i)
        trial[i] = std::max(0.0, c[i] + t * d(i));
      if (!(quad_form(f.m_diag, f.m_off, trial) > 0.0))
        continue;
      vt = E.value_and_gradient(trial, gt);
      ++res.evaluations;
      double actual = 0.0;
      for (int i = 0; i < n; ++i)
        actual += g[i] * (trial[i] - c[i]);
      if (vt < val && vt <= val + 1e-4 * std::min(actual, 0.0)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.converged = true;
      break;
    }
    VectorXd s(n), y(n);
    for (int i = 0; i < n; ++i) {
      s(i) = trial[i] - c[i];
      y(i) = gt[i] - g[i];
    }
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const VectorXd Hy = H * y;
      const double rho = 1.0 / sy;
      H += (rho * rho * y.dot(Hy) + rho) * s * s.transpose() -
           rho * (Hy * s.transpose() + s * Hy.transpose());
    }
    c = trial;
    g = gt;
    val = vt;
    res.history.push_back(val);
  }
  project(f, c);
  res.e_ll = E.value(c, &res.x);
  res.phi = normalized(E.profile(c));
}

void descend_simplex(const LLEnergy& E, std::vector<double> c0, const LLConfig& cfg,
                     LLResult& res) {
  const auto& f = E.forms();
  const int n = E.size();
  auto objective = [&](std::vector<double> c) {
    if (!project(f, c))
      return std::numeric_limits<double>::infinity();
    ++res.evaluations;
    return E.value(c);
  };
  std::vector<std::vector<double>> P(n + 1, c0);
  std::vector<double> F(n + 1);
  double cmax = 0.0;
  for (double v : c0)
    cmax = std::max(cmax, v);
  for (int i = 0; i < n; ++i)
    P[i + 1][i] += 0.1 * cmax;
  for (int i = 0; i <= n; ++i)
    F[i] = objective(P[i]);
  res.initial_energy = F[0];
  res.history.push_back(F[0]);
  double best = F[0];
  const int budget = cfg.max_iterations * (n + 1);
  for (int it = 1; it <= budget; ++it) {
    res.iterations = it;
    std::vector<int> order(n + 1);
    for (int i = 0; i <= n; ++i)
      order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return F[a] < F[b]; });
    const int lo = order[0], hi = order[n], nh = order[n - 1];
    if (F[lo] < best) {
      best = F[lo];
      res.history.push_back(best);
    }
    if (std::abs(F[hi] - F[lo]) <= cfg.tolerance * std::abs(F[lo])) {
      res.converged = true;
      break;
    }
    std::vector<double> cen(n, 0.0);
    for (int i = 0; i <= n; ++i)
      if (i != hi)
        for (int j = 0; j < n; ++j)
          cen[j] += P[i][j] / n;
    auto along = [&](double s) {
      std::vector<double> x(n);
      for (int j = 0; j < n; ++j)
        x[j] = cen[j] + s * (P[hi][j] - cen[j]);
      return x;
    };
    auto xr = along(-1.0);
    const double fr = objective(xr);
    if (fr < F[lo]) {
      auto xe = along(-2.0);
      const double fe = objective(xe);
      if (fe < fr) {
        P[hi] = xe;
        F[hi] = fe;
      } else {
        P[hi] = xr;
        F[hi] = fr;
      }
    } else if (fr < F[nh]) {
      P[hi] = xr;
      F[hi] = fr;
    } else {
      auto xc = along(fr < F[hi] ? -0.5 : 0.5);
      const double fc = objective(xc);
      if (fc < std::min(fr, F[hi])) {
        P[hi] = xc;
        F[hi] = fc;
      } else {
        for (int i = 0; i <= n; ++i)
          if (i != lo) {
            for (int j = 0; j < n; ++j)
              P[i][j] = P[lo][j] + 0.5 * (P[i][j] - P[lo][j]);
            F[i] = objective(P[i]);
          }
      }
    }
  }
  const int lo = static_cast<int>(std::min_element(F.begin(), F.end()) - F.begin());
  std::vector<double> c = P[lo];
  project(f, c);
  res.e_ll = E.value(c, &res.x);
  res.phi = normalized(E.profile(c));
}

}  // namespace

LLResult minimize_ll(double alpha, double Lambda, double sigma, double L, const ShellConfig& sc,
                     const LLConfig& cfg, std::optional<double> beta_hint,
                     std::optional<RadialProfile> initial) {
  if (!(Lambda >= 1.0))
    throw InvalidInput("minimize_ll: Lambda must be at least 1");
  if (!(L * Lambda >= 1.0 - 1e-12))
    throw InvalidInput("minimize_ll: need L >= 1/Lambda");
  if (cfg.basis_size < 2 || cfg.max_iterations < 1 || !(cfg.tolerance > 0.0))
    throw InvalidInput("minimize_ll: invalid optimizer settings");
  const ShellQuadrature shell = build_shell(sigma, Lambda, sc.n_radial, sc.n_angular);
  const LLEnergy E(alpha, L, cfg.basis_size, shell);

  std::vector<double> c;
  if (initial) {
    c = E.coefficients(*initial);
  } else {
    const double beta =
        beta_hint ? *beta_hint : measure_beta(alpha, Lambda, sigma, sc, cfg.reference_extent).beta_emp;
    const BesselMinimizer b = bessel_minimizer(beta);
    const double scale = b.support_radius > L ? b.support_radius / L : 1.0;
    c.resize(E.size());
    for (int i = 0; i < E.size(); ++i)
      c[i] = b.value(E.grid()[i] * scale);
  }
  if (!project(E.forms(), c))
    throw InvalidInput("minimize_ll: initial guess vanishes on the basis grid");

  LLResult res;
  if (cfg.method == LLMethod::gradient)
    descend_gradient(E, std::move(c), cfg, res);
  else
    descend_simplex(E, std::move(c), cfg, res);
  return res;
}

std::vector<SweepRecord> ratio_sweep(const std::vector<std::pair<double, double>>& grid,
                                     const SweepConfig& cfg) {
  const double F1 = minimize_F(1.0, cfg.f).value;
  std::vector<SweepRecord> out(grid.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;

  auto work = [&] {
    while (true) {
      const std::size_t i = next++;
      if (i >= grid.size())
        return;
      try {
        const auto t0 = std::chrono::steady_clock::now();
        const auto [alpha, Lambda] = grid[i];
        const Schedule s = schedule(alpha, Lambda, cfg.side);
        const BetaMeasurement m = measure_beta(alpha, Lambda, cfg.sigma, cfg.shell,
                                               cfg.optimizer.reference_extent);
        const LLResult r =
            minimize_ll(alpha, Lambda, cfg.sigma, s.L, cfg.shell, cfg.optimizer, m.beta_emp);
        SweepRecord rec;
        rec.alpha = alpha;
        rec.lambda = Lambda;
        rec.sigma = cfg.sigma;
        rec.L = s.L;
        rec.eps = s.eps;
        rec.delta = s.delta;
        rec.n_radial = cfg.shell.n_radial;
        rec.n_angular = cfg.shell.n_angular;
        rec.e_ll = r.e_ll;
        rec.beta_emp = m.beta_emp;
        rec.beta_paper = m.beta_paper;
        rec.f_pred = F1 * std::pow(m.beta_emp, 4.0 / 7.0);
        rec.ratio_emp = rec.e_ll / rec.f_pred;
        rec.ratio_paper = rec.e_ll / (F1 * std::pow(m.beta_paper, 4.0 / 7.0));
        rec.seed = cfg.seed;
        if (cfg.record_runtime)
          rec.runtime_s =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::lock_guard<std::mutex> lock(mu);
        out[i] = rec;
        if (cfg.progress) {
          std::ostringstream os;
          os << "point alpha=" << alpha << " Lambda=" << Lambda << " L=" << s.L
             << " e_ll=" << r.e_ll << " ratio_emp=" << rec.ratio_emp
             << " iterations=" << r.iterations;
          cfg.progress(os.str());
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure)
          failure = std::current_exception();
        next = grid.size();
        return;
      }
    }
  };

  const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(grid.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back(work);
    for (auto& th : pool)
      th.join();
  }
  if (failure)
    std::rethrow_exception(failure);
  return out;
}

namespace {

// two-sided 97.5% Student t quantiles, df = 1..30
double t975(int df) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                 2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                 2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                 2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
  if (df < 1)
    return std::numeric_limits<double>::infinity();
  return df <= 30 ? table[df - 1] : 1.96;
}

}  // namespace

PowerFit fit_power(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidInput("fit_power: need at least two matching points");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw InvalidInput("fit_power: data must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0))
    throw InvalidInput("fit_power: x values are all equal");
  PowerFit f;
  f.points = static_cast<int>(n);
  f.exponent = sxy / sxx;
  const double b = my - f.exponent * mx;
  f.prefactor = std::exp(b);
  if (n > 2) {
    double ssr = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ly[i] - b - f.exponent * lx[i];
      ssr += r * r;
    }
    f.stderr_slope = std::sqrt(ssr / (n - 2) / sxx);
    f.ci95 = t975(static_cast<int>(n) - 2) * f.stderr_slope;
  }
  return f;
}

namespace {

LocalizationFit fit_ladder(std::vector<double> L, std::vector<double> E) {
  LocalizationFit out;
  out.L = L;
  out.energies = E;
  out.nested = true;
  for (std::size_t i = 1; i < E.size(); ++i)
    if (E[i] > E[i - 1] + 1e-12 * std::abs(E[i - 1]))
      out.nested = false;
  std::vector<double> x, y;
  for (std::size_t i = 0; i + 1 < E.size(); ++i) {
    const double gap = E[i] - E.back();
    if (gap > 0.0) {
      x.push_back(L[i]);
      y.push_back(gap);
    }
  }
  if (x.size() >= 2) {
    out.fit = fit_power(x, y);
    out.q = -out.fit.exponent;
    out.c = out.fit.prefactor;
  }
  return out;
}

void check_ladder(std::vector<double>& ladder) {
  if (ladder.size() < 3)
    throw InvalidInput("localization_sweep: ladder needs at least three rungs");
  std::sort(ladder.begin(), ladder.end());
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (!(ladder[i] > ladder[i - 1]))
      throw InvalidInput("localization_sweep: ladder rungs must be distinct");
}

}  // namespace

LocalizationFit localization_sweep(double alpha, double Lambda, std::vector<double> ladder,
                                   const SweepConfig& cfg) {
  check_ladder(ladder);
  const BetaMeasurement m =
      measure_beta(alpha, Lambda, cfg.sigma, cfg.shell, cfg.optimizer.reference_extent);
  std::vector<double> E;
  for (double L : ladder) {
    const LLResult r = minimize_ll(alpha, Lambda, cfg.sigma, L, cfg.shell, cfg.optimizer, m.beta_emp);
    E.push_back(r.e_ll);
    if (cfg.progress) {
      std::ostringstream os;
      os << "rung L=" << L << " E=" << r.e_ll << " iterations=" << r.iterations;
      cfg.progress(os.str());
    }
  }
  return fit_ladder(ladder, E);
}

LocalizationFit localization_sweep_F(double beta, std::vector<double> ladder,
                                     const FMinConfig& cfg) {
  check_ladder(ladder);
  std::vector<double> E;
  for (double L : ladder)
    E.push_back(restricted_F(beta, L, cfg).value);
  return fit_ladder(ladder, E);
}

double main_term_convention(const RadialProfile& phi, const ShellQuadrature& shell) {
  const double l1 = eval_norms(phi).l1;
  if (!(l1 > 0.0))
    throw InvalidInput("main_term_convention: profile vanishes");
  const double s3 = shell.sigma * shell.sigma * shell.sigma;
  const double L3 = shell.lambda * shell.lambda * shell.lambda;
  AssemblyOptions opt;
  opt.verify_psd = false;
  return main_term_operator(phi, shell, opt).trace() / ((8.0 * kPi / 3.0) * (L3 - s3) * l1);
}

ExponentReport exponent_report(const std::vector<SweepRecord>& records,
                               std::optional<double> c_conv_main) {
  ExponentReport rep;
  std::map<double, std::map<double, double>> by_alpha, by_lambda;
  for (const auto& r : records) {
    by_alpha[r.alpha][r.lambda] = r.e_ll;
    by_lambda[r.lambda][r.alpha] = r.e_ll;
  }
  auto best_group = [](const std::map<double, std::map<double, double>>& g,
                       double& key) -> const std::map<double, double>* {
    const std::map<double, double>* best = nullptr;
    for (const auto& [k, v] : g)
      if (v.size() >= 2 && (!best || v.size() > best->size())) {
        best = &v;
        key = k;
      }
    return best;
  };
  auto fit_group = [](const std::map<double, double>& g) {
    std::vector<double> x, y;
    for (const auto& [k, v] : g) {
      x.push_back(k);
      y.push_back(v);
    }
    return fit_power(x, y);
  };
  if (const auto* g = best_group(by_alpha, rep.lambda_fit_alpha))
    rep.lambda_fit = fit_group(*g);
  if (const auto* g = best_group(by_lambda, rep.alpha_fit_lambda))
    rep.alpha_fit = fit_group(*g);

  auto& c = rep.convention;
  if (!records.empty()) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    for (const auto& r : records) {
      const double cc = r.beta_emp / r.beta_paper;
      lo = std::min(lo, cc);
      hi = std::max(hi, cc);
      sum += cc;
      c.mean_abs_dev_emp += std::abs(r.ratio_emp - 1.0) / records.size();
      c.mean_abs_dev_paper += std::abs(r.ratio_paper - 1.0) / records.size();
    }
    c.c_conv_beta_mean = sum / records.size();
    c.c_conv_beta_spread = (hi - lo) / c.c_conv_beta_mean;
    c.closer = c.mean_abs_dev_emp <= c.mean_abs_dev_paper ? "beta_emp" : "beta_paper";
  }
  if (c_conv_main) {
    c.c_conv_main = *c_conv_main;
    const double tp = std::pow(2.0 * kPi, -3.0);
    if (std::abs(*c_conv_main - 1.0) < 0.1)
      c.main_verdict = "1";
    else if (std::abs(*c_conv_main / tp - 1.0) < 0.1)
      c.main_verdict = "(2pi)^-3";
    else
      c.main_verdict = "neither";
  }
  return rep;
}

}  // namespace lluv
