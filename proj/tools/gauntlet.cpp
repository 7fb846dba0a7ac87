#include "gauntlet.hpp"
#include "lluv/fock_oracle.hpp"
#include "lluv/spectral_x.hpp"
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace lluv::tools {

bool SuiteReport::ok() const {
  for (const auto& p : items)
    if (p.violations > 0)
      return false;
  return true;
}

std::string SuiteReport::text() const {
  std::ostringstream os;
  for (const auto& p : items) {
    os << (p.violations == 0 ? "pass " : "FAIL ") << p.name << "  " << (p.trials - p.violations)
       << "/" << p.trials << "  worst_margin=" << p.worst_margin << "  (" << p.statement << ")\n";
    for (const auto& c : p.counterexamples)
      os << "    counterexample: " << c << "\n";
  }
  os << "elapsed_s " << seconds << "\n";
  return os.str();
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double normal() { return n_(g_); }
  double uniform(double a, double b) { return a + (b - a) * u_(g_); }
  double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
  int integer(int a, int b) { return a + static_cast<int>(g_() % static_cast<std::uint64_t>(b - a + 1)); }
  std::uint64_t next() { return g_(); }
  MatrixXd gaussian(int r, int c) {
    MatrixXd m(r, c);
    for (int j = 0; j < c; ++j)
      for (int i = 0; i < r; ++i)
        m(i, j) = normal();
    return m;
  }
  VectorXd vec(int n, double lo, double hi) {
    VectorXd v(n);
    for (int i = 0; i < n; ++i)
      v(i) = uniform(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 g_;
  std::normal_distribution<double> n_;
  std::uniform_real_distribution<double> u_;
};

// records slack (>= 0 means the property holds)
void record(PropertyCount& p, double slack, const std::string& where) {
  if (++p.trials == 1 || slack < p.worst_margin)
    p.worst_margin = slack;
  if (slack < 0.0) {
    ++p.violations;
    if (p.counterexamples.size() < 3)
      p.counterexamples.push_back(where);
  }
}

std::string describe(const char* what, std::uint64_t s, double value) {
  std::ostringstream os;
  os.precision(17);
  os << what << " trial_seed=" << s << " value=" << value;
  return os.str();
}

}  // namespace

SuiteReport run_gauntlet(std::uint64_t seed, int trials) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteReport rep;
  Rng rng(seed);

  PropertyCount contraction{"contraction_norm", "|kappa (delta^2 + kappa^T kappa)^-1 kappa^T| <= 1", 0, 0, 0.0, {}};
  for (int t = 0; t < 2 * trials; ++t) {
    const std::uint64_t s = rng.next();
    Rng r(s);
    const MatrixXd kappa = r.log_uniform(1e-2, 1e2) * r.gaussian(r.integer(1, 6), r.integer(1, 6));
    const double norm = contraction_bound_check(kappa, r.log_uniform(1e-4, 10.0));
    record(contraction, 1.0 + 1e-12 - norm, describe("norm", s, norm));
  }
  rep.items.push_back(contraction);

  PropertyCount weyl{"weyl_shift_bound", "shift <= |w|^2 for y = K^-1/2 Phi^T w", 0, 0, 0.0, {}};
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t s = rng.next();
    Rng r(s);
    const int n = r.integer(1, 4), m = r.integer(1, 4);
    const VectorXd k = r.vec(n, 0.5, 2.0);
    const MatrixXd Phi = r.gaussian(m, n);
    const VectorXd w = r.gaussian(m, 1);
    const VectorXd y = k.cwiseSqrt().cwiseInverse().asDiagonal() * (Phi.transpose() * w);
    const double shift = weyl_shift(theta_embedding(k, Phi.transpose() * Phi, y)).shift;
    record(weyl, w.squaredNorm() * (1.0 + 1e-12) + 1e-12 - shift, describe("shift", s, shift));
  }
  rep.items.push_back(weyl);

  PropertyCount vacuum{"vacuum_above_formula",
                       "vacuum energy of any Bogolubov pair >= ground-state formula", 0, 0, 0.0, {}};
  PropertyCount optimal{"optimal_pair_attains", "optimal pair reproduces the formula", 0, 0, 0.0, {}};
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t s = rng.next();
    Rng r(s);
    const int n = r.integer(1, 5);
    QuadraticBlocks q;
    q.a = random_psd(n, r.next()) + 0.1 * MatrixXd::Identity(n, n);
    q.b = random_psd(n, r.next(), r.uniform(0.0, 2.0));
    q.d = random_psd(n, r.next(), r.uniform(0.0, 1.0));
    q.y = VectorXd::Zero(n);
    const double f = bogolubov_ground_formula(q.a, q.b, q.d);
    const double scale = 1e-9 * (1.0 + std::abs(f));
    const auto B = BogolubovPair::random(n, r.next(), r.uniform(0.1, 1.5));
    const double e = vacuum_expectation(B, q);
    record(vacuum, e - f + scale, describe("vacuum", s, e));
    const double eo = vacuum_expectation(optimal_pair(q.a, q.b, q.d), q);
    record(optimal, scale - std::abs(eo - f), describe("optimal", s, eo));
  }
  rep.items.push_back(vacuum);
  rep.items.push_back(optimal);

  PropertyCount sandwich{"v_y_sandwich", "Tr v^2 <= Tr (y-1)^2 <= 4 (1 + 2|v|)^2 Tr v^2", 0, 0, 0.0, {}};
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t s = rng.next();
    Rng r(s);
    const int n = r.integer(1, 6);
    const VYCheck c = v_y_roundtrip_check(random_psd(n, r.next(), r.log_uniform(1e-2, 3.0)));
    const double tol = 1e-10 * (1.0 + c.upper);
    record(sandwich, std::min(c.tr_y_minus_1 - c.tr_v2, c.upper - c.tr_y_minus_1) + tol,
           describe("tr_y_minus_1", s, c.tr_y_minus_1));
  }
  rep.items.push_back(sandwich);

  PropertyCount identity{"x_identity", "X(A) agrees with Tr[A^1/2 (K_A + K)^-1 A^1/2] to 1e-9", 0, 0, 0.0, {}};
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t s = rng.next();
    Rng r(s);
    const int n = r.integer(4, 16);
    const double res = x_identity_residual(random_psd(n, r.next(), r.log_uniform(0.1, 10.0)),
                                           r.vec(n, 0.5, 2.0));
    record(identity, 1e-9 - res, describe("residual", s, res));
  }
  rep.items.push_back(identity);

  const PropertyReport pr = x_property_suite(rng.next(), 24, trials);
  const char* names[] = {"x_monotone", "x_subadditive", "x_midpoint_concave"};
  const char* statements[] = {"X(A) <= X(A+B)", "X(A+B) <= X(A) + X(B)",
                              "X((A+B)/2) >= (X(A) + X(B))/2"};
  const int counts[] = {pr.monotone_violations, pr.subadditive_violations,
                        pr.concavity_violations};
  for (int i = 0; i < 3; ++i) {
    PropertyCount p{names[i], statements[i], pr.trials, counts[i], counts[i] ? pr.worst_margin : 0.0,
                    {}};
    if (counts[i])
      p.counterexamples = pr.counterexamples;
    rep.items.push_back(p);
  }

  for (double p : {0.5, 0.75}) {
    PropertyCount lb{"x_lower_bound_p" + std::to_string(p).substr(0, 4),
                     "X(A) >= Tr A^1/2 - 2 Lambda^(1-p) Tr A^(p/2) for k <= Lambda", 0, 0, 0.0, {}};
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t s = rng.next();
      Rng r(s);
      const int n = 16;
      const double Lambda = r.uniform(1.0, 4.0);
      const double m = x_lower_bound_check(random_psd(n, r.next(), r.log_uniform(0.1, 100.0)),
                                           r.vec(n, 0.05, Lambda), p, Lambda);
      record(lb, m + 1e-10, describe("margin", s, m));
    }
    rep.items.push_back(lb);
  }

  PropertyCount scalar{"scalar_ground_energy", "truncated ground energy at N=30 equals 1 (k=1, Theta=1.5)", 0, 0, 0.0, {}};
  {
    const auto q = theta_embedding(VectorXd::Constant(1, 1.0), MatrixXd::Constant(1, 1, 1.5));
    const double e = ground_energy_bruteforce(build_dgamma(q, {1, 30}));
    record(scalar, 1e-6 - std::abs(e - 1.0), describe("energy", 0, e));
  }
  rep.items.push_back(scalar);

  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

SuiteReport run_fock_oracles(std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteReport rep;
  auto one = [&](const std::string& name, const std::string& statement, double slack,
                 double value) {
    PropertyCount p{name, statement, 0, 0, 0.0, {}};
    record(p, slack, describe(name.c_str(), seed, value));
    rep.items.push_back(p);
  };
  const VectorXd k1 = VectorXd::Constant(1, 1.0);

  {
    const auto q = theta_embedding(k1, MatrixXd::Zero(1, 1));
    const double e = ground_energy_bruteforce(build_dgamma(q, {1, 10}));
    one("free_mode", "ground energy 0", 1e-12 - std::abs(e), e);
  }
  {
    const auto q = theta_embedding(k1, MatrixXd::Constant(1, 1, 1.5));
    const auto ladder = ground_energy_ladder(q, {10, 20, 30});
    const double e = ladder.energies.back();
    one("pairing_scalar", "N=30 ground energy within 1e-6 of sqrt(1 + 2 Theta) - 1",
        1e-6 - std::abs(e - 1.0), e);
    const double e10 = std::abs(ladder.energies[0] - 1.0), e20 = std::abs(ladder.energies[1] - 1.0),
                 e30 = std::abs(ladder.energies[2] - 1.0);
    one("pairing_convergence", "error strictly decreasing over N = 10, 20, 30",
        (e10 > e20 && e20 > e30) || e30 == 0.0 ? 0.0 : -1.0, e30);
  }
  {
    const auto q = theta_embedding(k1, MatrixXd::Zero(1, 1), VectorXd::Constant(1, 1.0));
    const double e = ground_energy_bruteforce(build_dgamma(q, {1, 40}));
    one("displaced_mode", "ground energy -2 within 1e-6", 1e-6 - std::abs(e + 2.0), e);
  }
  {
    const MatrixXd a = MatrixXd::Constant(1, 1, 2.0), b = MatrixXd::Constant(1, 1, 1.0),
                   d = MatrixXd::Zero(1, 1);
    const double f = bogolubov_ground_formula(a, b, d);
    const double m = scalar_pair_minimum(2.0, 1.0, 0.0);
    one("scalar_formula", "formula equals the 1-D minimization within 1e-9",
        1e-9 - std::abs(f - m), f);
  }
  Rng rng(seed);
  for (int i = 0; i < 3; ++i) {
    const int n = 3;
    QuadraticBlocks q;
    q.a = random_psd(n, rng.next()) + 0.5 * MatrixXd::Identity(n, n);
    q.b = random_psd(n, rng.next(), 0.3);
    q.d = random_psd(n, rng.next(), 0.3);
    q.y = VectorXd::Zero(n);
    const double f = bogolubov_ground_formula(q.a, q.b, q.d);
    const double e = ground_energy_bruteforce(build_dgamma(q, {n, 20}));
    one("three_mode_" + std::to_string(i), "brute force at N=20 within 1e-3 of the formula",
        1e-3 - std::abs(e - f), e);
  }
  {
    auto q = theta_embedding(k1, MatrixXd::Constant(1, 1, 1.5), VectorXd::Constant(1, 0.5));
    const double ey = ground_energy_bruteforce(build_dgamma(q, {1, 40}));
    const double shift = weyl_shift(q).shift;
    q.y.setZero();
    const double e0 = ground_energy_bruteforce(build_dgamma(q, {1, 40}));
    one("weyl_relation", "E0(T,y) + shift = E0(T,0) within 1e-4 at N=40",
        1e-4 - std::abs(ey + shift - e0), ey + shift - e0);
  }
  {
    const VectorXd k = (VectorXd(2) << 0.7, 1.3).finished();
    const MatrixXd theta = (MatrixXd(2, 2) << 0.8, 0.3, 0.3, 0.5).finished();
    const auto q = theta_embedding(k, theta);
    const double f = bogolubov_ground_formula(q.a, q.b, q.d);
    const double x = x_of(2.0 * theta, k, XOptions{false}).value;
    one("embedding_consistency", "formula equals X(2 Theta) within 1e-10", 1e-10 - std::abs(f - x),
        f);
  }
  {
    const auto p = positivity_theorem_check(k1, MatrixXd::Constant(1, 1, 1.0),
                                            VectorXd::Constant(1, 0.5), 30);
    one("positivity", "E0(T,y) + |w|^2 >= E0(T,0)", p.margin() + 1e-9, p.margin());
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace lluv::tools
