#pragma once
#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

namespace lluv {

inline constexpr std::size_t kDefaultFockCap = 20000;

// Quadratic boson Hamiltonian
//   sum (a+b)_ij a*_i a_j + b_ij a*_i a*_j + b_ij a_i a_j + (d+b)_ij a_i a*_j
//   + 2 sum y_i (a_i + a*_i)
// on n real modes (J = complex conjugation).
struct QuadraticBlocks {
  Eigen::MatrixXd a, b, d;
  Eigen::VectorXd y;

  int n() const { return static_cast<int>(a.rows()); }
  // Throws InvalidInput on shape, symmetry or PSD violations beyond tol.
  void validate(double tol = 1e-10) const;
  // [[a+b, b], [b, d+b]]
  Eigen::MatrixXd T() const;
};

// a = 2K, b = K^{-1/2} Theta K^{-1/2}, d = 0, K = diag(k)
QuadraticBlocks theta_embedding(const Eigen::VectorXd& k, const Eigen::MatrixXd& theta,
                                const Eigen::VectorXd& y = Eigen::VectorXd());

struct FockTruncation {
  int n_modes = 1;
  int max_total_occupation = 10;
};

std::size_t fock_dimension(int n_modes, int max_total_occupation);

// Occupation tuples with total <= N, ordered by total then lexicographically.
class FockBasis {
 public:
  explicit FockBasis(const FockTruncation& t, std::size_t cap = kDefaultFockCap);
  std::size_t size() const { return states_.size(); }
  const std::vector<int>& state(std::size_t i) const { return states_[i]; }
  // -1 when the tuple is outside the truncation
  long index(const std::vector<int>& s) const;
  int n_modes() const { return n_; }
  int max_total() const { return N_; }

 private:
  int n_, N_;
  std::vector<std::vector<int>> states_;
  std::map<std::vector<int>, long> lookup_;
};

// Matrix of the Hamiltonian compressed to the truncated space.
Eigen::MatrixXd build_dgamma(const QuadraticBlocks& blocks, const FockTruncation& trunc,
                             std::size_t cap = kDefaultFockCap);

double ground_energy_bruteforce(const Eigen::MatrixXd& H);

struct GroundLadder {
  std::vector<int> occupations;
  std::vector<double> energies;
  bool converged = false;  // last two energies within tol
};

GroundLadder ground_energy_ladder(const QuadraticBlocks& blocks, const std::vector<int>& Ns,
                                  double tol = 1e-6, std::size_t cap = kDefaultFockCap);

// 1/2 Tr[(m (a+d+4b) m)^{1/2} - a + d], m = (a+d)^{1/2}
double bogolubov_ground_formula(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                const Eigen::MatrixXd& d);

// min over v >= 0 of a v^2 + b (v - sqrt(1+v^2))^2 + d (1+v^2), scalars,
// by golden-section search
double scalar_pair_minimum(double a, double b, double d);

struct WeylShift {
  Eigen::VectorXd eta;  // solves 1/2 (a+d+4b) eta = y
  double shift = 0.0;   // <eta, (a+d+4b) eta>
};

WeylShift weyl_shift(const QuadraticBlocks& blocks);

// spectral norm of kappa (delta^2 + kappa^T kappa)^{-1} kappa^T
double contraction_bound_check(const Eigen::MatrixXd& kappa, double delta);

struct VYCheck {
  double tr_v2 = 0.0;         // Tr v^2
  double tr_y_minus_1 = 0.0;  // Tr (y - 1)^2
  double upper = 0.0;         // 4 (1 + 2 |v|)^2 Tr v^2
  Eigen::MatrixXd y;
  bool holds(double tol = 1e-10) const;
};

// y^{1/2} = v + (1 + v^2)^{1/2}, i.e. v = (y^{1/2} - y^{-1/2}) / 2
VYCheck v_y_roundtrip_check(const Eigen::MatrixXd& v);

struct PositivityCheck {
  double e_complex = 0.0;  // E0(T, y) + |w|^2
  double e_modulus = 0.0;  // E0(T, 0)
  double shift = 0.0;
  double margin() const { return e_complex - e_modulus; }
};

// Blocks from theta_embedding(k, Phi^T Phi) with y = K^{-1/2} Phi^T w.
PositivityCheck positivity_theorem_check(const Eigen::VectorXd& k, const Eigen::MatrixXd& Phi,
                                         const Eigen::VectorXd& w, int max_total_occupation);

// B = [[u, v], [v, u]] with u^T u - v^T v = 1 and u^T v = v^T u.
struct BogolubovPair {
  Eigen::MatrixXd u, v;

  // u = cosh(X) R, v = sinh(X) R for symmetric X and orthogonal R
  static BogolubovPair from_generator(const Eigen::MatrixXd& X, const Eigen::MatrixXd& R);
  static BogolubovPair random(int n, std::uint64_t seed, double strength = 1.0);
  double symplectic_error() const;
};

// Vacuum expectation after the transformation: trace of the lower-right
// block of B T B^T,
//   Tr[(a+b) v^T v] + 2 Tr[b u^T v] + Tr[(d+b) u^T u].
double vacuum_expectation(const BogolubovPair& B, const QuadraticBlocks& blocks);

// y_* = m^{-1} (m (m^2 + 4b) m)^{1/2} m^{-1}
Eigen::MatrixXd y_star(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                       const Eigen::MatrixXd& d);
// G(y) = Tr[m^2 y + (m^2 + 4b) y^{-1} + 2(d - a)]
double pair_functional(const Eigen::MatrixXd& y, const Eigen::MatrixXd& a,
                       const Eigen::MatrixXd& b, const Eigen::MatrixXd& d);
// u = (1 + v^2)^{1/2}, v = -(y^{1/2} - y^{-1/2}) / 2 at y = y_*
BogolubovPair optimal_pair(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const Eigen::MatrixXd& d);

// Symmetric matrix function through the eigendecomposition.
Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& A);
Eigen::MatrixXd sym_inv_sqrt(const Eigen::MatrixXd& A);

}  // namespace lluv
