#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "vsp/types.hpp"

namespace vsp {

// k x k orthogonal matrix; construction checks R^T R = I to 1e-10.
class RotationMatrix {
 public:
  explicit RotationMatrix(Matrix r);
  static RotationMatrix identity(Eigen::Index k) { return RotationMatrix(Matrix::Identity(k, k)); }

  const Matrix& matrix() const { return r_; }
  Eigen::Index size() const { return r_.rows(); }

 private:
  Matrix r_;
};

// Element of P(k): column j of the induced matrix has `signs[j]` in row
// `perm[j]`, so X * matrix() has column j equal to signs[j] * X.col(perm[j]).
struct SignedPermutation {
  std::vector<int> perm;
  std::vector<int> signs;

  static SignedPermutation identity(int k);
  int size() const { return static_cast<int>(perm.size()); }
  Matrix matrix() const;
  Matrix apply_to_columns(const Matrix& x) const;
  bool is_identity() const;
  bool operator==(const SignedPermutation&) const = default;
};

// Varimax criterion
//   v(R, U) = sum_l [ (1/n) sum_i [UR]_il^4 - ((1/n) sum_i [UR]_il^2)^2 ].
// Both terms are always evaluated.
double varimax_objective(const Matrix& rotation, const Matrix& u);
double varimax_objective(const RotationMatrix& rotation, const Matrix& u);

struct VarimaxOptions {
  double tol = 1e-10;
  int max_sweeps = 100;
  int restarts = 1;
  std::uint64_t seed = 0;
  // Divide rows of U by their l2 norms before solving. The returned rotation
  // is then applied to the unnormalized U by the caller.
  bool kaiser_normalize = false;
};

struct VarimaxSolution {
  RotationMatrix rotation = RotationMatrix::identity(1);
  // Objective of the solved (possibly row-normalized) matrix: the starting
  // value followed by the value after each completed sweep, for the restart
  // that won.
  std::vector<double> sweep_objectives;
  int sweeps = 0;
  bool converged = false;
  int best_restart = 0;
  double objective = 0.0;  // v(rotation, u) on the input u
};

// Cyclic pairwise planar rotations, each with the closed-form optimal angle
// for the pair. Stops once a sweep raises the objective by less than `tol`
// relative. Restart 0 starts from the identity; restart r > 0 starts from the
// Q factor of a seeded Gaussian matrix. The best restart wins, ties going to
// the lowest index.
VarimaxSolution solve_varimax(const Matrix& u, const VarimaxOptions& options = {});

// Negates each column whose third central sample moment is negative.
std::pair<Matrix, std::vector<int>> apply_sign_convention(const Matrix& factors);

// Orders columns by decreasing sum of fourth powers, then applies the skew
// sign rule. Returns the signed permutation P so that factors * P.matrix()
// is the canonical form.
SignedPermutation canonical_column_order(const Matrix& factors);

// All 2^k k! elements of P(k), identity first. Guarded to k <= 8.
std::vector<SignedPermutation> enumerate_signed_permutations(int k);

}  // namespace vsp
