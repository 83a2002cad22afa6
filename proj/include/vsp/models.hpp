#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vsp/distributions.hpp"
#include "vsp/sparse_matrix.hpp"
#include "vsp/types.hpp"

namespace vsp {

struct NoiseSpec {
  enum class Kind { gaussian, poisson, bernoulli };
  Kind kind = Kind::poisson;
  double sigma = 0.0;  // gaussian only

  static NoiseSpec gaussian(double sigma) { return {Kind::gaussian, sigma}; }
  static NoiseSpec poisson() { return {Kind::poisson, 0.0}; }
  static NoiseSpec bernoulli() { return {Kind::bernoulli, 0.0}; }
};

// E(A | Z, Y) = rho Z B Y^T with independent entries given Z, Y.
struct FactorModelSpec {
  std::int64_t n = 0;
  std::int64_t d = 0;
  int k = 0;
  Matrix b;
  std::vector<DistributionSpec> z_dist;  // one per column of Z
  std::vector<DistributionSpec> y_dist;  // one per column of Y
  NoiseSpec noise;
  double rho = 1.0;

  void validate() const;
};

struct GeneratedFactorModel {
  SparseMatrix a;
  Matrix z;
  Matrix y;
  Density expectation;  // of rho Z B Y^T
};

GeneratedFactorModel generate_factor_model(const FactorModelSpec& spec, std::uint64_t seed);

// Degree-corrected blockmodel. theta_dist is rescaled by
// 1 / sqrt(pi_j E theta^2) so that E(Z_ij^2) = 1 exactly.
struct DcSbmSpec {
  std::int64_t n = 0;
  int k = 0;
  Vector pi;
  Matrix b;
  double rho = 1.0;
  DistributionSpec theta_dist = DistributionSpec::point_mass(1.0);

  void validate() const;
};

struct GeneratedGraph {
  SparseMatrix a;  // symmetric, zero diagonal, full storage
  Matrix z;
  std::vector<int> membership;  // hard clusters only; empty otherwise
  Density expectation;          // of rho Z B Z^T
};

GeneratedGraph generate_dcsbm(const DcSbmSpec& spec, std::uint64_t seed);

// Z_ij ~ Bernoulli(p_j) independently.
struct OverlappingSbmSpec {
  std::int64_t n = 0;
  int k = 0;
  Vector p;
  Matrix b;
  double rho = 1.0;

  void validate() const;
};

// Z_i ~ Dirichlet(alpha).
struct MixedMembershipSpec {
  std::int64_t n = 0;
  int k = 0;
  Vector alpha;
  Matrix b;
  double rho = 1.0;

  void validate() const;
};

GeneratedGraph generate_overlapping(const OverlappingSbmSpec& spec, std::uint64_t seed);
GeneratedGraph generate_mixed_membership(const MixedMembershipSpec& spec, std::uint64_t seed);

// LDA with Gamma(sum alpha, s) document intensities: X_ij ~ Gamma(alpha_j, s)
// independently, xi_i = sum_j X_ij, Z_i = X_i / xi_i, and
// A_ij ~ Poisson([X beta^T]_ij).
struct LdaSpec {
  std::int64_t n = 0;
  std::int64_t d = 0;
  int k = 0;
  Vector alpha;
  double s = 1.0;
  Matrix beta;  // d x k, columns on the simplex

  void validate() const;
};

struct GeneratedLda {
  SparseMatrix a;
  Matrix z_star;  // X Sigma^{-1/2}, Sigma_jj = alpha_j s^2
  Vector xi;
  Matrix z;  // Dirichlet topic proportions
  Matrix x;  // Xi Z
  Density expectation;
};

GeneratedLda generate_lda(const LdaSpec& spec, std::uint64_t seed);

// E(Z_*) = sqrt(alpha_j) per column.
RowVector lda_z_star_mean(const LdaSpec& spec);
double smallest_singular_value(const Matrix& m);

// Topic matrices for tests and the simulate front end.
// Each column is Dirichlet(concentration * 1_d).
Matrix dirichlet_topics(std::int64_t d, int k, double concentration, std::uint64_t seed);
// Topic j puts weight (1 - leak) uniformly on its own block of d/k words and
// spreads `leak` uniformly over all words.
Matrix block_topics(std::int64_t d, int k, double leak);

struct ColumnIdentifiability {
  double kurtosis;
  bool identifiable;  // kurtosis > 3
};

std::vector<ColumnIdentifiability> identifiability(const std::vector<DistributionSpec>& columns);

// rho that makes n * mean(rho Z B Z^T) equal `delta` in expectation.
double dcsbm_rho_for_delta(const DcSbmSpec& spec, double delta);

}  // namespace vsp
