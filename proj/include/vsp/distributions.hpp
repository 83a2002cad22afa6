#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vsp/rng.hpp"
#include "vsp/sparse_matrix.hpp"
#include "vsp/types.hpp"

namespace vsp {

// Raw moments E X^j for j = 1..4.
using RawMoments = std::array<double, 4>;

// Mean followed by central moments eta_2, eta_3, eta_4.
struct CentralMoments {
  double mean = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
};

CentralMoments central_from_raw(const RawMoments& raw);

// A scalar law with closed-form raw moments 1..4. Parameterizations:
//   point_mass(v), bernoulli(p), scaled_bernoulli(p, S) = S * Bernoulli(p),
//   exponential(rate), gamma(shape, scale), uniform(a, b), normal(mean, sd),
//   dirichlet(alpha, j) = marginal j of a Dirichlet(alpha) row,
//   shifted(base, c) = base + c.
class DistributionSpec {
 public:
  enum class Family { point_mass, bernoulli, scaled_bernoulli, exponential, gamma, uniform, normal, dirichlet, shifted };

  static DistributionSpec point_mass(double v);
  static DistributionSpec bernoulli(double p);
  static DistributionSpec scaled_bernoulli(double p, DistributionSpec s);
  static DistributionSpec exponential(double rate);
  static DistributionSpec gamma(double shape, double scale);
  static DistributionSpec uniform(double a, double b);
  static DistributionSpec normal(double mean, double sd);
  static DistributionSpec dirichlet(std::vector<double> alpha, int component);
  static DistributionSpec shifted(DistributionSpec base, double c);

  Family family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  const DistributionSpec* inner() const { return inner_.get(); }

  const RawMoments& raw_moments() const { return raw_; }
  CentralMoments central_moments() const { return central_from_raw(raw_); }
  double mean() const { return raw_[0]; }
  double variance() const { return central_moments().m2; }
  double second_moment() const { return raw_[1]; }

  // One draw. A dirichlet spec draws its marginal (a Beta variable); use
  // sample_dirichlet_row for joint rows.
  double sample(Rng& rng) const;

  // Round-trips through parse_distribution.
  std::string describe() const;

 private:
  DistributionSpec(Family f, std::vector<double> params, std::shared_ptr<const DistributionSpec> inner);
  RawMoments compute_raw() const;

  Family family_;
  std::vector<double> params_;
  std::shared_ptr<const DistributionSpec> inner_;
  RawMoments raw_{};
};

// Parses the describe() grammar, e.g. "gamma(0.5, 2)",
// "scaled_bernoulli(0.1, exponential(1))", "dirichlet([1, 1, 1], 0)".
DistributionSpec parse_distribution(const std::string& text);

void sample_dirichlet_row(const std::vector<double>& alpha, Rng& rng, Eigen::Ref<RowVector, 0, Eigen::InnerStride<>> out);

// kappa = eta_4 / eta_2^2. Throws NumericalError when eta_2 = 0.
double analytic_kurtosis(const DistributionSpec& dist);
double kurtosis_from_raw(const RawMoments& raw);

struct SparseKurtosis {
  double kurtosis;
  bool leptokurtic;      // kurtosis > 3
  bool sparsity_condition;  // P(X = 0) >= 1 - p > 5/6
};

// X = S * Bernoulli(p): E X^j = p E S^j.
SparseKurtosis kurtosis_of_sparse(double p, const RawMoments& s_raw);

struct SumKurtosis {
  double kurtosis;
  bool leptokurtic;
  // eta_{w,2} < eps and eta_{x,4} >= 3 (1 + eps)^2 for the given eps, or for
  // some eps > 0 when none is given.
  bool sufficient_condition;
};

// Kurtosis of X + W for independent X, W from their central moments
// {eta_1, eta_2, eta_3, eta_4}; eta_{x,2} must equal 1.
SumKurtosis kurtosis_of_sum(const std::array<double, 4>& x_central, const std::array<double, 4>& w_central,
                            std::optional<double> epsilon = std::nullopt);

// Uncorrected m4 / m2^2. Throws DataError for fewer than 4 values and
// NumericalError for a constant vector.
double sample_kurtosis(const Eigen::Ref<const Vector>& x);

struct Density {
  double rho = 0.0;      // grand mean
  double rho_bar = 0.0;  // max |entry|
  double delta = 0.0;    // n_rows * rho
};

Density compute_density(const SparseMatrix& m);
Density compute_density(const Matrix& m);

}  // namespace vsp
