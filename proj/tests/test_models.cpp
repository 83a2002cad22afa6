#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"
#include "vsp/distributions.hpp"
#include "vsp/error.hpp"
#include "vsp/model_spec.hpp"
#include "vsp/models.hpp"

namespace vsp {
namespace {

double bernoulli_kurtosis(double p) { return (1.0 - 3.0 * p * (1.0 - p)) / (p * (1.0 - p)); }

TEST(Kurtosis, BernoulliFormulaAndBoundary) {
  for (double p : {0.05, 0.1, 0.3, 0.5, 0.7, 0.95})
    EXPECT_NEAR(analytic_kurtosis(DistributionSpec::bernoulli(p)), bernoulli_kurtosis(p), 1e-12);
  for (double sign : {-1.0, 1.0}) {
    const double p = 0.5 + sign / std::sqrt(12.0);
    EXPECT_NEAR(analytic_kurtosis(DistributionSpec::bernoulli(p)), 3.0, 1e-12);
  }
  EXPECT_NEAR(analytic_kurtosis(DistributionSpec::bernoulli(0.5)), 1.0, 1e-12);
}

TEST(Kurtosis, GammaAndUniform) {
  EXPECT_NEAR(analytic_kurtosis(DistributionSpec::gamma(1.0, 2.0)), 9.0, 1e-12);
  for (double a : {0.1, 0.5, 2.0, 10.0})
    EXPECT_NEAR(analytic_kurtosis(DistributionSpec::gamma(a, 1.3)), 3.0 + 6.0 / a, 1e-9 * (3.0 + 6.0 / a));
  EXPECT_NEAR(analytic_kurtosis(DistributionSpec::uniform(-1.0, 3.0)), 1.8, 1e-12);
  EXPECT_NEAR(analytic_kurtosis(DistributionSpec::normal(2.0, 0.5)), 3.0, 1e-12);
  EXPECT_NEAR(analytic_kurtosis(DistributionSpec::exponential(3.0)), 9.0, 1e-12);
  EXPECT_THROW(analytic_kurtosis(DistributionSpec::point_mass(1.0)), NumericalError);
}

TEST(Kurtosis, Shifted) {
  const auto g = DistributionSpec::gamma(0.7, 2.0);
  EXPECT_NEAR(analytic_kurtosis(DistributionSpec::shifted(g, -5.0)), analytic_kurtosis(g), 1e-9);
}

TEST(Kurtosis, SparseHandValues) {
  const RawMoments one{1, 1, 1, 1};
  const auto a = kurtosis_of_sparse(0.1, one);
  EXPECT_NEAR(a.kurtosis, 0.73 / 0.09, 1e-12);
  EXPECT_TRUE(a.leptokurtic);
  EXPECT_TRUE(a.sparsity_condition);
  const auto b = kurtosis_of_sparse(5.0 / 6.0, one);
  EXPECT_NEAR(b.kurtosis, bernoulli_kurtosis(5.0 / 6.0), 1e-12);
  EXPECT_NEAR(b.kurtosis, 4.2, 1e-12);
  EXPECT_TRUE(b.leptokurtic);
  EXPECT_FALSE(b.sparsity_condition);
  EXPECT_FALSE(kurtosis_of_sparse(0.5, one).leptokurtic);
}

TEST(Kurtosis, SparseLawGrid) {
  const std::vector<DistributionSpec> s_specs = {
      DistributionSpec::point_mass(1.0),        DistributionSpec::point_mass(-2.5),
      DistributionSpec::exponential(1.0),       DistributionSpec::gamma(0.3, 2.0),
      DistributionSpec::gamma(20.0, 0.1),       DistributionSpec::uniform(0.0, 1.0),
      DistributionSpec::uniform(-1.0, 4.0),     DistributionSpec::normal(0.0, 1.0),
      DistributionSpec::normal(5.0, 0.01),      DistributionSpec::shifted(DistributionSpec::bernoulli(0.5), 1.0)};
  int checked = 0;
  for (int i = 0; i < 20; ++i) {
    const double p = (i + 0.5) / 20.0 / 6.0;
    for (const auto& s : s_specs) {
      const auto r = kurtosis_of_sparse(p, s.raw_moments());
      EXPECT_TRUE(r.sparsity_condition);
      EXPECT_TRUE(r.leptokurtic) << "p=" << p << " S=" << s.describe() << " kappa=" << r.kurtosis;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 200);
}

TEST(Kurtosis, SumDegenerateW) {
  const std::array<double, 4> x{0, 1, 0.4, 5.0};
  const std::array<double, 4> w{0, 0, 0, 0};
  EXPECT_NEAR(kurtosis_of_sum(x, w).kurtosis, 5.0, 1e-15);
}

TEST(Kurtosis, SumPropositionCases) {
  for (double eps : {0.01, 0.1, 0.5}) {
    const std::array<double, 4> x{0, 1, 0, 3.0 * (1 + eps) * (1 + eps) + 0.01};
    const double w2 = eps / 2.0;
    for (double w4 : {0.0 + w2 * w2, 3.0 * w2 * w2, 100.0 * w2 * w2}) {
      const std::array<double, 4> w{0, w2, 0, w4};
      const auto r = kurtosis_of_sum(x, w, eps);
      EXPECT_TRUE(r.sufficient_condition);
      EXPECT_TRUE(r.leptokurtic) << "eps " << eps << " kappa " << r.kurtosis;
    }
  }
}

TEST(Kurtosis, SumMonteCarlo) {
  // X = standardized shifted Gamma with eta_4 = 3.5 -> shape 12; W ~ N(0, 0.05)
  const double shape = 12.0;
  const std::array<double, 4> x{0, 1, 2.0 / std::sqrt(shape), 3.0 + 6.0 / shape};
  const std::array<double, 4> w{0, 0.05, 0, 3.0 * 0.05 * 0.05};
  const double expect = kurtosis_of_sum(x, w).kurtosis;
  Rng rng(11);
  const int n = 400000;
  Vector s(n);
  for (int i = 0; i < n; ++i)
    s(i) = (rng.gamma(shape, 1.0) - shape) / std::sqrt(shape) + std::sqrt(0.05) * rng.normal();
  const double got = sample_kurtosis(s);
  // SE of sample kurtosis: sqrt(var of (x - mu)^4 / m2^2 ) / sqrt(n), estimated by plug-in
  const Eigen::ArrayXd c = (s.array() - s.mean()) / std::sqrt((s.array() - s.mean()).square().mean());
  const double se = std::sqrt(((c.square().square() - got) - 2.0 * got * (c.square() - 1.0)).square().mean() / n);
  EXPECT_LT(std::abs(got - expect), 3.0 * se) << "expansion " << expect << " MC " << got << " se " << se;
}

TEST(Kurtosis, SampleKurtosis) {
  Vector two(4);
  two << -1, 1, -1, 1;
  EXPECT_DOUBLE_EQ(sample_kurtosis(two), 1.0);
  Rng rng(3);
  const int n = 200000;
  Vector g(n), e(n);
  for (int i = 0; i < n; ++i) {
    g(i) = rng.normal();
    e(i) = rng.exponential(1.0);
  }
  EXPECT_NEAR(sample_kurtosis(g), 3.0, 5.0 * std::sqrt(24.0 / n));
  EXPECT_NEAR(sample_kurtosis(e), 9.0, 0.8);
  EXPECT_THROW(sample_kurtosis(Vector(Vector::Ones(3))), DataError);
  EXPECT_THROW(sample_kurtosis(Vector(Vector::Ones(10))), NumericalError);
}

TEST(Distributions, MomentsMatchDraws) {
  const std::vector<DistributionSpec> specs = {
      DistributionSpec::bernoulli(0.2),          DistributionSpec::scaled_bernoulli(0.1, DistributionSpec::exponential(2.0)),
      DistributionSpec::exponential(1.5),        DistributionSpec::gamma(0.5, 2.0),
      DistributionSpec::gamma(4.0, 0.5),         DistributionSpec::uniform(-1.0, 2.0),
      DistributionSpec::normal(1.0, 2.0),        DistributionSpec::dirichlet({1.0, 2.0, 0.5}, 1),
      DistributionSpec::shifted(DistributionSpec::gamma(2.0, 1.0), -2.0)};
  const int n = 1000000;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    Rng rng(7, s);
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = specs[s].sample(rng);
    const double kappa = analytic_kurtosis(specs[s]);
    const double got = sample_kurtosis(x);
    const Eigen::ArrayXd c = (x.array() - x.mean()) / std::sqrt((x.array() - x.mean()).square().mean());
    const double se =
        std::sqrt(((c.square().square() - got) - 2.0 * got * (c.square() - 1.0)).square().mean() / n);
    EXPECT_LT(std::abs(got - kappa), 3.0 * se + 1e-12) << specs[s].describe() << " analytic " << kappa << " sample " << got;
    EXPECT_NEAR(x.mean(), specs[s].mean(), 5.0 * std::sqrt(specs[s].variance() / n)) << specs[s].describe();
  }
}

TEST(Distributions, ParseRoundTrip) {
  for (const std::string text :
       {"point_mass(2)", "bernoulli(0.25)", "scaled_bernoulli(0.1, exponential(1))", "gamma(0.5, 2)",
        "uniform(-1, 1)", "normal(0, 3)", "dirichlet([1, 2, 3], 2)", "shifted(exponential(1), -1)"}) {
    const auto d = parse_distribution(text);
    const auto again = parse_distribution(d.describe());
    EXPECT_EQ(d.raw_moments(), again.raw_moments()) << text;
  }
  EXPECT_THROW(parse_distribution("cauchy(0, 1)"), DataError);
  EXPECT_THROW(parse_distribution("gamma(1)"), DataError);
  EXPECT_THROW(parse_distribution("bernoulli(1.5)"), DataError);
  EXPECT_THROW(parse_distribution("gamma(-1, 1)"), DataError);
}

TEST(Density, HandAndZero) {
  Matrix m(2, 2);
  m << 1, 2, 3, 5;
  const Density d = compute_density(m);
  EXPECT_DOUBLE_EQ(d.rho, 2.75);
  EXPECT_DOUBLE_EQ(d.rho_bar, 5.0);
  EXPECT_DOUBLE_EQ(d.delta, 5.5);
  const Density z = compute_density(Matrix(Matrix::Zero(3, 3)));
  EXPECT_EQ(z.rho, 0.0);
  EXPECT_EQ(z.rho_bar, 0.0);
  EXPECT_EQ(z.delta, 0.0);
  const Density s = compute_density(SparseMatrix::from_dense(m));
  EXPECT_DOUBLE_EQ(s.delta, 5.5);
}

FactorModelSpec small_factor_spec(NoiseSpec noise) {
  FactorModelSpec s;
  s.n = 500;
  s.d = 500;
  s.k = 2;
  s.b = Matrix::Identity(2, 2);
  s.b(0, 1) = 0.3;
  s.z_dist = {DistributionSpec::exponential(1.0), DistributionSpec::gamma(0.5, 2.0)};
  s.y_dist = {DistributionSpec::uniform(0.0, 1.0), DistributionSpec::bernoulli(0.3)};
  s.noise = noise;
  s.rho = 0.2;
  return s;
}

TEST(FactorModel, ZeroGaussianNoiseIsExact) {
  const auto g = generate_factor_model(small_factor_spec(NoiseSpec::gaussian(0.0)), 4);
  const Matrix expect = 0.2 * g.z * small_factor_spec(NoiseSpec::poisson()).b * g.y.transpose();
  EXPECT_LT((g.a.to_dense() - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(FactorModel, PoissonGrandMean) {
  const auto spec = small_factor_spec(NoiseSpec::poisson());
  const auto g = generate_factor_model(spec, 5);
  const Matrix mean = spec.rho * g.z * spec.b * g.y.transpose();
  const double target = mean.mean();
  const double se = std::sqrt(mean.sum()) / static_cast<double>(mean.size());
  EXPECT_NEAR(compute_density(g.a).rho, target, 3.0 * se);
  EXPECT_NEAR(g.expectation.rho, target, 1e-12);
}

TEST(FactorModel, PointMassExpectationRank) {
  auto spec = small_factor_spec(NoiseSpec::poisson());
  spec.z_dist = {DistributionSpec::point_mass(1.0), DistributionSpec::point_mass(2.0)};
  spec.y_dist = {DistributionSpec::point_mass(1.0), DistributionSpec::point_mass(1.0)};
  const auto g = generate_factor_model(spec, 1);
  const Matrix mean = spec.rho * g.z * spec.b * g.y.transpose();
  const Eigen::JacobiSVD<Matrix> svd(mean);
  EXPECT_EQ((svd.singularValues().array() > 1e-9 * svd.singularValues()(0)).count(), 1);
}

TEST(FactorModel, BernoulliMeanOutOfRange) {
  auto spec = small_factor_spec(NoiseSpec::bernoulli());
  spec.rho = 5.0;
  try {
    generate_factor_model(spec, 1);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("at ("), std::string::npos);
  }
}

TEST(FactorModel, Deterministic) {
  const auto spec = small_factor_spec(NoiseSpec::poisson());
  const auto a = generate_factor_model(spec, 9);
  const auto b = generate_factor_model(spec, 9);
  EXPECT_EQ(a.a.to_dense(), b.a.to_dense());
  EXPECT_EQ(a.z, b.z);
  EXPECT_NE(generate_factor_model(spec, 10).z, a.z);
}

TEST(Dcsbm, DisconnectedBlocks) {
  DcSbmSpec s;
  s.n = 400;
  s.k = 2;
  s.pi = Vector::Constant(2, 0.5);
  s.b = Matrix::Identity(2, 2) * 0.5;
  s.rho = 1.0;
  const auto g = generate_dcsbm(s, 2);  // probabilities 0.5 * theta^2 = 1 within blocks
  const Matrix a = g.a.to_dense();
  int cross = 0;
  for (int i = 0; i < 400; ++i)
    for (int j = 0; j < 400; ++j) cross += g.membership[i] != g.membership[j] && a(i, j) != 0.0;
  EXPECT_EQ(cross, 0);
  EXPECT_EQ(a, a.transpose());
  EXPECT_EQ(a.diagonal().cwiseAbs().sum(), 0.0);
}

TEST(Dcsbm, SecondMomentIsIdentity) {
  DcSbmSpec s;
  s.n = 20000;
  s.k = 3;
  s.pi = Vector(3);
  s.pi << 0.2, 0.3, 0.5;
  s.b = Matrix::Identity(3, 3) * 0.001;
  s.theta_dist = DistributionSpec::uniform(0.5, 1.5);
  const auto g = generate_dcsbm(s, 3);
  const Matrix m = g.z.transpose() * g.z / static_cast<double>(s.n);
  for (int j = 0; j < 3; ++j) {
    const double p = s.pi(j);
    const auto& t = s.theta_dist.raw_moments();
    const double var_z2 = p * t[3] / (p * p * t[1] * t[1]) - 1.0;
    EXPECT_NEAR(m(j, j), 1.0, 3.0 * std::sqrt(var_z2 / s.n));
  }
  EXPECT_EQ(m(0, 1), 0.0);
  EXPECT_NEAR(g.expectation.delta, s.n * g.expectation.rho, 1e-9);
}

TEST(Dcsbm, ProbabilityAboveOneCitesPair) {
  DcSbmSpec s;
  s.n = 50;
  s.k = 2;
  s.pi = Vector::Constant(2, 0.5);
  s.b = Matrix::Identity(2, 2);
  s.rho = 0.6;  // theta^2 = 2 -> probability 1.2 on the diagonal blocks
  try {
    generate_dcsbm(s, 1);
    FAIL();
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("1.2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("("), std::string::npos) << msg;
  }
}

TEST(Dcsbm, RhoForDelta) {
  DcSbmSpec s;
  s.n = 2000;
  s.k = 3;
  s.pi = Vector::Constant(3, 1.0 / 3.0);
  s.b = Matrix::Constant(3, 3, 0.2) + Matrix::Identity(3, 3) * 0.8;
  s.theta_dist = DistributionSpec::uniform(0.5, 1.5);
  s.rho = dcsbm_rho_for_delta(s, 40.0);
  double total = 0.0;
  for (int seed = 0; seed < 5; ++seed) total += generate_dcsbm(s, seed).expectation.delta;
  EXPECT_NEAR(total / 5.0, 40.0, 1.0);
}

TEST(Overlapping, IdentifiabilityFlags) {
  const auto lo = identifiability({DistributionSpec::bernoulli(0.1)});
  EXPECT_TRUE(lo[0].identifiable);
  EXPECT_GT(lo[0].kurtosis, 3.0);
  const auto half = identifiability({DistributionSpec::bernoulli(0.5)});
  EXPECT_FALSE(half[0].identifiable);
  EXPECT_NEAR(half[0].kurtosis, 1.0, 1e-12);

  OverlappingSbmSpec s;
  s.n = 300;
  s.k = 2;
  s.p = Vector::Constant(2, 0.1);
  s.b = Matrix::Identity(2, 2);
  s.rho = 0.3;
  const auto g = generate_overlapping(s, 1);
  EXPECT_TRUE(((g.z.array() == 0.0) || (g.z.array() == 1.0)).all());
  EXPECT_EQ(g.a.to_dense(), g.a.to_dense().transpose());
}

TEST(MixedMembership, RowsSumToOne) {
  MixedMembershipSpec s;
  s.n = 500;
  s.k = 3;
  s.alpha = Vector::Constant(3, 0.3);
  s.b = Matrix::Identity(3, 3);
  s.rho = 0.1;
  const auto g = generate_mixed_membership(s, 4);
  for (Eigen::Index i = 0; i < g.z.rows(); ++i) EXPECT_NEAR(g.z.row(i).sum(), 1.0, 1e-14);
  EXPECT_TRUE((g.z.array() >= 0.0).all());
}

LdaSpec lda_spec(double s) {
  LdaSpec spec;
  spec.n = 20000;
  spec.d = 60;
  spec.k = 3;
  spec.alpha = Vector::Constant(3, 0.8);
  spec.s = s;
  spec.beta = block_topics(60, 3, 0.1);
  return spec;
}

TEST(Lda, NegativeBinomialOverdispersion) {
  const auto spec = lda_spec(2.0);
  const auto g = generate_lda(spec, 5);
  const Vector lengths = g.a.to_dense().rowwise().sum();
  const double mean = lengths.mean();
  const double var = (lengths.array() - mean).square().sum() / (lengths.size() - 1);
  // N_i ~ NegBin with mean alpha0 s and variance mean (1 + s)
  EXPECT_NEAR(mean, 2.4 * 2.0, 0.1);
  EXPECT_NEAR(var / mean, 1.0 + spec.s, 0.15);
}

TEST(Lda, ZStarWhitened) {
  const auto spec = lda_spec(1.5);
  const auto g = generate_lda(spec, 6);
  const RowVector mu = lda_z_star_mean(spec);
  for (int j = 0; j < 3; ++j) {
    const Vector c = g.z_star.col(j).array() - g.z_star.col(j).mean();
    const double var = c.squaredNorm() / spec.n;
    const double kappa = 3.0 + 6.0 / spec.alpha(j);
    EXPECT_NEAR(var, 1.0, 3.0 * std::sqrt((kappa - 1.0) / spec.n));
    EXPECT_NEAR(g.z_star.col(j).mean(), mu(j), 4.0 / std::sqrt(spec.n));
  }
  EXPECT_LT((g.x - g.xi.asDiagonal() * g.z).cwiseAbs().maxCoeff(), 1e-10);
  const auto flags = identifiability({DistributionSpec::gamma(0.8, 1.5)});
  EXPECT_NEAR(flags[0].kurtosis, 3.0 + 6.0 / 0.8, 1e-9);
  EXPECT_TRUE(flags[0].identifiable);
}

TEST(Lda, TopicHelpers) {
  const Matrix b = block_topics(30, 3, 0.2);
  EXPECT_LT((b.colwise().sum().array() - 1.0).abs().maxCoeff(), 1e-14);
  const Matrix d = dirichlet_topics(30, 3, 0.5, 2);
  EXPECT_LT((d.colwise().sum().array() - 1.0).abs().maxCoeff(), 1e-14);
  EXPECT_TRUE((d.array() >= 0.0).all());
}

TEST(ModelSpec, ParsesFactorSpec) {
  const auto kv = KeyValueSpec::parse(
      "# comment\nn = 100\nd = 80\nk = 2\nb = 1, 0.2; 0, 1\nz_dist = exponential(1)\n"
      "y_dist.2 = bernoulli(0.2)\ny_dist = uniform(0, 1)\nnoise = gaussian(0.5)\nrho = 0.3\n");
  const auto s = factor_spec_from(kv);
  EXPECT_EQ(s.n, 100);
  EXPECT_EQ(s.k, 2);
  EXPECT_DOUBLE_EQ(s.b(0, 1), 0.2);
  EXPECT_EQ(s.z_dist[1].family(), DistributionSpec::Family::exponential);
  EXPECT_EQ(s.y_dist[0].family(), DistributionSpec::Family::uniform);
  EXPECT_EQ(s.y_dist[1].family(), DistributionSpec::Family::bernoulli);
  EXPECT_EQ(s.noise.kind, NoiseSpec::Kind::gaussian);
  EXPECT_DOUBLE_EQ(s.noise.sigma, 0.5);
}

TEST(ModelSpec, Errors) {
  EXPECT_THROW(KeyValueSpec::parse("n = 1\nn = 2\n"), DataError);
  EXPECT_THROW(KeyValueSpec::parse("just text\n"), DataError);
  const auto kv = KeyValueSpec::parse("n = 10\nk = 2\nb = 1, 0; 0, 1\nrho = 0.1\nbogus = 3\n");
  EXPECT_THROW(dcsbm_spec_from(kv, true), DataError);
  const auto bad = KeyValueSpec::parse("n = ten\nk = 2\nb = 1, 0; 0, 1\nrho = 0.1\n");
  EXPECT_THROW(dcsbm_spec_from(bad, true), DataError);
}

}  // namespace
}  // namespace vsp
