#include "vsp/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vsp/error.hpp"
#include "vsp/rng.hpp"

namespace vsp {

namespace {

enum Stream : std::uint64_t { kFactorsZ = 1, kFactorsY = 2, kEntries = 3, kMembership = 4, kTheta = 5, kTopics = 6 };

void check_square(const Matrix& b, int k, const char* who) {
  if (b.rows() != k || b.cols() != k) {
    throw DataError(std::string(who) + ": B must be " + std::to_string(k) + "x" + std::to_string(k));
  }
  if (!b.allFinite()) throw DataError(std::string(who) + ": B has non-finite entries");
}

std::string pair_str(std::int64_t i, std::int64_t j) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

bool all_dirichlet(const std::vector<DistributionSpec>& cols) {
  return !cols.empty() && std::all_of(cols.begin(), cols.end(), [](const DistributionSpec& d) {
    return d.family() == DistributionSpec::Family::dirichlet;
  });
}

Matrix sample_columns(const std::vector<DistributionSpec>& cols, std::int64_t rows, Rng& rng) {
  const auto k = static_cast<Eigen::Index>(cols.size());
  Matrix out(rows, k);
  if (all_dirichlet(cols)) {
    const auto& params = cols.front().params();
    const std::vector<double> alpha(params.begin(), params.end() - 1);
    if (static_cast<Eigen::Index>(alpha.size()) != k) throw DataError("dirichlet rows must have k components");
    for (std::int64_t i = 0; i < rows; ++i) sample_dirichlet_row(alpha, rng, out.row(i));
    return out;
  }
  for (std::int64_t i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) out(i, j) = cols[j].sample(rng);
  }
  return out;
}

// Upper-triangle Bernoulli(rho [Z B Z^T]_ij) mirrored to full storage.
SparseMatrix sample_symmetric_bernoulli(const Matrix& z, const Matrix& b, double rho, Rng& rng) {
  const std::int64_t n = z.rows();
  const Matrix zb = rho * z * b;
  std::vector<Triplet> edges;
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = i + 1; j < n; ++j) {
      const double p = zb.row(i).dot(z.row(j));
      if (p > 1.0) {
        throw DataError("edge probability " + std::to_string(p) + " exceeds 1 at " + pair_str(i, j));
      }
      if (p < 0.0) {
        throw DataError("edge probability " + std::to_string(p) + " is negative at " + pair_str(i, j));
      }
      if (rng.uniform() < p) {
        edges.push_back({i, j, 1.0});
        edges.push_back({j, i, 1.0});
      }
    }
  }
  return SparseMatrix::from_triplets(n, n, std::move(edges));
}

// Grand mean and max |entry| of rho Z B Y^T without forming it.
Density expectation_density(const Matrix& z, const Matrix& b, const Matrix& y, double rho) {
  Density d;
  const double n = static_cast<double>(z.rows());
  const double m = static_cast<double>(y.rows());
  const RowVector zsum = z.colwise().sum();
  const Vector ysum = y.colwise().sum().transpose();
  d.rho = rho * (zsum * b * ysum)(0, 0) / (n * m);
  const Matrix zb = rho * z * b;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    d.rho_bar = std::max(d.rho_bar, (y * zb.row(i).transpose()).cwiseAbs().maxCoeff());
  }
  d.delta = n * d.rho;
  return d;
}

void check_stochastic(const Vector& pi, const char* who) {
  if ((pi.array() < 0.0).any() || std::abs(pi.sum() - 1.0) > 1e-10) {
    throw DataError(std::string(who) + ": pi must be a probability vector");
  }
}

}  // namespace

void FactorModelSpec::validate() const {
  if (n < 1 || d < 1 || k < 1) throw DataError("factor model: n, d, k must be positive");
  check_square(b, k, "factor model");
  if (smallest_singular_value(b) <= 1e-10) throw DataError("factor model: B must be full rank");
  if (static_cast<int>(z_dist.size()) != k || static_cast<int>(y_dist.size()) != k) {
    throw DataError("factor model: need one z and one y distribution per column");
  }
  if (!(rho > 0.0)) throw DataError("factor model: rho must be positive");
  if (noise.kind == NoiseSpec::Kind::gaussian && !(noise.sigma >= 0.0)) {
    throw DataError("factor model: gaussian sigma must be nonnegative");
  }
}

GeneratedFactorModel generate_factor_model(const FactorModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng zr(seed, kFactorsZ);
  Rng yr(seed, kFactorsY);
  Rng er(seed, kEntries);
  GeneratedFactorModel out;
  out.z = sample_columns(spec.z_dist, spec.n, zr);
  out.y = sample_columns(spec.y_dist, spec.d, yr);
  out.expectation = expectation_density(out.z, spec.b, out.y, spec.rho);

  const Matrix zb = spec.rho * out.z * spec.b;
  std::vector<SparseMatrix::Offset> offsets(spec.n + 1, 0);
  std::vector<SparseMatrix::ColIndex> cols;
  std::vector<double> vals;
  Vector mean_row(spec.d);
  for (std::int64_t i = 0; i < spec.n; ++i) {
    mean_row.noalias() = out.y * zb.row(i).transpose();
    for (std::int64_t j = 0; j < spec.d; ++j) {
      const double m = mean_row[j];
      double v = 0.0;
      switch (spec.noise.kind) {
        case NoiseSpec::Kind::gaussian:
          v = spec.noise.sigma > 0.0 ? m + spec.noise.sigma * er.normal() : m;
          break;
        case NoiseSpec::Kind::poisson:
          if (m < 0.0) throw DataError("poisson mean " + std::to_string(m) + " is negative at " + pair_str(i, j));
          v = static_cast<double>(er.poisson(m));
          break;
        case NoiseSpec::Kind::bernoulli:
          if (m < 0.0 || m > 1.0) {
            throw DataError("bernoulli mean " + std::to_string(m) + " outside [0, 1] at " + pair_str(i, j));
          }
          v = er.uniform() < m ? 1.0 : 0.0;
          break;
      }
      if (v != 0.0) {
        cols.push_back(static_cast<SparseMatrix::ColIndex>(j));
        vals.push_back(v);
      }
    }
    offsets[i + 1] = static_cast<SparseMatrix::Offset>(vals.size());
  }
  out.a = SparseMatrix(spec.n, spec.d, std::move(offsets), std::move(cols), std::move(vals));
  return out;
}

void DcSbmSpec::validate() const {
  if (n < 1 || k < 1) throw DataError("dcsbm: n and k must be positive");
  if (pi.size() != k) throw DataError("dcsbm: pi must have k entries");
  check_stochastic(pi, "dcsbm");
  check_square(b, k, "dcsbm");
  if ((b.array() < 0.0).any()) throw DataError("dcsbm: B must be nonnegative");
  if (!(rho > 0.0)) throw DataError("dcsbm: rho must be positive");
  const auto& raw = theta_dist.raw_moments();
  if (!(raw[1] > 0.0)) throw DataError("dcsbm: theta distribution has zero second moment");
  const auto fam = theta_dist.family();
  using F = DistributionSpec::Family;
  const bool bounded_positive = (fam == F::point_mass && theta_dist.params()[0] > 0.0) ||
                                (fam == F::uniform && theta_dist.params()[0] > 0.0);
  if (!bounded_positive) throw DataError("dcsbm: theta distribution must be bounded and positive");
}

GeneratedGraph generate_dcsbm(const DcSbmSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng mr(seed, kMembership);
  Rng tr(seed, kTheta);
  Rng er(seed, kEntries);
  GeneratedGraph out;
  out.z = Matrix::Zero(spec.n, spec.k);
  out.membership.resize(spec.n);
  const double second = spec.theta_dist.second_moment();
  for (std::int64_t i = 0; i < spec.n; ++i) {
    const double u = mr.uniform();
    int block = spec.k - 1;
    double cum = 0.0;
    for (int j = 0; j < spec.k; ++j) {
      cum += spec.pi[j];
      if (u < cum) {
        block = j;
        break;
      }
    }
    out.membership[i] = block;
    const double theta = spec.theta_dist.sample(tr);
    out.z(i, block) = theta / std::sqrt(spec.pi[block] * second);
  }
  out.expectation = expectation_density(out.z, spec.b, out.z, spec.rho);
  out.a = sample_symmetric_bernoulli(out.z, spec.b, spec.rho, er);
  return out;
}

void OverlappingSbmSpec::validate() const {
  if (n < 1 || k < 1) throw DataError("overlapping sbm: n and k must be positive");
  if (p.size() != k || (p.array() < 0.0).any() || (p.array() > 1.0).any()) {
    throw DataError("overlapping sbm: p must have k entries in [0, 1]");
  }
  check_square(b, k, "overlapping sbm");
  if (!(rho > 0.0)) throw DataError("overlapping sbm: rho must be positive");
}

void MixedMembershipSpec::validate() const {
  if (n < 1 || k < 2) throw DataError("mixed membership: n >= 1 and k >= 2 required");
  if (alpha.size() != k || (alpha.array() <= 0.0).any()) {
    throw DataError("mixed membership: alpha must have k positive entries");
  }
  check_square(b, k, "mixed membership");
  if (!(rho > 0.0)) throw DataError("mixed membership: rho must be positive");
}

GeneratedGraph generate_overlapping(const OverlappingSbmSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng zr(seed, kFactorsZ);
  Rng er(seed, kEntries);
  GeneratedGraph out;
  out.z = Matrix::Zero(spec.n, spec.k);
  for (std::int64_t i = 0; i < spec.n; ++i) {
    for (int j = 0; j < spec.k; ++j) out.z(i, j) = zr.bernoulli(spec.p[j]) ? 1.0 : 0.0;
  }
  out.expectation = expectation_density(out.z, spec.b, out.z, spec.rho);
  out.a = sample_symmetric_bernoulli(out.z, spec.b, spec.rho, er);
  return out;
}

GeneratedGraph generate_mixed_membership(const MixedMembershipSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng zr(seed, kFactorsZ);
  Rng er(seed, kEntries);
  GeneratedGraph out;
  out.z = Matrix::Zero(spec.n, spec.k);
  const std::vector<double> alpha(spec.alpha.data(), spec.alpha.data() + spec.k);
  for (std::int64_t i = 0; i < spec.n; ++i) sample_dirichlet_row(alpha, zr, out.z.row(i));
  out.expectation = expectation_density(out.z, spec.b, out.z, spec.rho);
  out.a = sample_symmetric_bernoulli(out.z, spec.b, spec.rho, er);
  return out;
}

void LdaSpec::validate() const {
  if (n < 1 || d < 1 || k < 1) throw DataError("lda: n, d, k must be positive");
  if (alpha.size() != k || (alpha.array() <= 0.0).any()) throw DataError("lda: alpha must have k positive entries");
  if (!(s > 0.0)) throw DataError("lda: s must be positive");
  if (beta.rows() != d || beta.cols() != k) throw DataError("lda: beta must be d x k");
  if ((beta.array() < 0.0).any()) throw DataError("lda: beta must be nonnegative");
  for (int j = 0; j < k; ++j) {
    if (std::abs(beta.col(j).sum() - 1.0) > 1e-10) {
      throw DataError("lda: column " + std::to_string(j) + " of beta does not sum to 1");
    }
  }
}

GeneratedLda generate_lda(const LdaSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng xr(seed, kFactorsZ);
  Rng er(seed, kEntries);
  GeneratedLda out;
  out.x.resize(spec.n, spec.k);
  for (std::int64_t i = 0; i < spec.n; ++i) {
    for (int j = 0; j < spec.k; ++j) out.x(i, j) = xr.gamma(spec.alpha[j], spec.s);
  }
  out.xi = out.x.rowwise().sum();
  out.z = out.xi.cwiseInverse().asDiagonal() * out.x;
  const Vector inv_sd = (spec.alpha.array().sqrt() * spec.s).inverse().matrix();
  out.z_star = out.x * inv_sd.asDiagonal();
  out.expectation = expectation_density(out.x, Matrix::Identity(spec.k, spec.k), spec.beta, 1.0);

  std::vector<SparseMatrix::Offset> offsets(spec.n + 1, 0);
  std::vector<SparseMatrix::ColIndex> cols;
  std::vector<double> vals;
  Vector mean_row(spec.d);
  for (std::int64_t i = 0; i < spec.n; ++i) {
    mean_row.noalias() = spec.beta * out.x.row(i).transpose();
    for (std::int64_t j = 0; j < spec.d; ++j) {
      const auto c = er.poisson(mean_row[j]);
      if (c != 0) {
        cols.push_back(static_cast<SparseMatrix::ColIndex>(j));
        vals.push_back(static_cast<double>(c));
      }
    }
    offsets[i + 1] = static_cast<SparseMatrix::Offset>(vals.size());
  }
  out.a = SparseMatrix(spec.n, spec.d, std::move(offsets), std::move(cols), std::move(vals));
  return out;
}

RowVector lda_z_star_mean(const LdaSpec& spec) { return spec.alpha.array().sqrt().matrix().transpose(); }

double smallest_singular_value(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().minCoeff();
}

Matrix dirichlet_topics(std::int64_t d, int k, double concentration, std::uint64_t seed) {
  if (d < 1 || k < 1 || !(concentration > 0.0)) throw DataError("dirichlet_topics: invalid arguments");
  Rng rng(seed, kTopics);
  Matrix beta(d, k);
  const std::vector<double> alpha(static_cast<std::size_t>(d), concentration);
  RowVector col(d);
  for (int j = 0; j < k; ++j) {
    sample_dirichlet_row(alpha, rng, col);
    beta.col(j) = col.transpose();
  }
  return beta;
}

Matrix block_topics(std::int64_t d, int k, double leak) {
  if (d < k || k < 1 || leak < 0.0 || leak > 1.0) throw DataError("block_topics: invalid arguments");
  Matrix beta = Matrix::Constant(d, k, leak / static_cast<double>(d));
  for (int j = 0; j < k; ++j) {
    const std::int64_t begin = d * j / k;
    const std::int64_t end = d * (j + 1) / k;
    const double w = (1.0 - leak) / static_cast<double>(end - begin);
    for (std::int64_t r = begin; r < end; ++r) beta(r, j) += w;
  }
  return beta;
}

std::vector<ColumnIdentifiability> identifiability(const std::vector<DistributionSpec>& columns) {
  std::vector<ColumnIdentifiability> out;
  out.reserve(columns.size());
  for (const auto& c : columns) {
    const double kappa = analytic_kurtosis(c);
    out.push_back({kappa, kappa > 3.0});
  }
  return out;
}

double dcsbm_rho_for_delta(const DcSbmSpec& spec, double delta) {
  const auto& raw = spec.theta_dist.raw_moments();
  Vector m(spec.k);
  for (int a = 0; a < spec.k; ++a) m[a] = std::sqrt(spec.pi[a]) * raw[0] / std::sqrt(raw[1]);
  const double mean = m.dot(spec.b * m);
  if (!(mean > 0.0)) throw DataError("dcsbm_rho_for_delta: expected mean is zero");
  return delta / (static_cast<double>(spec.n) * mean);
}

}  // namespace vsp
