#include "vsp/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vsp/error.hpp"

namespace vsp {

namespace {

constexpr int kMaxReplacementAttempts = 8;
constexpr Eigen::Index kOracleGuard = 500;

// Removes the components of q.col(j) along columns [0, j) twice.
double project_out(Matrix& q, Eigen::Index j) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const double c = q.col(i).dot(q.col(j));
      q.col(j).noalias() -= c * q.col(i);
    }
  }
  return q.col(j).norm();
}

void sort_triplets_desc(SvdResult& r) {
  const Eigen::Index k = r.singular_values.size();
  std::vector<Eigen::Index> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return r.singular_values[a] > r.singular_values[b];
  });
  SvdResult s{Matrix(r.u.rows(), k), Vector(k), Matrix(r.v.rows(), k)};
  for (Eigen::Index j = 0; j < k; ++j) {
    s.u.col(j) = r.u.col(idx[j]);
    s.v.col(j) = r.v.col(idx[j]);
    s.singular_values[j] = r.singular_values[idx[j]];
  }
  r = std::move(s);
}

// Extends the orthonormal columns [0, j) of q to column j using canonical
// basis vectors; used only for null directions of the dense oracle.
void complete_basis_column(Matrix& q, Eigen::Index j) {
  for (Eigen::Index e = 0; e < q.rows(); ++e) {
    q.col(j).setZero();
    q(e, j) = 1.0;
    const double norm = project_out(q, j);
    if (norm > 1e-6) {
      q.col(j) /= norm;
      return;
    }
  }
  throw NumericalError("cannot complete orthonormal basis");
}

}  // namespace

void orthonormalize_columns(Matrix& q, Rng& rng) {
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const double original = q.col(j).norm();
    double norm = project_out(q, j);
    int attempts = 0;
    while (!(norm > 1e-10 * std::max(original, 1e-300)) || !std::isfinite(norm)) {
      if (++attempts > kMaxReplacementAttempts || j >= q.rows()) {
        throw NumericalError("orthonormalize: unable to extend basis at column " + std::to_string(j));
      }
      for (Eigen::Index i = 0; i < q.rows(); ++i) q(i, j) = rng.normal();
      norm = project_out(q, j);
    }
    q.col(j) /= norm;
  }
}

SvdResult truncated_svd(const LinearOperator& op, int k, std::uint64_t seed, const SvdOptions& options) {
  const std::int64_t n = op.rows();
  const std::int64_t d = op.cols();
  if (n == 0 || d == 0) throw DataError("truncated_svd: operator has a zero dimension");
  if (k < 1 || k > std::min(n, d)) {
    throw DataError("truncated_svd: k=" + std::to_string(k) + " must lie in [1, " +
                    std::to_string(std::min(n, d)) + "]");
  }
  if (options.oversample < 0 || options.power_iters < 0) {
    throw DataError("truncated_svd: oversample and power_iters must be nonnegative");
  }
  const Eigen::Index width = std::min<std::int64_t>(k + options.oversample, std::min(n, d));

  Rng rng(seed);
  Matrix omega = rng.normal_matrix(d, width);
  Matrix q = op.apply(omega);
  orthonormalize_columns(q, rng);
  for (int it = 0; it < options.power_iters; ++it) {
    Matrix w = op.apply_adjoint(q);
    orthonormalize_columns(w, rng);
    q = op.apply(w);
    orthonormalize_columns(q, rng);
  }

  // Rayleigh-Ritz: M^T Q = W_svd -> M ~ Q (Q^T M) = Q V_w S U_w^T
  const Matrix w = op.apply_adjoint(q);
  Eigen::JacobiSVD<Matrix> small(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult r;
  r.u = q * small.matrixV().leftCols(k);
  r.v = small.matrixU().leftCols(k);
  r.singular_values = small.singularValues().head(k);
  return r;
}

SvdResult dense_svd_oracle(const Matrix& m) {
  if (std::min(m.rows(), m.cols()) > kOracleGuard) {
    throw DataError("dense_svd_oracle: min dimension exceeds 500");
  }
  if (m.rows() < m.cols()) {
    SvdResult t = dense_svd_oracle(m.transpose());
    std::swap(t.u, t.v);
    return t;
  }
  // Hestenes one-sided Jacobi: rotate column pairs of W = M V until all
  // pairs are orthogonal; then sigma_j = |w_j| and u_j = w_j / sigma_j.
  const Eigen::Index cols = m.cols();
  Matrix w = m;
  Matrix v = Matrix::Identity(cols, cols);
  const double eps = 1e-15;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p + 1 < cols; ++p) {
      for (Eigen::Index q = p + 1; q < cols; ++q) {
        const double alpha = w.col(p).squaredNorm();
        const double beta = w.col(q).squaredNorm();
        const double gamma = w.col(p).dot(w.col(q));
        if (gamma == 0.0) continue;
        const double rel = std::abs(gamma) / std::sqrt(alpha * beta);
        off = std::max(off, rel);
        if (rel < eps) continue;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
          const double wp = w(i, p);
          const double wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (Eigen::Index i = 0; i < cols; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (off < eps) break;
  }
  Vector sigma(cols);
  for (Eigen::Index j = 0; j < cols; ++j) sigma[j] = w.col(j).norm();
  SvdResult r{std::move(w), std::move(sigma), std::move(v)};
  sort_triplets_desc(r);
  const double tiny = std::max(r.singular_values.size() ? r.singular_values[0] : 0.0, 1.0) * 1e-13;
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (r.singular_values[j] > tiny) {
      r.u.col(j) /= r.singular_values[j];
    } else {
      r.singular_values[j] = 0.0;
      complete_basis_column(r.u, j);
    }
  }
  return r;
}

}  // namespace vsp
