#include "vsp/linear_operator.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "vsp/error.hpp"
#include "vsp/parallel.hpp"

namespace vsp {

namespace {
constexpr std::size_t kAdjointPartitions = 16;
constexpr std::int64_t kDenseGuard = 1'000'000;
}  // namespace

int default_thread_count() {
  if (const char* env = std::getenv("VSP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_chunks(std::size_t chunks, int threads, const std::function<void(std::size_t)>& body) {
  const auto workers = std::min<std::size_t>(chunks, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < chunks; c += workers) body(c);
    });
  }
  for (auto& t : pool) t.join();
}

LinearOperator::LinearOperator(std::shared_ptr<const SparseMatrix> a, std::optional<ScalingStats> scale,
                               std::optional<CenteringStats> center, CenterMode mode, int threads)
    : matrix_(std::move(a)),
      scale_(std::move(scale)),
      center_(std::move(center)),
      mode_(mode),
      threads_(threads > 0 ? threads : default_thread_count()) {
  if (!matrix_) throw std::invalid_argument("LinearOperator: null matrix");
  const auto n = matrix_->rows();
  const auto d = matrix_->cols();
  if (scale_) {
    if (scale_->row_degrees.size() != n || scale_->col_degrees.size() != d) {
      throw DataError("scaling stats are " + std::to_string(scale_->row_degrees.size()) + "x" +
                      std::to_string(scale_->col_degrees.size()) + ", matrix is " + std::to_string(n) +
                      "x" + std::to_string(d));
    }
    inv_row_scale_ = scale_->row_scale().cwiseInverse();
    inv_col_scale_ = scale_->col_scale().cwiseInverse();
  }
  if (center_) {
    if (center_->row_means.size() != n || center_->col_means.size() != d) {
      throw DataError("centering stats are " + std::to_string(center_->row_means.size()) + "x" +
                      std::to_string(center_->col_means.size()) + ", matrix is " + std::to_string(n) +
                      "x" + std::to_string(d));
    }
  }
}

Matrix LinearOperator::sparse_product(const Matrix& x) const {
  const auto& a = *matrix_;
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  const Eigen::Index m = x.cols();
  // Work on transposes so each gathered row of x is a contiguous column.
  const Matrix xt = x.transpose();
  Matrix yt = Matrix::Zero(m, a.rows());
  const std::size_t chunks = static_cast<std::size_t>(std::min<std::int64_t>(a.rows(), 64));
  parallel_chunks(chunks, threads_, [&](std::size_t c) {
    const std::int64_t begin = a.rows() * static_cast<std::int64_t>(c) / static_cast<std::int64_t>(chunks);
    const std::int64_t end = a.rows() * static_cast<std::int64_t>(c + 1) / static_cast<std::int64_t>(chunks);
    for (std::int64_t i = begin; i < end; ++i) {
      auto out = yt.col(i);
      for (auto p = offsets[i]; p < offsets[i + 1]; ++p) out.noalias() += vals[p] * xt.col(cols[p]);
    }
  });
  return yt.transpose();
}

Matrix LinearOperator::sparse_adjoint_product(const Matrix& y) const {
  const auto& a = *matrix_;
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  const Eigen::Index m = y.cols();
  const Matrix yt = y.transpose();
  const std::size_t parts =
      static_cast<std::size_t>(std::max<std::int64_t>(1, std::min<std::int64_t>(a.rows(), kAdjointPartitions)));
  std::vector<Matrix> partial(parts);
  parallel_chunks(parts, threads_, [&](std::size_t c) {
    Matrix acc = Matrix::Zero(m, a.cols());
    const std::int64_t begin = a.rows() * static_cast<std::int64_t>(c) / static_cast<std::int64_t>(parts);
    const std::int64_t end = a.rows() * static_cast<std::int64_t>(c + 1) / static_cast<std::int64_t>(parts);
    for (std::int64_t i = begin; i < end; ++i) {
      const auto src = yt.col(i);
      for (auto p = offsets[i]; p < offsets[i + 1]; ++p) acc.col(cols[p]).noalias() += vals[p] * src;
    }
    partial[c] = std::move(acc);
  });
  Matrix total = std::move(partial[0]);
  for (std::size_t c = 1; c < parts; ++c) total += partial[c];
  return total.transpose();
}

Matrix LinearOperator::apply(const Matrix& x) const {
  if (x.rows() != cols()) {
    throw DataError("operator apply: expected " + std::to_string(cols()) + " rows, got " +
                    std::to_string(x.rows()));
  }
  Matrix y;
  if (scale_) {
    y = sparse_product(inv_col_scale_.asDiagonal() * x);
    y = inv_row_scale_.asDiagonal() * y;
  } else {
    y = sparse_product(x);
  }
  if (center_) {
    const RowVector col_proj = center_->col_means.transpose() * x;  // mu_c x
    if (mode_ == CenterMode::full) {
      const RowVector ones_x = x.colwise().sum();  // 1_d^T x
      y.noalias() -= center_->row_means * ones_x;
      y.rowwise() -= col_proj - center_->grand_mean * ones_x;
    } else {
      y.rowwise() -= col_proj;
    }
  }
  return y;
}

Matrix LinearOperator::apply_adjoint(const Matrix& y) const {
  if (y.rows() != rows()) {
    throw DataError("operator adjoint: expected " + std::to_string(rows()) + " rows, got " +
                    std::to_string(y.rows()));
  }
  Matrix x;
  if (scale_) {
    x = sparse_adjoint_product(inv_row_scale_.asDiagonal() * y);
    x = inv_col_scale_.asDiagonal() * x;
  } else {
    x = sparse_adjoint_product(y);
  }
  if (center_) {
    const RowVector ones_y = y.colwise().sum();  // 1_n^T y
    x.noalias() -= center_->col_means * ones_y;
    if (mode_ == CenterMode::full) {
      const RowVector row_proj = center_->row_means.transpose() * y;  // mu_r^T y
      x.rowwise() -= row_proj - center_->grand_mean * ones_y;
    }
  }
  return x;
}

Vector LinearOperator::apply(const Vector& x) const {
  return apply(Matrix(x)).col(0);
}

Vector LinearOperator::apply_adjoint(const Vector& y) const {
  return apply_adjoint(Matrix(y)).col(0);
}

LinearOperator build_operator(std::shared_ptr<const SparseMatrix> a, std::optional<ScalingStats> scale,
                              std::optional<CenteringStats> center, CenterMode mode) {
  return LinearOperator(std::move(a), std::move(scale), std::move(center), mode);
}

LinearOperator build_operator(const SparseMatrix& a, std::optional<ScalingStats> scale,
                              std::optional<CenteringStats> center, CenterMode mode) {
  return build_operator(std::make_shared<const SparseMatrix>(a), std::move(scale), std::move(center), mode);
}

Vector centered_matvec(const SparseMatrix& a, const CenteringStats& stats, const Vector& x) {
  if (x.size() != a.cols()) throw DataError("centered_matvec: dimension mismatch");
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  const double ones_x = x.sum();
  const double mu_c_x = stats.col_means.dot(x);
  Vector y(a.rows());
  for (std::int64_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (auto p = offsets[i]; p < offsets[i + 1]; ++p) s += vals[p] * x[cols[p]];
    y[i] = s - stats.row_means[i] * ones_x - mu_c_x + stats.grand_mean * ones_x;
  }
  return y;
}

Vector centered_rmatvec(const SparseMatrix& a, const CenteringStats& stats, const Vector& y) {
  if (y.size() != a.rows()) throw DataError("centered_rmatvec: dimension mismatch");
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  const double ones_y = y.sum();
  const double mu_r_y = stats.row_means.dot(y);
  Vector x = Vector::Zero(a.cols());
  for (std::int64_t i = 0; i < a.rows(); ++i) {
    for (auto p = offsets[i]; p < offsets[i + 1]; ++p) x[cols[p]] += vals[p] * y[i];
  }
  x -= stats.col_means * ones_y;
  x.array() -= mu_r_y - stats.grand_mean * ones_y;
  return x;
}

Matrix materialize_dense(const LinearOperator& op) {
  if (op.rows() * op.cols() > kDenseGuard) {
    throw DataError("materialize_dense: " + std::to_string(op.rows()) + "x" + std::to_string(op.cols()) +
                    " exceeds the 1e6-entry guard");
  }
  const Matrix eye = Matrix::Identity(op.cols(), op.cols());
  return op.apply(eye);
}

}  // namespace vsp
