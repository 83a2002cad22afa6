#pragma once

#include <memory>
#include <optional>

#include "vsp/sparse_matrix.hpp"
#include "vsp/types.hpp"

namespace vsp {

enum class CenterMode {
  full,         // A - mu_r 1^T - 1 mu_c + mu 1 1^T
  column_only,  // A - 1 mu_c
};

// Lazily composed operator M = center(D_r^{-1/2} A D_c^{-1/2}), each stage
// optional. Products are O(nnz + n + d) per vector; no dense n-by-d
// intermediate is ever formed.
//
// The forward product is row-parallel. The adjoint scatters CSR rows into a
// fixed number of partition buffers that are summed in partition order, so
// results do not depend on the thread count.
class LinearOperator {
 public:
  LinearOperator(std::shared_ptr<const SparseMatrix> a, std::optional<ScalingStats> scale,
                 std::optional<CenteringStats> center, CenterMode mode = CenterMode::full,
                 int threads = 0);

  std::int64_t rows() const { return matrix_->rows(); }
  std::int64_t cols() const { return matrix_->cols(); }

  // x: cols() x m  ->  rows() x m
  Matrix apply(const Matrix& x) const;
  // y: rows() x m  ->  cols() x m
  Matrix apply_adjoint(const Matrix& y) const;
  Vector apply(const Vector& x) const;
  Vector apply_adjoint(const Vector& y) const;

  const SparseMatrix& matrix() const { return *matrix_; }
  const std::optional<ScalingStats>& scaling() const { return scale_; }
  const std::optional<CenteringStats>& centering() const { return center_; }
  CenterMode center_mode() const { return mode_; }

 private:
  Matrix sparse_product(const Matrix& x) const;
  Matrix sparse_adjoint_product(const Matrix& y) const;

  std::shared_ptr<const SparseMatrix> matrix_;
  std::optional<ScalingStats> scale_;
  std::optional<CenteringStats> center_;
  CenterMode mode_;
  int threads_;
  Vector inv_row_scale_;
  Vector inv_col_scale_;
};

// When both stats are given, `center` must have been computed from the
// scaled matrix L (see scale_matrix).
LinearOperator build_operator(std::shared_ptr<const SparseMatrix> a,
                              std::optional<ScalingStats> scale = std::nullopt,
                              std::optional<CenteringStats> center = std::nullopt,
                              CenterMode mode = CenterMode::full);
LinearOperator build_operator(const SparseMatrix& a, std::optional<ScalingStats> scale = std::nullopt,
                              std::optional<CenteringStats> center = std::nullopt,
                              CenterMode mode = CenterMode::full);

// (A - mu_r 1^T - 1 mu_c + mu 1 1^T) x and its transpose applied to y.
Vector centered_matvec(const SparseMatrix& a, const CenteringStats& stats, const Vector& x);
Vector centered_rmatvec(const SparseMatrix& a, const CenteringStats& stats, const Vector& y);

// Test oracle: the operator applied to every basis vector. Guarded to
// rows * cols <= 1e6.
Matrix materialize_dense(const LinearOperator& op);

}  // namespace vsp
