#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vsp/types.hpp"

namespace vsp {

struct Triplet {
  std::int64_t row;
  std::int64_t col;
  double value;
};

// Compressed sparse row matrix. Immutable once constructed; the constructor
// enforces the layout invariants (nondecreasing offsets, strictly increasing
// in-range column indices per row, finite values).
class SparseMatrix {
 public:
  using Offset = std::int64_t;
  using ColIndex = std::uint32_t;

  SparseMatrix() : row_offsets_(1, 0) {}
  SparseMatrix(std::int64_t rows, std::int64_t cols, std::vector<Offset> row_offsets,
               std::vector<ColIndex> col_indices, std::vector<double> values);

  // Entries are sorted, duplicates summed, and exact zeros after summation
  // dropped.
  static SparseMatrix from_triplets(std::int64_t rows, std::int64_t cols,
                                    std::vector<Triplet> entries);
  static SparseMatrix from_dense(const Matrix& dense);

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }
  std::int64_t nnz() const { return static_cast<std::int64_t>(values_.size()); }

  std::span<const Offset> row_offsets() const { return row_offsets_; }
  std::span<const ColIndex> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }

  Matrix to_dense() const;
  double max_abs() const;
  double frobenius_norm() const;

  // Same sparsity pattern with each value passed through f(row, col, value).
  template <typename F>
  SparseMatrix map_values(F&& f) const {
    std::vector<double> out(values_.size());
    for (std::int64_t i = 0; i < rows_; ++i) {
      for (Offset p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
        out[p] = f(i, static_cast<std::int64_t>(col_indices_[p]), values_[p]);
      }
    }
    return SparseMatrix(rows_, cols_, row_offsets_, col_indices_, std::move(out));
  }

 private:
  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  std::vector<Offset> row_offsets_;
  std::vector<ColIndex> col_indices_;
  std::vector<double> values_;
};

// Row, column, and grand means defining the implicit double centering.
struct CenteringStats {
  Vector row_means;  // A 1_d / d
  Vector col_means;  // 1_n^T A / n
  double grand_mean = 0.0;
};

// Degrees and regularizers for L = D_r^{-1/2} A D_c^{-1/2} with
// D_r = diag(deg_r + tau_r), D_c = diag(deg_c + tau_c).
struct ScalingStats {
  Vector row_degrees;
  Vector col_degrees;
  double row_tau = 0.0;
  double col_tau = 0.0;
  std::int64_t negative_entries = 0;  // nonzero means the caller should warn

  Vector row_scale() const;  // sqrt(deg_r + tau_r)
  Vector col_scale() const;  // sqrt(deg_c + tau_c)
};

CenteringStats compute_centering_stats(const SparseMatrix& a);

// Throws DataError("cannot scale zero matrix") when every entry is zero.
ScalingStats compute_scaling_stats(const SparseMatrix& a);

// L = D_r^{-1/2} A D_c^{-1/2}, stored with the sparsity pattern of A.
SparseMatrix scale_matrix(const SparseMatrix& a, const ScalingStats& stats);

}  // namespace vsp
