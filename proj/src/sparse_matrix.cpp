#include "vsp/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "vsp/error.hpp"

namespace vsp {

SparseMatrix::SparseMatrix(std::int64_t rows, std::int64_t cols, std::vector<Offset> row_offsets,
                           std::vector<ColIndex> col_indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (rows_ < 0 || cols_ < 0) throw DataError("sparse matrix: negative dimensions");
  if (cols_ > static_cast<std::int64_t>(std::numeric_limits<ColIndex>::max())) {
    throw DataError("sparse matrix: too many columns");
  }
  if (static_cast<std::int64_t>(row_offsets_.size()) != rows_ + 1) {
    throw DataError("sparse matrix: row_offsets must have n_rows + 1 entries");
  }
  if (col_indices_.size() != values_.size()) {
    throw DataError("sparse matrix: col_indices and values differ in length");
  }
  if (row_offsets_.front() != 0 ||
      row_offsets_.back() != static_cast<Offset>(values_.size())) {
    throw DataError("sparse matrix: row_offsets must start at 0 and end at nnz");
  }
  for (std::int64_t i = 0; i < rows_; ++i) {
    const Offset begin = row_offsets_[i];
    const Offset end = row_offsets_[i + 1];
    if (end < begin) throw DataError("sparse matrix: row_offsets decrease at row " + std::to_string(i));
    for (Offset p = begin; p < end; ++p) {
      if (static_cast<std::int64_t>(col_indices_[p]) >= cols_) {
        throw DataError("sparse matrix: column index out of range in row " + std::to_string(i));
      }
      if (p > begin && col_indices_[p] <= col_indices_[p - 1]) {
        throw DataError("sparse matrix: column indices not strictly increasing in row " +
                        std::to_string(i));
      }
      if (!std::isfinite(values_[p])) {
        throw DataError("sparse matrix: non-finite value in row " + std::to_string(i));
      }
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::int64_t rows, std::int64_t cols,
                                         std::vector<Triplet> entries) {
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw DataError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                      ") out of range for " + std::to_string(rows) + "x" +
                      std::to_string(cols) + " matrix");
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& x, const Triplet& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });
  std::vector<Offset> offsets(rows + 1, 0);
  std::vector<ColIndex> cols_out;
  std::vector<double> vals_out;
  cols_out.reserve(entries.size());
  vals_out.reserve(entries.size());
  std::size_t p = 0;
  while (p < entries.size()) {
    const std::int64_t r = entries[p].row;
    const std::int64_t c = entries[p].col;
    double sum = 0.0;
    while (p < entries.size() && entries[p].row == r && entries[p].col == c) {
      sum += entries[p].value;
      ++p;
    }
    if (sum != 0.0) {
      cols_out.push_back(static_cast<ColIndex>(c));
      vals_out.push_back(sum);
      ++offsets[r + 1];
    }
  }
  for (std::int64_t i = 0; i < rows; ++i) offsets[i + 1] += offsets[i];
  return SparseMatrix(rows, cols, std::move(offsets), std::move(cols_out), std::move(vals_out));
}

SparseMatrix SparseMatrix::from_dense(const Matrix& dense) {
  std::vector<Offset> offsets(dense.rows() + 1, 0);
  std::vector<ColIndex> cols_out;
  std::vector<double> vals_out;
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    for (Eigen::Index j = 0; j < dense.cols(); ++j) {
      if (dense(i, j) != 0.0) {
        cols_out.push_back(static_cast<ColIndex>(j));
        vals_out.push_back(dense(i, j));
      }
    }
    offsets[i + 1] = static_cast<Offset>(vals_out.size());
  }
  return SparseMatrix(dense.rows(), dense.cols(), std::move(offsets), std::move(cols_out),
                      std::move(vals_out));
}

Matrix SparseMatrix::to_dense() const {
  Matrix out = Matrix::Zero(rows_, cols_);
  for (std::int64_t i = 0; i < rows_; ++i) {
    for (Offset p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      out(i, col_indices_[p]) = values_[p];
    }
  }
  return out;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SparseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

Vector ScalingStats::row_scale() const {
  return (row_degrees.array() + row_tau).sqrt().matrix();
}

Vector ScalingStats::col_scale() const {
  return (col_degrees.array() + col_tau).sqrt().matrix();
}

CenteringStats compute_centering_stats(const SparseMatrix& a) {
  if (a.rows() < 1 || a.cols() < 1) throw DataError("centering requires a nonempty matrix");
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  CenteringStats s;
  s.row_means = Vector::Zero(a.rows());
  s.col_means = Vector::Zero(a.cols());
  double total = 0.0;
  for (std::int64_t i = 0; i < a.rows(); ++i) {
    double row_sum = 0.0;
    for (auto p = offsets[i]; p < offsets[i + 1]; ++p) {
      row_sum += vals[p];
      s.col_means[cols[p]] += vals[p];
    }
    s.row_means[i] = row_sum;
    total += row_sum;
  }
  const double n = static_cast<double>(a.rows());
  const double d = static_cast<double>(a.cols());
  s.row_means /= d;
  s.col_means /= n;
  s.grand_mean = total / (n * d);
  return s;
}

ScalingStats compute_scaling_stats(const SparseMatrix& a) {
  if (a.rows() < 1 || a.cols() < 1) throw DataError("scaling requires a nonempty matrix");
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  ScalingStats s;
  s.row_degrees = Vector::Zero(a.rows());
  s.col_degrees = Vector::Zero(a.cols());
  bool any_nonzero = false;
  for (std::int64_t i = 0; i < a.rows(); ++i) {
    for (auto p = offsets[i]; p < offsets[i + 1]; ++p) {
      s.row_degrees[i] += vals[p];
      s.col_degrees[cols[p]] += vals[p];
      if (vals[p] < 0.0) ++s.negative_entries;
      if (vals[p] != 0.0) any_nonzero = true;
    }
  }
  if (!any_nonzero) throw DataError("cannot scale zero matrix");
  s.row_tau = s.row_degrees.mean();
  s.col_tau = s.col_degrees.mean();
  const bool bad_row = ((s.row_degrees.array() + s.row_tau) <= 0.0).any();
  const bool bad_col = ((s.col_degrees.array() + s.col_tau) <= 0.0).any();
  if (bad_row || bad_col) {
    throw DataError("scaling undefined: a regularized degree is not positive");
  }
  return s;
}

SparseMatrix scale_matrix(const SparseMatrix& a, const ScalingStats& stats) {
  if (stats.row_degrees.size() != a.rows() || stats.col_degrees.size() != a.cols()) {
    throw DataError("scaling stats do not match matrix dimensions");
  }
  const Vector inv_r = stats.row_scale().cwiseInverse();
  const Vector inv_c = stats.col_scale().cwiseInverse();
  return a.map_values([&](std::int64_t i, std::int64_t j, double v) { return v * inv_r[i] * inv_c[j]; });
}

}  // namespace vsp
