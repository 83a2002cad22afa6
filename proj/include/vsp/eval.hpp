#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "vsp/linear_operator.hpp"
#include "vsp/types.hpp"
#include "vsp/varimax.hpp"

namespace vsp {

// max_i ||M_i||_2
double two_to_inf_norm(const Matrix& m);

struct AlignmentResult {
  SignedPermutation best_p;
  double err_two_inf = 0.0;  // ||est - truth P||_{2->inf}
  double err_frob = 0.0;     // ||est - truth P||_F at the same P
};

enum class AlignMode { exact, greedy };

// exact: minimizes the 2->inf error over all of P(k) (k <= 8); ties keep the
// first candidate in enumeration order, so identity wins among equals.
// greedy: pairs columns by repeated argmax of |correlation| and takes the
// sign of the matched correlation; an upper bound on the exact minimum.
AlignmentResult align_factors(const Matrix& est, const Matrix& truth, AlignMode mode = AlignMode::exact);

// Phi = Z^T A_breve (k x d via k adjoint products), beta = (Lambda^{-1} Phi)^T
// with Lambda the l1 norms of the rows of Phi. Entries may be negative.
Matrix estimate_topics(const Matrix& z_hat, const LinearOperator& a_colcentered);

// Post-hoc projection: negatives clipped to 0, columns renormalized to unit
// l1 norm. Not part of the estimator above.
Matrix clip_simplex(const Matrix& beta_hat);

struct TopicError {
  double error = 0.0;  // min over P of max_l ||beta_hat_l - (beta P)_l||_1
  SignedPermutation best_p;
};
TopicError topic_l1_error(const Matrix& beta_hat, const Matrix& beta);

struct SweepCell {
  std::int64_t size = 0;
  std::uint64_t seed = 0;
  double delta = 0.0;
  double err_two_inf = 0.0;
};

struct SweepRow {
  std::int64_t size = 0;
  double median_delta = 0.0;
  double median_err = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // sorted by (size, seed)
  std::vector<SweepRow> rows;    // one per size, ascending
  double slope = 0.0;            // least-squares slope of log median err vs log median delta
};

// One (size, seed) trial: generate, decompose, align; returns delta and the
// 2->inf error.
using SweepTrial = std::function<SweepCell(std::int64_t size, std::uint64_t seed)>;

// Requires >= 3 sizes and >= 3 seeds. Cells run on up to `threads` threads;
// ordering of the result does not depend on scheduling.
SweepResult convergence_sweep(const SweepTrial& trial, const std::vector<std::int64_t>& sizes,
                              const std::vector<std::uint64_t>& seeds, int threads = 1);

double median(std::vector<double> values);
// Least-squares slope of y on x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace vsp
