#pragma once

#include <cstdint>

#include "vsp/linear_operator.hpp"
#include "vsp/rng.hpp"
#include "vsp/types.hpp"

namespace vsp {

// Leading singular triplets: columns of u and v orthonormal, values
// nonnegative and nonincreasing.
struct SvdResult {
  Matrix u;
  Vector singular_values;
  Matrix v;
};

struct SvdOptions {
  int oversample = 10;
  int power_iters = 5;
};

// Randomized subspace iteration with a Gaussian test matrix drawn from
// Rng(seed), re-orthonormalizing after every forward and adjoint product,
// followed by Rayleigh-Ritz on the final basis.
SvdResult truncated_svd(const LinearOperator& op, int k, std::uint64_t seed, const SvdOptions& options = {});

// Dense one-sided Jacobi SVD; thin factors of size min(rows, cols). Guarded
// to min(rows, cols) <= 500.
SvdResult dense_svd_oracle(const Matrix& m);

// Modified Gram-Schmidt with one re-orthogonalization pass. Columns that
// collapse numerically are replaced by fresh Gaussian directions from `rng`
// so the result always has orthonormal columns.
void orthonormalize_columns(Matrix& q, Rng& rng);

}  // namespace vsp
