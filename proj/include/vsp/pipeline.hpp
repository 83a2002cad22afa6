#pragma once

#include <cstdint>
#include <optional>

#include "vsp/linear_operator.hpp"
#include "vsp/sparse_matrix.hpp"
#include "vsp/svd.hpp"
#include "vsp/varimax.hpp"

namespace vsp {

struct VspConfig {
  int k = 0;
  bool center = false;
  bool scale = false;
  bool recenter = false;  // requires center
  bool rescale = false;   // requires scale
  CenterMode center_mode = CenterMode::full;
  std::uint64_t seed = 0;
  SvdOptions svd;
  double varimax_tol = 1e-10;
  int varimax_max_sweeps = 100;
  int varimax_restarts = 1;
  bool kaiser_normalize = false;

  // Throws UsageError naming the offending flags.
  void validate() const;
};

struct VspResult {
  Matrix z_hat;  // sqrt(n) U R_U, canonical column order and signs
  Matrix y_hat;  // sqrt(d) V R_V
  Matrix b_hat;  // R_U^T D R_V / sqrt(nd)
  Vector singular_values;
  RotationMatrix rot_u = RotationMatrix::identity(1);
  RotationMatrix rot_v = RotationMatrix::identity(1);
  SvdResult svd;  // of the processed input, before rotation
  std::optional<RowVector> mu_z;
  std::optional<RowVector> mu_y;
  // With rescale: D_r^{1/2} (z_hat + 1 mu_z) and D_c^{1/2} (y_hat + 1 mu_y),
  // recentered first when recentering is on.
  std::optional<Matrix> z_rescaled;
  std::optional<Matrix> y_rescaled;
  std::optional<CenteringStats> centering;
  std::optional<ScalingStats> scaling;
  VarimaxSolution varimax_u;
  VarimaxSolution varimax_v;
};

// Scale (optional) -> center (optional) -> truncated SVD -> Varimax on both
// singular-vector blocks -> outputs, recentering, rescaling.
VspResult run_vsp(const SparseMatrix& a, const VspConfig& config);

struct RecenterResult {
  RowVector mu_z;
  std::optional<RowVector> mu_y;
};

// mu_Z = sqrt(n) mu_c V D^{-1} R_U and mu_Y = sqrt(d) mu_r^T U D^{-1} R_V.
// `row_means` may be omitted (column-only centering), in which case mu_Y is
// absent. Throws NumericalError on a zero singular value.
RecenterResult recenter(const Vector& col_means, const std::optional<Vector>& row_means, const SvdResult& svd,
                        const RotationMatrix& rot_u, const RotationMatrix& rot_v);

// Builds the operator run_vsp decomposes: L when scaling is on, centered per
// mode. Exposed so callers (topic estimation, tests) reuse the same input.
struct ProcessedInput {
  LinearOperator op;
  std::optional<ScalingStats> scaling;
  std::optional<CenteringStats> centering;
};
ProcessedInput prepare_input(const SparseMatrix& a, const VspConfig& config);

}  // namespace vsp
