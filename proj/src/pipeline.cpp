#include "vsp/pipeline.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "vsp/error.hpp"

namespace vsp {

void VspConfig::validate() const {
  if (k < 1) throw UsageError("--k must be a positive integer");
  if (recenter && !center) throw UsageError("--recenter requires --center");
  if (rescale && !scale) throw UsageError("--rescale requires --scale");
  if (svd.oversample < 0 || svd.power_iters < 0) {
    throw UsageError("--oversample and --power-iters must be nonnegative");
  }
  if (!(varimax_tol > 0.0)) throw UsageError("--varimax-tol must be positive");
  if (varimax_restarts < 1) throw UsageError("--varimax-restarts must be at least 1");
  if (varimax_max_sweeps < 0) throw UsageError("--varimax-max-sweeps must be nonnegative");
}

ProcessedInput prepare_input(const SparseMatrix& a, const VspConfig& config) {
  std::optional<ScalingStats> scaling;
  std::shared_ptr<const SparseMatrix> base = std::make_shared<const SparseMatrix>(a);
  std::optional<CenteringStats> centering;
  if (config.scale) {
    scaling = compute_scaling_stats(a);
    if (config.center) centering = compute_centering_stats(scale_matrix(a, *scaling));
  } else if (config.center) {
    centering = compute_centering_stats(a);
  }
  LinearOperator op(base, scaling, centering, config.center_mode);
  return ProcessedInput{std::move(op), std::move(scaling), std::move(centering)};
}

RecenterResult recenter(const Vector& col_means, const std::optional<Vector>& row_means, const SvdResult& svd,
                        const RotationMatrix& rot_u, const RotationMatrix& rot_v) {
  const auto k = svd.singular_values.size();
  if (k == 0 || (svd.singular_values.array() <= 0.0).any()) {
    throw NumericalError("recentering undefined at rank deficiency (zero singular value)");
  }
  const double n = static_cast<double>(svd.u.rows());
  const double d = static_cast<double>(svd.v.rows());
  if (col_means.size() != svd.v.rows()) throw DataError("recenter: column means do not match V");
  const Vector inv_d = svd.singular_values.cwiseInverse();
  RecenterResult out;
  out.mu_z = std::sqrt(n) * (col_means.transpose() * svd.v) * inv_d.asDiagonal() * rot_u.matrix();
  if (row_means) {
    if (row_means->size() != svd.u.rows()) throw DataError("recenter: row means do not match U");
    out.mu_y = std::sqrt(d) * (row_means->transpose() * svd.u) * inv_d.asDiagonal() * rot_v.matrix();
  }
  return out;
}

namespace {

// Varimax on one singular block, then fold the canonical column order and
// signs into the rotation.
std::pair<RotationMatrix, VarimaxSolution> rotate_block(const Matrix& basis, const VspConfig& config,
                                                         std::uint64_t stream) {
  VarimaxOptions opts;
  opts.tol = config.varimax_tol;
  opts.max_sweeps = config.varimax_max_sweeps;
  opts.restarts = config.varimax_restarts;
  opts.seed = config.seed ^ (stream * 0x9E3779B97F4A7C15ULL);
  opts.kaiser_normalize = config.kaiser_normalize;
  VarimaxSolution sol = solve_varimax(basis, opts);
  const Matrix rotated = basis * sol.rotation.matrix();
  const SignedPermutation order = canonical_column_order(rotated);
  RotationMatrix folded(sol.rotation.matrix() * order.matrix());
  return {std::move(folded), std::move(sol)};
}

}  // namespace

VspResult run_vsp(const SparseMatrix& a, const VspConfig& config) {
  config.validate();
  const std::int64_t n = a.rows();
  const std::int64_t d = a.cols();
  if (config.k > std::min(n, d)) {
    throw DataError("k=" + std::to_string(config.k) + " exceeds min(n, d)=" + std::to_string(std::min(n, d)));
  }
  ProcessedInput input = prepare_input(a, config);

  VspResult r;
  r.svd = truncated_svd(input.op, config.k, config.seed, config.svd);
  r.singular_values = r.svd.singular_values;
  auto [rot_u, sol_u] = rotate_block(r.svd.u, config, 1);
  auto [rot_v, sol_v] = rotate_block(r.svd.v, config, 2);
  r.rot_u = std::move(rot_u);
  r.rot_v = std::move(rot_v);
  r.varimax_u = std::move(sol_u);
  r.varimax_v = std::move(sol_v);

  const double sn = std::sqrt(static_cast<double>(n));
  const double sd = std::sqrt(static_cast<double>(d));
  r.z_hat = sn * r.svd.u * r.rot_u.matrix();
  r.y_hat = sd * r.svd.v * r.rot_v.matrix();
  r.b_hat = r.rot_u.matrix().transpose() * r.singular_values.asDiagonal() * r.rot_v.matrix() / (sn * sd);

  if (config.recenter) {
    std::optional<Vector> row_means;
    if (config.center_mode == CenterMode::full) row_means = input.centering->row_means;
    RecenterResult mu = recenter(input.centering->col_means, row_means, r.svd, r.rot_u, r.rot_v);
    r.mu_z = std::move(mu.mu_z);
    r.mu_y = std::move(mu.mu_y);
  }
  if (config.rescale) {
    Matrix z = r.z_hat;
    Matrix y = r.y_hat;
    if (r.mu_z) z.rowwise() += *r.mu_z;
    if (r.mu_y) y.rowwise() += *r.mu_y;
    r.z_rescaled = input.scaling->row_scale().asDiagonal() * z;
    r.y_rescaled = input.scaling->col_scale().asDiagonal() * y;
  }
  r.centering = std::move(input.centering);
  r.scaling = std::move(input.scaling);
  return r;
}

}  // namespace vsp
