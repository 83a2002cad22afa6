#include "vsp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vsp/distributions.hpp"
#include "vsp/error.hpp"
#include "vsp/rng.hpp"

namespace vsp {

bool DiagnosticsBundle::near_gaussian() const {
  bool any = false;
  for (const auto& k : kurtosis) {
    if (!k.defined) continue;
    any = true;
    if (k.kurtosis < 2.5 || k.kurtosis > 3.5) return false;
  }
  return any;
}

Vector participation_ratios(const Matrix& u) {
  const double n = static_cast<double>(u.rows());
  Vector out(u.cols());
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    const auto sq = u.col(j).array().square();
    const double s2 = sq.sum();
    const double s4 = sq.square().sum();
    out[j] = s4 > 0.0 ? s2 * s2 / (n * s4) : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::vector<std::int64_t> weighted_sample_without_replacement(const Vector& weights, std::int64_t m,
                                                              std::uint64_t seed) {
  const std::int64_t n = weights.size();
  m = std::clamp<std::int64_t>(m, 0, n);
  Rng rng(seed, 0x5a3d);
  std::vector<double> keys(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    // log of u^(1/w); larger is better
    keys[i] = weights[i] > 0.0 ? std::log(u) / weights[i] : -std::numeric_limits<double>::infinity();
  }
  std::vector<std::int64_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::int64_t a, std::int64_t b) { return keys[a] > keys[b]; });
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

DiagnosticsBundle diagnostics(const Matrix& z_hat, const std::optional<Vector>& singular_values,
                              const Matrix& u_hat, const DiagnosticsOptions& options) {
  DiagnosticsBundle b;
  for (Eigen::Index j = 0; j < z_hat.cols(); ++j) {
    try {
      b.kurtosis.push_back({sample_kurtosis(z_hat.col(j)), true});
    } catch (const Error&) {
      b.kurtosis.push_back({std::numeric_limits<double>::quiet_NaN(), false});
    }
  }
  b.scree = singular_values;
  const Vector norms = z_hat.rowwise().norm();
  b.pair_rows = weighted_sample_without_replacement(norms, options.pair_sample_size, options.seed);
  b.pair_sample.resize(static_cast<Eigen::Index>(b.pair_rows.size()), z_hat.cols());
  for (std::size_t r = 0; r < b.pair_rows.size(); ++r) b.pair_sample.row(r) = z_hat.row(b.pair_rows[r]);
  b.participation = participation_ratios(u_hat);
  return b;
}

}  // namespace vsp
