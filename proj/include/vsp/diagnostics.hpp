#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vsp/types.hpp"

namespace vsp {

struct FactorKurtosis {
  double kurtosis;  // NaN when undefined
  bool defined;
};

struct DiagnosticsBundle {
  std::vector<FactorKurtosis> kurtosis;
  std::optional<Vector> scree;
  // Rows sampled without replacement with probability proportional to their
  // l2 norm; ids ascending.
  std::vector<std::int64_t> pair_rows;
  Matrix pair_sample;
  // (sum_i u_i^2)^2 / (n sum_i u_i^4) per column; low values flag
  // components concentrated on few rows.
  Vector participation;

  bool near_gaussian() const;  // every defined kurtosis within [2.5, 3.5]
};

struct DiagnosticsOptions {
  std::int64_t pair_sample_size = 5000;
  std::uint64_t seed = 0;
};

DiagnosticsBundle diagnostics(const Matrix& z_hat, const std::optional<Vector>& singular_values,
                              const Matrix& u_hat, const DiagnosticsOptions& options = {});

Vector participation_ratios(const Matrix& u);

// Efraimidis-Spirakis weighted sampling without replacement: keys
// u^(1/w_i), top m kept. Zero-weight rows are taken last, in index order.
std::vector<std::int64_t> weighted_sample_without_replacement(const Vector& weights, std::int64_t m,
                                                              std::uint64_t seed);

}  // namespace vsp
