#include "vsp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "vsp/error.hpp"
#include "vsp/parallel.hpp"

namespace vsp {

double two_to_inf_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.rowwise().norm().maxCoeff();
}

namespace {

void check_same_shape(const Matrix& a, const Matrix& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DataError(std::string(who) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

// Largest squared row error of est - truth P, abandoning once it exceeds
// `bound`.
double max_row_sq_error(const Matrix& est, const Matrix& truth, const SignedPermutation& p, double bound) {
  double worst = 0.0;
  const Eigen::Index k = est.cols();
  for (Eigen::Index i = 0; i < est.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      const double diff = est(i, j) - p.signs[j] * truth(i, p.perm[j]);
      s += diff * diff;
    }
    if (s > worst) {
      worst = s;
      if (worst > bound) return worst;
    }
  }
  return worst;
}

double pearson(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  const Eigen::ArrayXd ca = a.array() - a.mean();
  const Eigen::ArrayXd cb = b.array() - b.mean();
  const double den = std::sqrt(ca.square().sum() * cb.square().sum());
  return den > 0.0 ? (ca * cb).sum() / den : 0.0;
}

AlignmentResult finish(const Matrix& est, const Matrix& truth, SignedPermutation p) {
  const Matrix diff = est - p.apply_to_columns(truth);
  AlignmentResult r{std::move(p), two_to_inf_norm(diff), diff.norm()};
  return r;
}

}  // namespace

AlignmentResult align_factors(const Matrix& est, const Matrix& truth, AlignMode mode) {
  check_same_shape(est, truth, "align_factors");
  const int k = static_cast<int>(est.cols());
  if (k < 1) throw DataError("align_factors: no columns");
  if (mode == AlignMode::exact) {
    if (k > 8) throw UsageError("align_factors: exact mode supports k <= 8, use greedy mode for k=" + std::to_string(k));
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    const auto candidates = enumerate_signed_permutations(k);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const double e = max_row_sq_error(est, truth, candidates[c], best);
      if (e < best) {
        best = e;
        best_index = c;
      }
    }
    return finish(est, truth, candidates[best_index]);
  }

  Matrix corr(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) corr(a, b) = pearson(est.col(a), truth.col(b));
  }
  SignedPermutation p = SignedPermutation::identity(k);
  std::vector<bool> used_est(k, false), used_truth(k, false);
  for (int step = 0; step < k; ++step) {
    int ba = -1, bb = -1;
    double bv = -1.0;
    for (int a = 0; a < k; ++a) {
      if (used_est[a]) continue;
      for (int b = 0; b < k; ++b) {
        if (used_truth[b]) continue;
        if (std::abs(corr(a, b)) > bv) {
          bv = std::abs(corr(a, b));
          ba = a;
          bb = b;
        }
      }
    }
    used_est[ba] = used_truth[bb] = true;
    p.perm[ba] = bb;
    p.signs[ba] = corr(ba, bb) < 0.0 ? -1 : 1;
  }
  return finish(est, truth, std::move(p));
}

Matrix estimate_topics(const Matrix& z_hat, const LinearOperator& a_colcentered) {
  if (z_hat.rows() != a_colcentered.rows()) {
    throw DataError("estimate_topics: Z has " + std::to_string(z_hat.rows()) + " rows, operator has " +
                    std::to_string(a_colcentered.rows()));
  }
  const Matrix phi_t = a_colcentered.apply_adjoint(z_hat);  // d x k = Phi^T
  Matrix beta = phi_t;
  for (Eigen::Index l = 0; l < beta.cols(); ++l) {
    const double l1 = phi_t.col(l).lpNorm<1>();
    if (!(l1 > 0.0)) throw NumericalError("degenerate topic: row " + std::to_string(l) + " of Phi is zero");
    beta.col(l) /= l1;
  }
  return beta;
}

Matrix clip_simplex(const Matrix& beta_hat) {
  Matrix out = beta_hat.cwiseMax(0.0);
  for (Eigen::Index l = 0; l < out.cols(); ++l) {
    const double s = out.col(l).sum();
    if (s > 0.0) out.col(l) /= s;
  }
  return out;
}

TopicError topic_l1_error(const Matrix& beta_hat, const Matrix& beta) {
  check_same_shape(beta_hat, beta, "topic_l1_error");
  const int k = static_cast<int>(beta.cols());
  if (k < 1 || k > 8) throw UsageError("topic_l1_error: k must be in [1, 8]");
  // dist[sign][a][b] = ||beta_hat_a - s beta_b||_1
  std::vector<double> dist(2 * k * k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      dist[(0 * k + a) * k + b] = (beta_hat.col(a) - beta.col(b)).lpNorm<1>();
      dist[(1 * k + a) * k + b] = (beta_hat.col(a) + beta.col(b)).lpNorm<1>();
    }
  }
  TopicError best{std::numeric_limits<double>::infinity(), SignedPermutation::identity(k)};
  for (auto& p : enumerate_signed_permutations(k)) {
    double worst = 0.0;
    for (int l = 0; l < k; ++l) {
      worst = std::max(worst, dist[((p.signs[l] < 0 ? 1 : 0) * k + l) * k + p.perm[l]]);
    }
    if (worst < best.error) best = {worst, std::move(p)};
  }
  return best;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DataError("median of empty set");
  std::sort(values.begin(), values.end());
  const auto m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DataError("ls_slope: need matching inputs of length >= 2");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (!(sxx > 0.0)) throw NumericalError("ls_slope: x is constant");
  return sxy / sxx;
}

SweepResult convergence_sweep(const SweepTrial& trial, const std::vector<std::int64_t>& sizes,
                              const std::vector<std::uint64_t>& seeds, int threads) {
  if (sizes.size() < 3 || seeds.size() < 3) throw UsageError("convergence_sweep: need >= 3 sizes and >= 3 seeds");
  std::vector<std::int64_t> sorted_sizes = sizes;
  std::sort(sorted_sizes.begin(), sorted_sizes.end());
  std::vector<std::uint64_t> sorted_seeds = seeds;
  std::sort(sorted_seeds.begin(), sorted_seeds.end());

  SweepResult r;
  r.cells.resize(sorted_sizes.size() * sorted_seeds.size());
  parallel_chunks(r.cells.size(), threads, [&](std::size_t c) {
    const auto size = sorted_sizes[c / sorted_seeds.size()];
    const auto seed = sorted_seeds[c % sorted_seeds.size()];
    SweepCell cell = trial(size, seed);
    cell.size = size;
    cell.seed = seed;
    r.cells[c] = cell;
  });

  std::vector<double> log_delta, log_err;
  for (std::size_t s = 0; s < sorted_sizes.size(); ++s) {
    std::vector<double> errs, deltas;
    for (std::size_t t = 0; t < sorted_seeds.size(); ++t) {
      const auto& cell = r.cells[s * sorted_seeds.size() + t];
      errs.push_back(cell.err_two_inf);
      deltas.push_back(cell.delta);
    }
    SweepRow row{sorted_sizes[s], median(deltas), median(errs)};
    r.rows.push_back(row);
    if (row.median_delta > 0.0 && row.median_err > 0.0) {
      log_delta.push_back(std::log(row.median_delta));
      log_err.push_back(std::log(row.median_err));
    }
  }
  r.slope = log_delta.size() >= 2 ? ls_slope(log_delta, log_err) : std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace vsp
