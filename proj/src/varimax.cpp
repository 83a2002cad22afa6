#include "vsp/varimax.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vsp/error.hpp"
#include "vsp/rng.hpp"

namespace vsp {

RotationMatrix::RotationMatrix(Matrix r) : r_(std::move(r)) {
  if (r_.rows() != r_.cols() || r_.rows() == 0) {
    throw std::invalid_argument("RotationMatrix: must be square and nonempty");
  }
  const Matrix gram = r_.transpose() * r_;
  const double dev = (gram - Matrix::Identity(r_.rows(), r_.cols())).cwiseAbs().maxCoeff();
  if (!(dev <= 1e-10)) {
    throw NumericalError("RotationMatrix: R^T R deviates from identity by " + std::to_string(dev));
  }
}

SignedPermutation SignedPermutation::identity(int k) {
  SignedPermutation p;
  p.perm.resize(k);
  std::iota(p.perm.begin(), p.perm.end(), 0);
  p.signs.assign(k, 1);
  return p;
}

Matrix SignedPermutation::matrix() const {
  const int k = size();
  Matrix m = Matrix::Zero(k, k);
  for (int j = 0; j < k; ++j) m(perm[j], j) = signs[j];
  return m;
}

Matrix SignedPermutation::apply_to_columns(const Matrix& x) const {
  if (x.cols() != size()) throw DataError("signed permutation size does not match column count");
  Matrix out(x.rows(), x.cols());
  for (int j = 0; j < size(); ++j) out.col(j) = signs[j] * x.col(perm[j]);
  return out;
}

bool SignedPermutation::is_identity() const {
  for (int j = 0; j < size(); ++j) {
    if (perm[j] != j || signs[j] != 1) return false;
  }
  return true;
}

double varimax_objective(const Matrix& rotation, const Matrix& u) {
  if (u.cols() != rotation.rows() || rotation.rows() != rotation.cols()) {
    throw DataError("varimax_objective: dimension mismatch");
  }
  const double n = static_cast<double>(u.rows());
  const Matrix ur = u * rotation;
  double total = 0.0;
  for (Eigen::Index l = 0; l < ur.cols(); ++l) {
    const auto sq = ur.col(l).array().square();
    const double fourth = sq.square().sum() / n;
    const double second = sq.sum() / n;
    total += fourth - second * second;
  }
  return total;
}

double varimax_objective(const RotationMatrix& rotation, const Matrix& u) {
  return varimax_objective(rotation.matrix(), u);
}

namespace {

struct SolveTrace {
  Matrix rotation;
  std::vector<double> objectives;
  int sweeps = 0;
  bool converged = false;
};

// Rotates columns p, q of both `x` (n x k) and `r` (k x k) toward the pair
// optimum of the criterion.
void planar_step(Matrix& x, Matrix& r, Eigen::Index p, Eigen::Index q) {
  const double n = static_cast<double>(x.rows());
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double xp = x(i, p);
    const double xq = x(i, q);
    const double u = xp * xp - xq * xq;
    const double v = 2.0 * xp * xq;
    a += u;
    b += v;
    c += u * u - v * v;
    d += 2.0 * u * v;
  }
  const double num = d - 2.0 * a * b / n;
  const double den = c - (a * a - b * b) / n;
  if (num == 0.0 && den >= 0.0) return;
  const double phi = std::atan2(num, den) / 4.0;
  const double cs = std::cos(phi);
  const double sn = std::sin(phi);
  if (sn == 0.0) return;
  auto rotate = [&](Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double mp = m(i, p);
      const double mq = m(i, q);
      m(i, p) = cs * mp + sn * mq;
      m(i, q) = -sn * mp + cs * mq;
    }
  };
  rotate(x);
  rotate(r);
}

SolveTrace solve_from(const Matrix& u, const Matrix& start, const VarimaxOptions& options) {
  const Eigen::Index k = u.cols();
  SolveTrace t;
  t.rotation = start;
  Matrix x = u * start;
  const Matrix eye = Matrix::Identity(k, k);
  double previous = varimax_objective(eye, x);
  t.objectives.push_back(previous);
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    for (Eigen::Index p = 0; p + 1 < k; ++p) {
      for (Eigen::Index q = p + 1; q < k; ++q) planar_step(x, t.rotation, p, q);
    }
    const double current = varimax_objective(eye, x);
    t.objectives.push_back(current);
    ++t.sweeps;
    const double scale = std::abs(previous) > 0.0 ? std::abs(previous) : 1.0;
    if ((current - previous) / scale < options.tol) {
      t.converged = true;
      break;
    }
    previous = current;
  }
  return t;
}

Matrix random_orthogonal(Eigen::Index k, Rng& rng) {
  const Matrix g = rng.normal_matrix(k, k);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(k, k);
  // Fix the QR sign ambiguity so the draw is Haar distributed.
  const Matrix rr = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (rr(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

double third_central_moment(const Eigen::Ref<const Vector>& x) {
  if (x.size() == 0) return 0.0;
  const double mean = x.mean();
  return (x.array() - mean).cube().mean();
}

}  // namespace

VarimaxSolution solve_varimax(const Matrix& u, const VarimaxOptions& options) {
  const Eigen::Index n = u.rows();
  const Eigen::Index k = u.cols();
  if (k < 1 || n < k) {
    throw DataError("solve_varimax: need n >= k >= 1, got n=" + std::to_string(n) + ", k=" + std::to_string(k));
  }
  if (!u.allFinite()) throw NumericalError("solve_varimax: non-finite input");
  if (options.restarts < 1 || options.max_sweeps < 0) {
    throw DataError("solve_varimax: restarts must be >= 1 and max_sweeps >= 0");
  }

  Matrix work = u;
  if (options.kaiser_normalize) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double norm = work.row(i).norm();
      if (norm > 0.0) work.row(i) /= norm;
    }
  }

  if (k == 1) {
    VarimaxSolution s{RotationMatrix::identity(1), {varimax_objective(Matrix::Identity(1, 1), work)}, 0, true, 0,
                      varimax_objective(Matrix::Identity(1, 1), u)};
    return s;
  }

  Rng rng(options.seed, 0x7a41);
  SolveTrace best;
  int best_index = -1;
  for (int r = 0; r < options.restarts; ++r) {
    const Matrix start = r == 0 ? Matrix(Matrix::Identity(k, k)) : random_orthogonal(k, rng);
    SolveTrace t = solve_from(work, start, options);
    if (best_index < 0 || t.objectives.back() > best.objectives.back()) {
      best = std::move(t);
      best_index = r;
    }
  }
  RotationMatrix rotation(best.rotation);
  const double objective = varimax_objective(rotation, u);
  return VarimaxSolution{std::move(rotation), std::move(best.objectives), best.sweeps, best.converged, best_index,
                         objective};
}

std::pair<Matrix, std::vector<int>> apply_sign_convention(const Matrix& factors) {
  Matrix out = factors;
  std::vector<int> signs(factors.cols(), 1);
  for (Eigen::Index j = 0; j < factors.cols(); ++j) {
    if (third_central_moment(factors.col(j)) < 0.0) {
      out.col(j) = -out.col(j);
      signs[j] = -1;
    }
  }
  return {std::move(out), std::move(signs)};
}

SignedPermutation canonical_column_order(const Matrix& factors) {
  const int k = static_cast<int>(factors.cols());
  std::vector<double> weight(k);
  for (int j = 0; j < k; ++j) weight[j] = factors.col(j).array().pow(4).sum();
  SignedPermutation p = SignedPermutation::identity(k);
  std::stable_sort(p.perm.begin(), p.perm.end(), [&](int a, int b) { return weight[a] > weight[b]; });
  for (int j = 0; j < k; ++j) {
    p.signs[j] = third_central_moment(factors.col(p.perm[j])) < 0.0 ? -1 : 1;
  }
  return p;
}

std::vector<SignedPermutation> enumerate_signed_permutations(int k) {
  if (k < 1 || k > 8) throw DataError("enumerate_signed_permutations: k must be in [1, 8], got " + std::to_string(k));
  std::vector<SignedPermutation> out;
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  const unsigned masks = 1u << k;
  do {
    for (unsigned mask = 0; mask < masks; ++mask) {
      SignedPermutation p;
      p.perm = perm;
      p.signs.resize(k);
      for (int j = 0; j < k; ++j) p.signs[j] = (mask >> j) & 1u ? -1 : 1;
      out.push_back(std::move(p));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace vsp
