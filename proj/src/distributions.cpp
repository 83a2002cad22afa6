#include "vsp/distributions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "vsp/error.hpp"
#include "vsp/matrix_io.hpp"

namespace vsp {

CentralMoments central_from_raw(const RawMoments& raw) {
  const double mu = raw[0];
  const double mu2 = mu * mu;
  CentralMoments c;
  c.mean = mu;
  c.m2 = raw[1] - mu2;
  c.m3 = raw[2] - 3.0 * mu * raw[1] + 2.0 * mu2 * mu;
  c.m4 = raw[3] - 4.0 * mu * raw[2] + 6.0 * mu2 * raw[1] - 3.0 * mu2 * mu2;
  return c;
}

DistributionSpec::DistributionSpec(Family f, std::vector<double> params, std::shared_ptr<const DistributionSpec> inner)
    : family_(f), params_(std::move(params)), inner_(std::move(inner)) {
  for (double p : params_) {
    if (!std::isfinite(p)) throw DataError("distribution parameters must be finite");
  }
  raw_ = compute_raw();
  // Moment self-check: finite, E X^2 >= (E X)^2, E X^4 >= (E X^2)^2.
  for (double m : raw_) {
    if (!std::isfinite(m)) throw DataError("distribution " + describe() + " has non-finite moments");
  }
  const double tol2 = 1e-12 * std::max(1.0, raw_[1]);
  const double tol4 = 1e-12 * std::max(1.0, raw_[3]);
  if (raw_[1] - raw_[0] * raw_[0] < -tol2 || raw_[3] - raw_[1] * raw_[1] < -tol4) {
    throw DataError("distribution " + describe() + " failed the moment self-check");
  }
}

DistributionSpec DistributionSpec::point_mass(double v) { return {Family::point_mass, {v}, nullptr}; }

DistributionSpec DistributionSpec::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DataError("bernoulli: p must lie in [0, 1]");
  return {Family::bernoulli, {p}, nullptr};
}

DistributionSpec DistributionSpec::scaled_bernoulli(double p, DistributionSpec s) {
  if (!(p >= 0.0 && p <= 1.0)) throw DataError("scaled_bernoulli: p must lie in [0, 1]");
  return {Family::scaled_bernoulli, {p}, std::make_shared<const DistributionSpec>(std::move(s))};
}

DistributionSpec DistributionSpec::exponential(double rate) {
  if (!(rate > 0.0)) throw DataError("exponential: rate must be positive");
  return {Family::exponential, {rate}, nullptr};
}

DistributionSpec DistributionSpec::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw DataError("gamma: shape and scale must be positive");
  return {Family::gamma, {shape, scale}, nullptr};
}

DistributionSpec DistributionSpec::uniform(double a, double b) {
  if (!(b > a)) throw DataError("uniform: need a < b");
  return {Family::uniform, {a, b}, nullptr};
}

DistributionSpec DistributionSpec::normal(double mean, double sd) {
  if (!(sd >= 0.0)) throw DataError("normal: sd must be nonnegative");
  return {Family::normal, {mean, sd}, nullptr};
}

DistributionSpec DistributionSpec::dirichlet(std::vector<double> alpha, int component) {
  if (alpha.size() < 2) throw DataError("dirichlet: need at least two concentration parameters");
  if (std::any_of(alpha.begin(), alpha.end(), [](double a) { return !(a > 0.0); })) {
    throw DataError("dirichlet: concentrations must be positive");
  }
  if (component < 0 || component >= static_cast<int>(alpha.size())) {
    throw DataError("dirichlet: component index out of range");
  }
  alpha.push_back(component);
  return {Family::dirichlet, std::move(alpha), nullptr};
}

DistributionSpec DistributionSpec::shifted(DistributionSpec base, double c) {
  return {Family::shifted, {c}, std::make_shared<const DistributionSpec>(std::move(base))};
}

RawMoments DistributionSpec::compute_raw() const {
  RawMoments m{};
  switch (family_) {
    case Family::point_mass: {
      const double v = params_[0];
      m = {v, v * v, v * v * v, v * v * v * v};
      break;
    }
    case Family::bernoulli:
      m = {params_[0], params_[0], params_[0], params_[0]};
      break;
    case Family::scaled_bernoulli: {
      const auto& s = inner_->raw_moments();
      for (int j = 0; j < 4; ++j) m[j] = params_[0] * s[j];
      break;
    }
    case Family::exponential: {
      const double inv = 1.0 / params_[0];
      m = {inv, 2.0 * inv * inv, 6.0 * inv * inv * inv, 24.0 * inv * inv * inv * inv};
      break;
    }
    case Family::gamma: {
      const double a = params_[0];
      const double s = params_[1];
      double rising = 1.0;
      double sp = 1.0;
      for (int j = 0; j < 4; ++j) {
        rising *= a + j;
        sp *= s;
        m[j] = rising * sp;
      }
      break;
    }
    case Family::uniform: {
      const double a = params_[0];
      const double b = params_[1];
      for (int j = 0; j < 4; ++j) {
        const int p = j + 2;
        m[j] = (std::pow(b, p) - std::pow(a, p)) / (p * (b - a));
      }
      break;
    }
    case Family::normal: {
      const double mu = params_[0];
      const double v = params_[1] * params_[1];
      m = {mu, mu * mu + v, mu * mu * mu + 3.0 * mu * v, mu * mu * mu * mu + 6.0 * mu * mu * v + 3.0 * v * v};
      break;
    }
    case Family::dirichlet: {
      const auto kk = params_.size() - 1;
      const double a = params_[static_cast<std::size_t>(params_.back())];
      const double total = std::accumulate(params_.begin(), params_.begin() + kk, 0.0);
      double prod = 1.0;
      for (int j = 0; j < 4; ++j) {
        prod *= (a + j) / (total + j);
        m[j] = prod;
      }
      break;
    }
    case Family::shifted: {
      const auto& s = inner_->raw_moments();
      const double c = params_[0];
      const std::array<double, 5> base{1.0, s[0], s[1], s[2], s[3]};
      static constexpr int binom[5][5] = {{1}, {1, 1}, {1, 2, 1}, {1, 3, 3, 1}, {1, 4, 6, 4, 1}};
      for (int j = 1; j <= 4; ++j) {
        double acc = 0.0;
        for (int i = 0; i <= j; ++i) acc += binom[j][i] * std::pow(c, j - i) * base[i];
        m[j - 1] = acc;
      }
      break;
    }
  }
  return m;
}

double DistributionSpec::sample(Rng& rng) const {
  switch (family_) {
    case Family::point_mass:
      return params_[0];
    case Family::bernoulli:
      return rng.bernoulli(params_[0]) ? 1.0 : 0.0;
    case Family::scaled_bernoulli: {
      const bool on = rng.bernoulli(params_[0]);
      return on ? inner_->sample(rng) : 0.0;
    }
    case Family::exponential:
      return rng.exponential(params_[0]);
    case Family::gamma:
      return rng.gamma(params_[0], params_[1]);
    case Family::uniform:
      return rng.uniform(params_[0], params_[1]);
    case Family::normal:
      return params_[0] + params_[1] * rng.normal();
    case Family::dirichlet: {
      const auto kk = params_.size() - 1;
      const double a = params_[static_cast<std::size_t>(params_.back())];
      const double total = std::accumulate(params_.begin(), params_.begin() + kk, 0.0);
      const double ga = rng.gamma(a);
      const double gb = rng.gamma(total - a);
      return ga / (ga + gb);
    }
    case Family::shifted:
      return inner_->sample(rng) + params_[0];
  }
  return 0.0;
}

std::string DistributionSpec::describe() const {
  auto f = [](double x) { return format_double(x); };
  switch (family_) {
    case Family::point_mass:
      return "point_mass(" + f(params_[0]) + ")";
    case Family::bernoulli:
      return "bernoulli(" + f(params_[0]) + ")";
    case Family::scaled_bernoulli:
      return "scaled_bernoulli(" + f(params_[0]) + ", " + inner_->describe() + ")";
    case Family::exponential:
      return "exponential(" + f(params_[0]) + ")";
    case Family::gamma:
      return "gamma(" + f(params_[0]) + ", " + f(params_[1]) + ")";
    case Family::uniform:
      return "uniform(" + f(params_[0]) + ", " + f(params_[1]) + ")";
    case Family::normal:
      return "normal(" + f(params_[0]) + ", " + f(params_[1]) + ")";
    case Family::dirichlet: {
      std::string s = "dirichlet([";
      for (std::size_t i = 0; i + 1 < params_.size(); ++i) s += (i ? ", " : "") + f(params_[i]);
      return s + "], " + std::to_string(static_cast<int>(params_.back())) + ")";
    }
    case Family::shifted:
      return "shifted(" + inner_->describe() + ", " + f(params_[0]) + ")";
  }
  return "?";
}

namespace {

class DistParser {
 public:
  explicit DistParser(const std::string& text) : s_(text) {}

  DistributionSpec parse() {
    DistributionSpec d = parse_dist();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    return d;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("cannot parse distribution '" + s_ + "' at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  std::string ident() {
    skip_ws();
    const auto start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (start == pos_) fail("expected a family name");
    return s_.substr(start, pos_ - start);
  }

  double number() {
    skip_ws();
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  DistributionSpec parse_dist() {
    const std::string name = ident();
    expect('(');
    DistributionSpec out = [&]() -> DistributionSpec {
      if (name == "point_mass") return DistributionSpec::point_mass(number());
      if (name == "bernoulli") return DistributionSpec::bernoulli(number());
      if (name == "exponential") return DistributionSpec::exponential(number());
      if (name == "scaled_bernoulli") {
        const double p = number();
        expect(',');
        return DistributionSpec::scaled_bernoulli(p, parse_dist());
      }
      if (name == "shifted") {
        DistributionSpec base = parse_dist();
        expect(',');
        return DistributionSpec::shifted(std::move(base), number());
      }
      if (name == "gamma" || name == "uniform" || name == "normal") {
        const double a = number();
        expect(',');
        const double b = number();
        if (name == "gamma") return DistributionSpec::gamma(a, b);
        if (name == "uniform") return DistributionSpec::uniform(a, b);
        return DistributionSpec::normal(a, b);
      }
      if (name == "dirichlet") {
        expect('[');
        std::vector<double> alpha{number()};
        while (peek(',')) {
          expect(',');
          alpha.push_back(number());
        }
        expect(']');
        expect(',');
        const double j = number();
        return DistributionSpec::dirichlet(std::move(alpha), static_cast<int>(j));
      }
      fail("unknown family '" + name + "'");
    }();
    expect(')');
    return out;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

DistributionSpec parse_distribution(const std::string& text) { return DistParser(text).parse(); }

void sample_dirichlet_row(const std::vector<double>& alpha, Rng& rng, Eigen::Ref<RowVector, 0, Eigen::InnerStride<>> out) {
  double total = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    out[j] = rng.gamma(alpha[j]);
    total += out[j];
  }
  out /= total;
}

double kurtosis_from_raw(const RawMoments& raw) {
  const CentralMoments c = central_from_raw(raw);
  const double scale = std::max(raw[1], 1e-300);
  if (!(c.m2 > 1e-14 * scale)) throw NumericalError("kurtosis undefined for a degenerate distribution");
  return c.m4 / (c.m2 * c.m2);
}

double analytic_kurtosis(const DistributionSpec& dist) { return kurtosis_from_raw(dist.raw_moments()); }

SparseKurtosis kurtosis_of_sparse(double p, const RawMoments& s_raw) {
  if (!(p > 0.0 && p < 1.0)) throw DataError("kurtosis_of_sparse: p must lie in (0, 1)");
  if (!(s_raw[1] > 0.0)) throw NumericalError("kurtosis_of_sparse: S is almost surely zero");
  RawMoments x{};
  for (int j = 0; j < 4; ++j) x[j] = p * s_raw[j];
  const double kappa = kurtosis_from_raw(x);
  return {kappa, kappa > 3.0, 1.0 - p > 5.0 / 6.0};
}

SumKurtosis kurtosis_of_sum(const std::array<double, 4>& x_central, const std::array<double, 4>& w_central,
                            std::optional<double> epsilon) {
  if (std::abs(x_central[1] - 1.0) > 1e-12) throw DataError("kurtosis_of_sum: eta_{x,2} must equal 1");
  if (std::abs(x_central[0]) > 1e-12 || std::abs(w_central[0]) > 1e-12) {
    throw DataError("kurtosis_of_sum: first central moments must be zero");
  }
  if (w_central[1] < 0.0) throw DataError("kurtosis_of_sum: negative variance");
  const double m2 = x_central[1] + w_central[1];
  const double m4 = x_central[3] + 6.0 * x_central[1] * w_central[1] + w_central[3];
  const double kappa = m4 / (m2 * m2);
  bool cond = false;
  if (epsilon) {
    cond = *epsilon > 0.0 && w_central[1] < *epsilon && x_central[3] >= 3.0 * (1.0 + *epsilon) * (1.0 + *epsilon);
  } else {
    // some eps in (eta_{w,2}, sqrt(eta_{x,4}/3) - 1] exists
    const double eps_max = std::sqrt(std::max(x_central[3], 0.0) / 3.0) - 1.0;
    cond = eps_max > 0.0 && w_central[1] < eps_max;
  }
  return {kappa, kappa > 3.0, cond};
}

double sample_kurtosis(const Eigen::Ref<const Vector>& x) {
  if (x.size() < 4) throw DataError("sample_kurtosis needs at least 4 values");
  const double mean = x.mean();
  const Eigen::ArrayXd c = x.array() - mean;
  const double m2 = c.square().mean();
  const double m4 = c.square().square().mean();
  if (!(m2 > 0.0)) throw NumericalError("sample kurtosis undefined for a constant vector");
  return m4 / (m2 * m2);
}

Density compute_density(const SparseMatrix& m) {
  Density d;
  if (m.rows() == 0 || m.cols() == 0) return d;
  double total = 0.0;
  for (double v : m.values()) total += v;
  d.rho = total / (static_cast<double>(m.rows()) * static_cast<double>(m.cols()));
  d.rho_bar = m.max_abs();
  d.delta = static_cast<double>(m.rows()) * d.rho;
  return d;
}

Density compute_density(const Matrix& m) {
  Density d;
  if (m.size() == 0) return d;
  d.rho = m.mean();
  d.rho_bar = m.cwiseAbs().maxCoeff();
  d.delta = static_cast<double>(m.rows()) * d.rho;
  return d;
}

}  // namespace vsp
