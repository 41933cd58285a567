#include "sketchreg/regression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "sketchreg/distributions.hpp"
#include "sketchreg/embedding.hpp"
#include "sketchreg/error.hpp"
#include "sketchreg/linalg.hpp"

namespace sketchreg {

namespace {

RegressionFit fit_core(std::span<const double> y, const DenseMatrix& x, std::size_t n_source, VarianceMode mode,
                       ErrorKind singular_kind) {
  const std::size_t m = x.rows();
  const std::size_t K = x.cols();
  if (y.size() != m) throw Error(ErrorKind::DimMismatch, "y and X differ in row count");
  if (m <= K) throw Error(ErrorKind::InvalidDims, "need more rows than regressors (rows=" + std::to_string(m) + ", K=" + std::to_string(K) + ")");

  const SvdFactors f = svd(x);
  const auto& s = f.singular_values;
  for (std::size_t k = 0; k < K; ++k) {
    if (!(s[k] >= kDefaultRankTol * s[0]) || s[0] == 0.0) {
      throw Error(singular_kind, "design is rank deficient: sigma_" + std::to_string(k + 1) + " = " +
                                     std::to_string(s[k]) + " vs sigma_1 = " + std::to_string(s[0]));
    }
  }

  const std::vector<double> uty = multiply_tn(f.U, y);
  RegressionFit fit;
  fit.beta.assign(K, 0.0);
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t t = 0; t < K; ++t) fit.beta[i] += f.V(i, t) * uty[t] / s[t];

  std::vector<double> resid(m);
  const std::vector<double> fitted = multiply(x, fit.beta);
  for (std::size_t i = 0; i < m; ++i) {
    resid[i] = y[i] - fitted[i];
    fit.ssr += resid[i] * resid[i];
  }

  DenseMatrix xtx_inv(K, K);
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < K; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < K; ++t) acc += f.V(i, t) * f.V(j, t) / (s[t] * s[t]);
      xtx_inv(i, j) = acc;
    }

  const double dof = static_cast<double>(m - K);
  const double s2 = fit.ssr / dof;
  fit.n_source = n_source;
  fit.m_used = m;
  fit.variance_mode = mode;
  fit.sigma2_hat = s2 * static_cast<double>(m) / static_cast<double>(n_source);
  if (mode == VarianceMode::Homoskedastic) {
    fit.covariance = scale(xtx_inv, s2);
  } else {
    DenseMatrix meat(K, K);
    for (std::size_t r = 0; r < m; ++r) {
      auto xr = x.row(r);
      const double e2 = resid[r] * resid[r];
      for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = 0; j < K; ++j) meat(i, j) += e2 * xr[i] * xr[j];
    }
    fit.covariance = multiply(multiply(xtx_inv, meat), xtx_inv);
  }
  fit.std_errors.resize(K);
  for (std::size_t k = 0; k < K; ++k) fit.std_errors[k] = std::sqrt(std::max(0.0, fit.covariance(k, k)));
  return fit;
}

DenseMatrix sandwich(const DenseMatrix& x, std::span<const double> omega_diag) {
  const DenseMatrix bread = spd_inverse(gram(x));
  DenseMatrix meat(x.cols(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto xr = x.row(r);
    for (std::size_t i = 0; i < x.cols(); ++i)
      for (std::size_t j = 0; j < x.cols(); ++j) meat(i, j) += omega_diag[r] * xr[i] * xr[j];
  }
  return multiply(multiply(bread, meat), bread);
}

}  // namespace

std::string_view to_string(VarianceMode m) noexcept {
  return m == VarianceMode::Homoskedastic ? "homo" : "sandwich";
}

VarianceMode parse_variance_mode(std::string_view text) {
  if (text == "homo" || text == "homoskedastic") return VarianceMode::Homoskedastic;
  if (text == "sandwich" || text == "hc0") return VarianceMode::Sandwich;
  throw Error(ErrorKind::ConfigError, "unknown variance mode '" + std::string(text) + "'");
}

ContrastVector::ContrastVector(std::vector<double> values) : c(std::move(values)) {
  if (norm2(c) == 0.0) throw Error(ErrorKind::DomainError, "contrast vector must be non-zero");
}

ContrastVector ContrastVector::unit(std::size_t K, std::size_t k) {
  std::vector<double> v(K, 0.0);
  v.at(k) = 1.0;
  return ContrastVector(std::move(v));
}

double ContrastVector::apply(std::span<const double> beta) const {
  if (beta.size() != c.size()) throw Error(ErrorKind::DimMismatch, "contrast length differs from K");
  return dot(c, beta);
}

double ContrastVector::quadratic(const DenseMatrix& m) const {
  if (m.rows() != c.size() || m.cols() != c.size()) throw Error(ErrorKind::DimMismatch, "contrast length differs from K");
  return dot(c, multiply(m, c));
}

RegressionFit ols(std::span<const double> y, const DenseMatrix& x, VarianceMode mode) {
  return fit_core(y, x, x.rows(), mode, ErrorKind::RankDeficient);
}

RegressionFit fit_sketched(std::span<const double> y_sketch, const DenseMatrix& x_sketch, std::size_t n_source,
                           VarianceMode mode) {
  return fit_core(y_sketch, x_sketch, n_source, mode, ErrorKind::SingularSketch);
}

RegressionFit sketched_ols(std::span<const double> y, const DenseMatrix& x, const SketchOperator& op, VarianceMode mode) {
  if (op.n != x.rows()) throw Error(ErrorKind::DimMismatch, "operator n differs from the number of observations");
  const DenseMatrix z = apply_sketch(op, append_column(x, y));
  const DenseMatrix xs = column_block(z, 0, x.cols());
  const std::vector<double> ys = z.column(x.cols());
  return fit_sketched(ys, xs, x.rows(), mode);
}

Lemma3Report lemma3_check(const RegressionFit& fit_full, const RegressionFit& fit_sketch, const DenseMatrix& x,
                          std::span<const double> y, const SketchOperator& op) {
  Lemma3Report rep;
  const DenseMatrix aug = append_column(x, y);
  rep.epsilon_used = singular_distortion(aug, op);
  rep.ssr_ratio = fit_full.ssr > 0.0 ? fit_sketch.ssr / fit_full.ssr : (fit_sketch.ssr == 0.0 ? 1.0 : INFINITY);
  double d2 = 0.0;
  for (std::size_t k = 0; k < fit_full.beta.size(); ++k) {
    const double diff = fit_sketch.beta[k] - fit_full.beta[k];
    d2 += diff * diff;
  }
  rep.beta_dist = std::sqrt(d2);
  const double smin = singular_values(x).back();
  rep.bound = rep.epsilon_used * fit_full.ssr / smin;
  const double slack = 1e-12;
  rep.ssr_holds = fit_sketch.ssr <= (1.0 + rep.epsilon_used) * fit_full.ssr * (1.0 + slack) + slack;
  rep.beta_holds = rep.beta_dist <= rep.bound * (1.0 + slack) + slack;
  return rep;
}

GramDistortion inverse_gram_distortion(const DenseMatrix& x, const SketchOperator& op, const ContrastVector& c) {
  GramDistortion g;
  g.epsilon_used = singular_distortion(x, op);
  const DenseMatrix xs = apply_sketch(op, x);
  if (numeric_rank(xs) < x.cols()) throw Error(ErrorKind::SingularSketch, "sketched design lost rank");
  const DenseMatrix full_inv = spd_inverse(gram(x));
  const DenseMatrix sk_inv = spd_inverse(gram(xs));
  const double base = c.quadratic(full_inv);
  g.relative_error = std::abs(base - c.quadratic(sk_inv)) / base;
  g.bound = g.epsilon_used < 1.0 ? g.epsilon_used / (1.0 - g.epsilon_used) : INFINITY;
  g.holds = g.relative_error <= g.bound * (1.0 + 1e-9) + 1e-12;
  return g;
}

RatioBounds mse_ratio_bounds(double n, double m, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw Error(ErrorKind::DomainError, "epsilon must lie in [0,1)");
  if (!(m > 0.0 && m <= n)) throw Error(ErrorKind::DomainError, "need 0 < m <= n");
  return {n / m / (1.0 + epsilon), n / m / (1.0 - epsilon)};
}

double prediction_deviation_bound(double n, double m, double epsilon) {
  return n / m * epsilon / (1.0 - epsilon) + (n - m) / m;
}

double hetero_mse_bound(std::span<const double> omega_diag, double n, double m, double epsilon) {
  if (omega_diag.empty()) throw Error(ErrorKind::EmptyInput, "empty variance profile");
  const auto [lo, hi] = std::minmax_element(omega_diag.begin(), omega_diag.end());
  if (!(*lo > 0.0)) throw Error(ErrorKind::DomainError, "error variances must be positive");
  return (*hi / *lo) * (n / m) * (1.0 + epsilon) / ((1.0 - epsilon) * (1.0 - epsilon));
}

CenteringMatrix countsketch_centering(std::span<const double> omega_diag, std::size_t m, std::size_t n) {
  if (m < 1) throw Error(ErrorKind::InvalidDims, "m must be at least 1");
  if (omega_diag.size() != n) throw Error(ErrorKind::DimMismatch, "Omega must have n diagonal entries");
  double tr = 0.0;
  for (double w : omega_diag) tr += w;
  CenteringMatrix a;
  a.trace_term = tr / static_cast<double>(m);
  a.diagonal.resize(n);
  const double keep = 1.0 - 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i < n; ++i) a.diagonal[i] = omega_diag[i] * keep + a.trace_term;
  return a;
}

double centering_deviation_norm(std::span<const double> omega_diag, std::size_t m, std::size_t n) {
  const CenteringMatrix a = countsketch_centering(omega_diag, m, n);
  const double ratio = static_cast<double>(m) / static_cast<double>(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(ratio * a.diagonal[i] - omega_diag[i]));
  return worst;
}

DenseMatrix conditional_variance(const DenseMatrix& x, const SketchOperator& op, std::span<const double> omega_diag) {
  if (omega_diag.size() != x.rows()) throw Error(ErrorKind::DimMismatch, "Omega must have n diagonal entries");
  const DenseMatrix xs = apply_sketch(op, x);
  if (numeric_rank(xs) < x.cols()) throw Error(ErrorKind::SingularSketch, "sketched design lost rank");
  const DenseMatrix bread = spd_inverse(gram(xs));
  // X̃'ΠΩΠ'X̃ = G'G with G = Ω^{1/2}Π'X̃.
  DenseMatrix g = apply_sketch_transpose(op, xs);
  for (std::size_t i = 0; i < g.rows(); ++i) {
    const double w = std::sqrt(omega_diag[i]);
    for (double& v : g.row(i)) v *= w;
  }
  return multiply(multiply(bread, gram(g)), bread);
}

DenseMatrix full_sample_variance(const DenseMatrix& x, std::span<const double> omega_diag) {
  if (omega_diag.size() != x.rows()) throw Error(ErrorKind::DimMismatch, "Omega must have n diagonal entries");
  return sandwich(x, omega_diag);
}

double noncentrality(const DenseMatrix& R, std::span<const double> r, std::span<const double> beta0,
                     const DenseMatrix& covariance) {
  std::vector<double> diff = multiply(R, beta0);
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= r[i];
  const DenseMatrix v = multiply(multiply(R, covariance), transpose(R));
  DenseMatrix vinv;
  try {
    vinv = spd_inverse(v);
  } catch (const Error&) {
    throw Error(ErrorKind::SingularRestriction, "R V R' is singular");
  }
  return dot(diff, multiply(vinv, diff));
}

double expected_f(std::size_t q, std::size_t dof2, double phi) {
  if (dof2 <= 2) return INFINITY;
  const double v2 = static_cast<double>(dof2);
  const double v1 = static_cast<double>(q);
  return v2 * (v1 + phi) / (v1 * (v2 - 2.0));
}

FTestResult f_test(const RegressionFit& fit, const DenseMatrix& R, std::span<const double> r,
                   std::span<const double> beta_true) {
  const std::size_t q = R.rows();
  const std::size_t K = fit.beta.size();
  if (R.cols() != K || r.size() != q || q == 0 || q > K) throw Error(ErrorKind::DimMismatch, "restriction shape mismatch");
  if (fit.m_used <= K) throw Error(ErrorKind::InvalidDims, "no residual degrees of freedom");
  FTestResult res;
  res.q = q;
  res.dof2 = fit.m_used - K;
  res.statistic = noncentrality(R, r, fit.beta, fit.covariance) / static_cast<double>(q);
  if (!beta_true.empty()) res.noncentrality = noncentrality(R, r, beta_true, fit.covariance);
  res.expected_f = expected_f(q, res.dof2, res.noncentrality);
  res.p_value = f_upper_tail(res.statistic, static_cast<double>(q), static_cast<double>(res.dof2));
  return res;
}

std::string serialize_fit(const RegressionFit& fit, const std::vector<std::string>& names, std::string_view scheme,
                          std::uint64_t seed) {
  std::ostringstream os;
  os.precision(17);
  os << "# n=" << fit.n_source << " m=" << fit.m_used << " scheme=" << scheme << " seed=" << seed
     << " variance_mode=" << to_string(fit.variance_mode) << '\n';
  os << "coef_name,estimate,std_error\n";
  for (std::size_t k = 0; k < fit.beta.size(); ++k) {
    const std::string name = k < names.size() ? names[k] : "b" + std::to_string(k + 1);
    os << name << ',' << fit.beta[k] << ',' << fit.std_errors[k] << '\n';
  }
  return os.str();
}

}  // namespace sketchreg
