#include <algorithm>
#include <cmath>

#include "sketchreg/amm.hpp"
#include "sketchreg/embedding.hpp"
#include "sketchreg/error.hpp"
#include "sketchreg/harness/experiment.hpp"
#include "sketchreg/harness/parallel.hpp"
#include "sketchreg/linalg.hpp"
#include "sketchreg/pooling.hpp"

namespace sketchreg {

namespace {

constexpr std::uint64_t kTagAmmData = 41;
constexpr std::size_t kAmmRows = 400;
constexpr std::size_t kAmmColsA = 4;
constexpr std::size_t kAmmColsB = 3;
constexpr std::size_t kAmmDraws = 40;

enum Check : std::size_t { kL3Ssr, kL3Beta, kL4, kThm2, kHetero, kThm3, kAmmSq, kAmmExceed, kChecks };

ReportRow suite_row(const ExperimentConfig& cfg, std::string panel, std::string scheme, std::size_t m, std::size_t J,
                    std::string param, std::string metric, double value, double se) {
  ReportRow r;
  r.experiment = std::string(to_string(cfg.experiment));
  r.panel = std::move(panel);
  r.scheme = std::move(scheme);
  r.m = m;
  r.J = J;
  r.param = std::move(param);
  r.metric = std::move(metric);
  r.value = value;
  r.mc_stderr = se;
  r.replications = cfg.replications;
  r.seed = cfg.master_seed;
  return r;
}

double ratio_of(const ContrastVector& c, const DenseMatrix& v_sketch, const DenseMatrix& v_full) {
  return c.quadratic(v_sketch) / c.quadratic(v_full);
}

}  // namespace

std::vector<ReportRow> run_bound_suite(const ExperimentConfig& cfg) {
  const auto exp_tag = static_cast<std::uint64_t>(cfg.experiment);
  const std::size_t n = cfg.n;
  const std::size_t K = cfg.K;
  const std::size_t m = cfg.m_grid.front();
  const std::size_t J = cfg.J_grid.front();
  const SchemeId scheme = cfg.schemes.front();
  const ContrastVector c = ContrastVector::unit(K, K - 1);

  // Fixed matrices for the approximate-multiplication checks.
  Rng amm_rng(derive_seed(cfg.master_seed, {exp_tag, kTagAmmData}));
  const DenseMatrix amm_a = draw_design(DgpKind::PearsonX, kAmmRows, kAmmColsA, amm_rng);
  const DenseMatrix amm_b = draw_design(DgpKind::ExponentialX, kAmmRows, kAmmColsB, amm_rng);
  const SamplingDistribution amm_p = optimal_probabilities(amm_a, amm_b);
  const DenseMatrix amm_exact = multiply_tn(amm_a, amm_b);
  const double amm_eps = std::sqrt(2.0 / static_cast<double>(kAmmDraws));  // Markov bound 1/2
  const double amm_scale = std::pow(frobenius_norm(amm_a) * frobenius_norm(amm_b), 2);
  const std::size_t amm_cells = kAmmColsA * kAmmColsB;

  auto per_seed = parallel_map<std::vector<double>>(cfg.replications, cfg.workers, [&](std::size_t rep) {
    const std::uint64_t rep_seed = derive_seed(cfg.master_seed, {exp_tag, 0, rep});
    Rng rng(rep_seed);
    std::vector<double> out(kChecks + amm_cells, std::nan(""));

    DenseMatrix x(n, K);
    {
      const DenseMatrix body = draw_design(cfg.dgps.front(), n, K - 1, rng);
      for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        for (std::size_t k = 1; k < K; ++k) x(i, k) = body(i, k - 1);
      }
    }
    std::vector<double> y(n), omega(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (double v : x.row(i)) s += v;
      y[i] = s + rng.normal();
      omega[i] = rng.uniform() < 0.5 ? 1.0 : 4.0;
    }
    const std::vector<double> ones(n, 1.0);
    const auto op = build_sketch(scheme, n, m, derive_seed(rep_seed, {static_cast<std::uint64_t>(scheme), m, 1}), &x);

    try {
      const RegressionFit full = ols(y, x);
      const RegressionFit sk = sketched_ols(y, x, op);
      const Lemma3Report l3 = lemma3_check(full, sk, x, y, op);
      out[kL3Ssr] = l3.ssr_holds;
      out[kL3Beta] = l3.beta_holds;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularSketch) throw;
    }
    try {
      out[kL4] = inverse_gram_distortion(x, op, c).holds;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularSketch) throw;
    }
    try {
      const double eps = singular_distortion(x, op);
      const double ratio = ratio_of(c, conditional_variance(x, op, ones), full_sample_variance(x, ones));
      if (eps < 1.0) {
        const RatioBounds b = mse_ratio_bounds(static_cast<double>(n), static_cast<double>(m), eps);
        out[kThm2] = ratio >= b.lower * (1 - 1e-9) && ratio <= b.upper * (1 + 1e-9);
        const double hratio = ratio_of(c, conditional_variance(x, op, omega), full_sample_variance(x, omega));
        out[kHetero] = hratio <= hetero_mse_bound(omega, static_cast<double>(n), static_cast<double>(m), eps) * (1 + 1e-9);
      } else {
        out[kThm2] = 0.0;
        out[kHetero] = 1.0;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularSketch) throw;
    }
    try {
      const std::uint64_t pool_seed = derive_seed(rep_seed, {static_cast<std::uint64_t>(SchemeId::RS1), m, J});
      const auto blocks = draw_partition(SchemeId::RS1, n, m, J, pool_seed);
      const double w = std::sqrt(static_cast<double>(n) / static_cast<double>(m));
      double eps = 0.0;
      DenseMatrix v_sum(K, K);
      for (const auto& b : blocks) {
        const auto opj = make_row_selection(n, b, std::vector<double>(b.size(), w));
        eps = std::max(eps, singular_distortion(x, opj));
        v_sum = add(v_sum, conditional_variance(x, opj, ones));
      }
      const double dj = static_cast<double>(J);
      const double ratio = ratio_of(c, scale(v_sum, 1.0 / (dj * dj)), full_sample_variance(x, ones));
      out[kThm3] = eps >= 1.0 ||
                   ratio <= pooled_variance_bound(static_cast<double>(n), static_cast<double>(m), dj, eps) * (1 + 1e-9);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularSketch) throw;
    }

    const DenseMatrix est = amm(amm_a, amm_b, kAmmDraws, amm_p, derive_seed(rep_seed, {kTagAmmData}));
    const DenseMatrix diff = subtract(est, amm_exact);
    const double sq = std::pow(frobenius_norm(diff), 2);
    out[kAmmSq] = sq;
    out[kAmmExceed] = sq > amm_eps * amm_eps * amm_scale ? 1.0 : 0.0;
    for (std::size_t i = 0; i < amm_cells; ++i) out[kChecks + i] = est.data()[i];
    return out;
  });

  auto column = [&](std::size_t idx) {
    std::vector<double> v(cfg.replications);
    for (std::size_t r = 0; r < cfg.replications; ++r) v[r] = per_seed[r][idx];
    return v;
  };
  std::vector<ReportRow> rows;
  const std::string label(scheme_label(scheme));
  static const char* const names[] = {"lemma3_ssr", "lemma3_beta", "lemma4_inverse_gram", "thm2_ratio_containment",
                                      "hetero_ratio_bound", "thm3_pooled_bound"};
  for (std::size_t k = kL3Ssr; k <= kThm3; ++k) {
    const MeanSe ms = mean_se(column(k));
    rows.push_back(suite_row(cfg, "coverage", k == kThm3 ? "rs1" : label, m, k == kThm3 ? J : 1, "", names[k], ms.mean,
                             ms.se));
    rows.push_back(suite_row(cfg, "evaluated", k == kThm3 ? "rs1" : label, m, k == kThm3 ? J : 1, "", names[k],
                             static_cast<double>(ms.count), 0.0));
  }

  const MeanSe mse = mean_se(column(kAmmSq));
  const double exact_var = amm_exact_variance(amm_a, amm_b, kAmmDraws, amm_p);
  rows.push_back(suite_row(cfg, "amm", "amm", kAmmDraws, 1, "", "mse", mse.mean, mse.se));
  rows.push_back(suite_row(cfg, "amm", "amm", kAmmDraws, 1, "", "mse_exact", exact_var, 0.0));
  rows.push_back(suite_row(cfg, "amm", "amm", kAmmDraws, 1, "", "mse_z", (mse.mean - exact_var) / mse.se, 0.0));
  const MeanSe exceed = mean_se(column(kAmmExceed));
  rows.push_back(suite_row(cfg, "amm", "amm", kAmmDraws, 1, "", "markov_exceed_rate", exceed.mean, exceed.se));
  rows.push_back(suite_row(cfg, "amm", "amm", kAmmDraws, 1, "", "markov_bound",
                           amm_markov_probability(kAmmDraws, amm_eps), 0.0));
  double max_z = 0.0;
  for (std::size_t i = 0; i < amm_cells; ++i) {
    const MeanSe ms = mean_se(column(kChecks + i));
    max_z = std::max(max_z, std::abs(ms.mean - amm_exact.data()[i]) / ms.se);
  }
  rows.push_back(suite_row(cfg, "amm", "amm", kAmmDraws, 1, "", "unbiased_max_abs_z", max_z, 0.0));
  return rows;
}

std::vector<ReportRow> run_centering(const ExperimentConfig& cfg) {
  const auto exp_tag = static_cast<std::uint64_t>(cfg.experiment);
  const std::size_t n = cfg.n;
  const std::size_t d = cfg.K;
  const std::size_t m = cfg.m_grid.front();
  const SchemeId scheme = cfg.schemes.front();

  Rng setup(derive_seed(cfg.master_seed, {exp_tag, 1}));
  const DenseMatrix u = svd(draw_design(DgpKind::NormalX, n, d, setup)).U;
  std::vector<std::vector<double>> psis(2);
  psis[0].assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) psis[1].push_back(0.5 + 1.5 * setup.uniform());
  const std::size_t cells = d * d;

  auto per_draw = parallel_map<std::vector<double>>(cfg.replications, cfg.workers, [&](std::size_t rep) {
    const std::uint64_t rep_seed = derive_seed(cfg.master_seed, {exp_tag, 0, rep});
    const auto op = build_sketch(scheme, n, m, derive_seed(rep_seed, {static_cast<std::uint64_t>(scheme), m, 1}));
    const DenseMatrix pu = apply_sketch(op, u);
    std::vector<double> out;
    out.reserve(psis.size() * cells);
    for (const auto& psi : psis) {
      DenseMatrix root(n, n);
      for (std::size_t i = 0; i < n; ++i) root(i, i) = std::sqrt(psi[i]);
      const DenseMatrix pr = apply_sketch(op, root);          // ΠΨ^{1/2}
      const DenseMatrix inner = multiply(pr, transpose(pr));  // ΠΨΠ'
      const DenseMatrix val = multiply_tn(pu, multiply(inner, pu));
      out.insert(out.end(), val.data().begin(), val.data().end());
    }
    return out;
  });

  std::vector<ReportRow> rows;
  const std::string label(scheme_label(scheme));
  static const char* const psi_names[] = {"psi=identity", "psi=random_diagonal"};
  for (std::size_t p = 0; p < psis.size(); ++p) {
    const CenteringMatrix a = countsketch_centering(psis[p], m, n);
    DenseMatrix full_a(n, n);
    for (std::size_t i = 0; i < n; ++i) full_a(i, i) = a.diagonal[i];
    const DenseMatrix target = multiply_tn(u, multiply(full_a, u));
    double max_z = 0.0, max_diff = 0.0;
    for (std::size_t e = 0; e < cells; ++e) {
      std::vector<double> v(cfg.replications);
      for (std::size_t r = 0; r < cfg.replications; ++r) v[r] = per_draw[r][p * cells + e];
      const MeanSe ms = mean_se(v);
      const double diff = std::abs(ms.mean - target.data()[e]);
      max_diff = std::max(max_diff, diff);
      max_z = std::max(max_z, ms.se > 0 ? diff / ms.se : (diff > 1e-12 ? INFINITY : 0.0));
    }
    rows.push_back(suite_row(cfg, "centering", label, m, 1, psi_names[p], "max_abs_z", max_z, 0.0));
    rows.push_back(suite_row(cfg, "centering", label, m, 1, psi_names[p], "max_abs_diff", max_diff, 0.0));
  }
  // Ψ = σ²I: A is σ²(n+m−1)/m times the identity, so U'AU = σ²(n+m−1)/m·U'U.
  const double sigma2 = 2.0;
  const CenteringMatrix a = countsketch_centering(std::vector<double>(n, sigma2), m, n);
  const DenseMatrix utu = multiply_tn(u, u);
  const double factor = sigma2 * static_cast<double>(n + m - 1) / static_cast<double>(m);
  double gap = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double uau = 0.0;
      for (std::size_t k = 0; k < n; ++k) uau += u(k, i) * a.diagonal[k] * u(k, j);
      gap = std::max(gap, std::abs(uau - factor * utu(i, j)));
    }
  rows.push_back(suite_row(cfg, "centering", label, m, 1, "psi=2I", "closed_form_gap", gap, 0.0));
  return rows;
}

std::vector<ReportRow> run_rank_failure(const ExperimentConfig& cfg) {
  const auto exp_tag = static_cast<std::uint64_t>(cfg.experiment);
  const std::size_t S = cfg.schemes.size();
  const std::size_t M = cfg.m_grid.size();
  auto per_rep = parallel_map<std::vector<double>>(cfg.replications, cfg.workers, [&](std::size_t rep) {
    const std::uint64_t rep_seed = derive_seed(cfg.master_seed, {exp_tag, 0, rep});
    Rng rng(rep_seed);
    const DenseMatrix x = draw_design(cfg.dgps.front(), cfg.n, cfg.K, rng);
    std::vector<double> out(S * M);
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t mi = 0; mi < M; ++mi) {
        const std::size_t m = cfg.m_grid[mi];
        const auto op = build_sketch(cfg.schemes[s], cfg.n, m,
                                     derive_seed(rep_seed, {static_cast<std::uint64_t>(cfg.schemes[s]), m, 1}), &x);
        out[s * M + mi] = numeric_rank(apply_sketch(op, x)) < x.cols() ? 1.0 : 0.0;
      }
    return out;
  });
  std::vector<ReportRow> rows;
  for (std::size_t mi = 0; mi < M; ++mi)
    for (std::size_t s = 0; s < S; ++s) {
      std::vector<double> v(cfg.replications);
      for (std::size_t r = 0; r < cfg.replications; ++r) v[r] = per_rep[r][s * M + mi];
      const MeanSe ms = mean_se(v);
      rows.push_back(suite_row(cfg, "singular_fraction", std::string(scheme_label(cfg.schemes[s])), cfg.m_grid[mi], 1,
                               "", "singular_fraction", ms.mean, ms.se));
    }
  return rows;
}

}  // namespace sketchreg
