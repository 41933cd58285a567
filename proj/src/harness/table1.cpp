#include <algorithm>
#include <cmath>
#include <numeric>

#include "sketchreg/embedding.hpp"
#include "sketchreg/error.hpp"
#include "sketchreg/harness/experiment.hpp"
#include "sketchreg/harness/parallel.hpp"
#include "sketchreg/linalg.hpp"

namespace sketchreg {

namespace {

bool is_dense_projection(SchemeId s) noexcept {
  return s == SchemeId::RP1 || s == SchemeId::RP2 || s == SchemeId::RP4;
}

DenseMatrix center_columns(DenseMatrix a) {
  std::vector<double> mean(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) mean[j] += a(i, j);
  for (double& v : mean) v /= static_cast<double>(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) -= mean[j];
  return a;
}

}  // namespace

std::vector<ReportRow> run_table1(const ExperimentConfig& cfg) {
  const std::size_t S = cfg.schemes.size();
  const std::size_t M = cfg.m_grid.size();
  const std::size_t cells = S * M;
  const auto exp_tag = static_cast<std::uint64_t>(cfg.experiment);
  std::vector<ReportRow> rows;

  for (std::size_t p = 0; p < cfg.dgps.size(); ++p) {
    const DgpKind dgp = cfg.dgps[p];
    // Each replication yields, per (scheme, m) cell, the pairwise success rate and the
    // singular value distortion; a failed cell is NaN in both.
    auto per_rep = parallel_map<std::vector<double>>(cfg.replications, cfg.workers, [&](std::size_t rep) {
      const std::uint64_t rep_seed = derive_seed(cfg.master_seed, {exp_tag, p, rep});
      Rng rng(rep_seed);
      // Columns are centered so the spectrum reflects spread rather than the common mean; a
      // Gaussian projection then distorts every design alike.
      const DenseMatrix a = center_columns(draw_design(dgp, cfg.n, cfg.K, rng));
      const std::vector<double> sv_a = singular_values(a);
      std::vector<double> out(2 * cells, std::nan(""));
      for (std::size_t s = 0; s < S; ++s) {
        const SchemeId scheme = cfg.schemes[s];
        const auto tag = static_cast<std::uint64_t>(scheme);
        // Dense projections draw row i from its own stream, so the m-row operator is the
        // first m rows of the largest one, rescaled. One application then serves the grid.
        DenseMatrix nested;
        std::size_t m_max = 0;
        if (is_dense_projection(scheme)) {
          m_max = *std::max_element(cfg.m_grid.begin(), cfg.m_grid.end());
          nested = apply_sketch(build_sketch(scheme, cfg.n, m_max, derive_seed(rep_seed, {tag, 0, 1})), a);
        }
        for (std::size_t mi = 0; mi < M; ++mi) {
          const std::size_t m = cfg.m_grid[mi];
          try {
            DenseMatrix sk;
            if (m_max > 0) {
              std::vector<std::size_t> head(m);
              std::iota(head.begin(), head.end(), std::size_t{0});
              sk = scale(select_rows(nested, head), std::sqrt(static_cast<double>(m_max) / static_cast<double>(m)));
            } else {
              sk = apply_sketch(build_sketch(scheme, cfg.n, m, derive_seed(rep_seed, {tag, m, 1}), &a), a);
            }
            const std::vector<double> sv = singular_values(sk);
            double ss = 0.0;
            for (std::size_t k = 0; k < sv_a.size(); ++k) {
              const double ratio = (k < sv.size() ? sv[k] : 0.0) / sv_a[k] - 1.0;
              ss += ratio * ratio;
            }
            out[2 * (s * M + mi)] = jl_pairwise_success(a, sk, cfg.epsilon);
            out[2 * (s * M + mi) + 1] = std::sqrt(ss);
          } catch (const Error&) {
          }
        }
      }
      return out;
    });

    const std::string dgp_name(to_string(dgp));
    for (int metric = 0; metric < 2; ++metric) {
      const std::string metric_name = metric == 0 ? "pairwise_success" : "eigen_distortion";
      for (std::size_t mi = 0; mi < M; ++mi)
        for (std::size_t s = 0; s < S; ++s) {
          std::vector<double> v(cfg.replications);
          for (std::size_t r = 0; r < cfg.replications; ++r) v[r] = per_rep[r][2 * (s * M + mi) + metric];
          const MeanSe ms = mean_se(v);
          ReportRow row;
          row.experiment = std::string(to_string(cfg.experiment));
          row.panel = dgp_name + " " + metric_name;
          row.scheme = std::string(scheme_label(cfg.schemes[s]));
          row.m = cfg.m_grid[mi];
          row.J = 1;
          row.metric = metric_name;
          row.value = ms.mean;
          row.mc_stderr = ms.se;
          row.replications = cfg.replications;
          row.seed = cfg.master_seed;
          rows.push_back(row);
          if (metric == 1 && ms.count < cfg.replications) {
            row.panel = dgp_name + " failures";
            row.metric = "failures";
            row.value = static_cast<double>(cfg.replications - ms.count);
            row.mc_stderr = 0.0;
            rows.push_back(row);
          }
        }
    }
  }
  return rows;
}

}  // namespace sketchreg
