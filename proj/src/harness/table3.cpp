#include <cmath>
#include <map>
#include <numeric>

#include "sketchreg/distributions.hpp"
#include "sketchreg/error.hpp"
#include "sketchreg/harness/experiment.hpp"
#include "sketchreg/harness/parallel.hpp"
#include "sketchreg/pooling.hpp"

namespace sketchreg {

namespace {

constexpr std::uint64_t kTagPermutation = 21;

enum Slot : std::size_t { kBeta, kSe, kSize, kPower, kSizeT2, kPowerT2, kFailed, kSlots };

struct Cell {
  SchemeId scheme;
  std::size_t m;
  std::size_t J;
};

/// [X y0 y1] with y0 = X·β + σe and y1 = y0 − effect·x_K, i.e. the last slope lowered by `effect`.
DenseMatrix simulate_panel(const ExperimentConfig& cfg, std::size_t K, Rng& rng) {
  const DenseMatrix x = draw_design(cfg.dgps.front(), cfg.n, K, rng);
  const double sigma = cfg.sigma_e.front();
  const double effect = cfg.effect.front();
  DenseMatrix z(cfg.n, K + 2);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const auto xr = x.row(i);
    auto zr = z.row(i);
    double y = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      zr[k] = xr[k];
      y += cfg.beta_true * xr[k];
    }
    y += sigma * rng.normal();
    zr[K] = y;
    zr[K + 1] = y - effect * xr[K - 1];
  }
  return z;
}

void evaluate_cell(const std::vector<DenseMatrix>& sketches, const std::vector<std::vector<std::size_t>>& blocks,
                   const ExperimentConfig& cfg, const Cell& cell, std::size_t K, double* out) {
  const ContrastVector c = ContrastVector::unit(K, K - 1);
  std::vector<RegressionFit> fits0, fits1;
  std::size_t failures = 0;
  for (std::size_t j = 0; j < sketches.size(); ++j) {
    const DenseMatrix xs = column_block(sketches[j], 0, K);
    const std::size_t src = block_source_rows(cell.scheme, cfg.n, blocks[j]);
    try {
      RegressionFit f0 = fit_sketched(sketches[j].column(K), xs, src, cfg.variance);
      RegressionFit f1 = fit_sketched(sketches[j].column(K + 1), xs, src, cfg.variance);
      fits0.push_back(std::move(f0));
      fits1.push_back(std::move(f1));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularSketch) throw;
      ++failures;
    }
  }
  const PooledFit p0 = pool_fits(std::move(fits0), failures, cell.m, c, cfg.beta_true);
  const PooledFit p1 = pool_fits(std::move(fits1), failures, cell.m, c, cfg.beta_true);
  const double z = inv_norm_cdf(1.0 - cfg.alpha / 2.0);
  double sum_var = 0.0;
  for (const auto& f : p0.per_sketch) sum_var += c.quadratic(f.covariance);
  out[kBeta] = p0.c_beta_bar;
  out[kSe] = std::sqrt(sum_var) / static_cast<double>(p0.J);
  out[kSize] = std::abs(t1_statistic(p0)) > z ? 1.0 : 0.0;
  out[kPower] = std::abs(t1_statistic(p1)) > z ? 1.0 : 0.0;
  if (p0.J >= 2) {
    const double tc = t_critical(static_cast<double>(p0.J - 1), 1.0 - cfg.alpha / 2.0);
    out[kSizeT2] = std::abs(t2_statistic(p0)) > tc ? 1.0 : 0.0;
    out[kPowerT2] = std::abs(t2_statistic(p1)) > tc ? 1.0 : 0.0;
  }
  out[kFailed] = static_cast<double>(failures);
}

std::vector<std::vector<std::size_t>> contiguous_blocks(std::size_t n, std::size_t J) {
  std::vector<std::vector<std::size_t>> blocks(J);
  const std::size_t size = n / J;
  for (std::size_t j = 0; j < J; ++j) {
    blocks[j].resize(size);
    std::iota(blocks[j].begin(), blocks[j].end(), j * size);
  }
  return blocks;
}

}  // namespace

std::vector<ReportRow> run_table3(const ExperimentConfig& cfg) {
  const auto exp_tag = static_cast<std::uint64_t>(cfg.experiment);
  const std::vector<std::size_t> k_grid = cfg.k_grid.empty() ? std::vector<std::size_t>{cfg.K} : cfg.k_grid;
  std::vector<Cell> cells;
  for (SchemeId s : cfg.schemes)
    for (std::size_t J : cfg.J_grid)
      for (std::size_t m : cfg.m_grid) cells.push_back({s, m, J});

  std::vector<ReportRow> rows;
  for (std::size_t p = 0; p < k_grid.size(); ++p) {
    const std::size_t K = k_grid[p];
    auto per_rep = parallel_map<std::vector<double>>(cfg.replications, cfg.workers, [&](std::size_t rep) {
      const std::uint64_t rep_seed = derive_seed(cfg.master_seed, {exp_tag, p, rep});
      Rng rng(rep_seed);
      const DenseMatrix z = simulate_panel(cfg, K, rng);
      std::vector<double> out(cells.size() * kSlots, std::nan(""));
      // Non-RS1 schemes split one permutation of the rows into J contiguous blocks; the
      // permuted copy is shared by every m at that J.
      std::map<std::size_t, DenseMatrix> permuted;
      for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const Cell& cell = cells[ci];
        double* slot = out.data() + ci * kSlots;
        const std::uint64_t cell_seed =
            derive_seed(rep_seed, {static_cast<std::uint64_t>(cell.scheme), cell.m, cell.J});
        try {
          if (cell.scheme == SchemeId::RS1 || cell.J == 1) {
            const auto blocks = draw_partition(cell.scheme, cfg.n, cell.m, cell.J, cell_seed);
            evaluate_cell(sketch_blocks(z, cell.scheme, cell.m, blocks, cell_seed), blocks, cfg, cell, K, slot);
          } else {
            auto it = permuted.find(cell.J);
            if (it == permuted.end()) {
              if (!permuted.empty()) permuted.clear();
              Rng prng(derive_seed(rep_seed, {kTagPermutation, cell.J}));
              it = permuted.emplace(cell.J, select_rows(z, random_permutation(prng, cfg.n))).first;
            }
            const auto blocks = contiguous_blocks(cfg.n, cell.J);
            evaluate_cell(sketch_blocks(it->second, cell.scheme, cell.m, blocks, cell_seed), blocks, cfg, cell, K,
                          slot);
          }
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::AllSketchesSingular) throw;
          slot[kFailed] = static_cast<double>(cell.J);
        }
      }
      return out;
    });

    const std::string panel = "K=" + std::to_string(K);
    static const char* const names[kSlots] = {"mean_beta", "se", "size", "power", "size_t2", "power_t2", "failures"};
    for (std::size_t slot = 0; slot < kSlots; ++slot)
      for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const Cell& cell = cells[ci];
        std::vector<double> v(cfg.replications);
        for (std::size_t r = 0; r < cfg.replications; ++r) v[r] = per_rep[r][ci * kSlots + slot];
        MeanSe ms = mean_se(v);
        if (ms.count == 0) continue;
        if (slot == kFailed) {
          ms.mean *= static_cast<double>(ms.count);
          ms.se = 0.0;
        }
        ReportRow row;
        row.experiment = std::string(to_string(cfg.experiment));
        row.panel = panel + " " + names[slot];
        row.scheme = std::string(scheme_label(cell.scheme));
        row.m = cell.m;
        row.J = cell.J;
        row.metric = names[slot];
        row.value = ms.mean;
        row.mc_stderr = ms.se;
        row.replications = cfg.replications;
        row.seed = cfg.master_seed;
        rows.push_back(row);
        if (slot == kBeta) {
          // Monte Carlo spread of c'β̄ alongside its mean.
          double ss = 0.0;
          for (double x : v)
            if (!std::isnan(x)) ss += (x - ms.mean) * (x - ms.mean);
          row.panel = panel + " sd_beta";
          row.metric = "sd_beta";
          row.value = ms.count > 1 ? std::sqrt(ss / static_cast<double>(ms.count - 1)) : 0.0;
          row.mc_stderr = ms.count > 1 ? row.value / std::sqrt(2.0 * static_cast<double>(ms.count - 1)) : 0.0;
          rows.push_back(row);
        }
      }
  }
  return rows;
}

}  // namespace sketchreg
