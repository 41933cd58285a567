// Acceptance checks. Usage: acceptance <criterion 1-10>. Prints one PASS/FAIL line for the
// criterion followed by indented detail lines, and exits non-zero on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sketchreg/error.hpp"
#include "sketchreg/harness/experiment.hpp"
#include "sketchreg/harness/report.hpp"
#include "sketchreg/sketch.hpp"
#include "sketchreg/sketch_size.hpp"

using namespace sketchreg;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      details.push_back("miss: " + what);
    }
  }
  void note(const std::string& what) { details.push_back(what); }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Printed Table 1 values, indexed [dgp][metric][m][scheme] with schemes in report order
// rs1 rs2 rs3 rp1 rp2 rp3 rp4 cs lev.
const double kTable1[2][2][6][9] = {
    {{{0.627, 0.624, 0.538, 0.628, 0.633, 0.631, 0.640, 0.642, 0.757},
      {0.801, 0.792, 0.700, 0.790, 0.795, 0.795, 0.800, 0.793, 0.909},
      {0.931, 0.931, 0.871, 0.926, 0.929, 0.927, 0.931, 0.928, 0.982},
      {0.978, 0.972, 0.932, 0.971, 0.974, 0.974, 0.975, 0.972, 0.997},
      {0.990, 0.987, 0.973, 0.990, 0.991, 0.989, 0.990, 0.991, 1.000},
      {1.000, 1.000, 0.998, 1.000, 1.000, 1.000, 1.000, 1.000, 1.000}},
     {{0.189, 0.191, 0.191, 0.189, 0.187, 0.188, 0.189, 0.188, 0.158},
      {0.126, 0.128, 0.127, 0.127, 0.127, 0.128, 0.126, 0.129, 0.105},
      {0.082, 0.085, 0.084, 0.086, 0.084, 0.085, 0.085, 0.086, 0.071},
      {0.065, 0.067, 0.065, 0.067, 0.066, 0.067, 0.067, 0.068, 0.055},
      {0.055, 0.056, 0.055, 0.056, 0.056, 0.056, 0.055, 0.055, 0.045},
      {0.033, 0.036, 0.033, 0.036, 0.037, 0.036, 0.035, 0.037, 0.029}}},
    {{{0.432, 0.429, 0.402, 0.627, 0.624, 0.636, 0.628, 0.637, 0.717},
      {0.580, 0.578, 0.548, 0.796, 0.795, 0.794, 0.800, 0.791, 0.875},
      {0.747, 0.738, 0.717, 0.925, 0.930, 0.929, 0.930, 0.928, 0.972},
      {0.851, 0.840, 0.812, 0.971, 0.968, 0.973, 0.969, 0.972, 0.992},
      {0.899, 0.894, 0.866, 0.990, 0.988, 0.989, 0.991, 0.989, 0.998},
      {0.986, 0.974, 0.975, 1.000, 1.000, 1.000, 1.000, 1.000, 1.000}},
     {{0.263, 0.257, 0.259, 0.188, 0.193, 0.188, 0.190, 0.188, 0.158},
      {0.176, 0.177, 0.175, 0.126, 0.128, 0.127, 0.127, 0.127, 0.104},
      {0.116, 0.118, 0.116, 0.084, 0.083, 0.083, 0.082, 0.085, 0.069},
      {0.090, 0.094, 0.090, 0.066, 0.067, 0.066, 0.065, 0.065, 0.055},
      {0.076, 0.079, 0.075, 0.055, 0.055, 0.055, 0.054, 0.055, 0.045},
      {0.048, 0.052, 0.048, 0.036, 0.036, 0.037, 0.035, 0.036, 0.030}}}};

Outcome criterion1() {
  Outcome out;
  ExperimentConfig cfg = default_config(ExperimentKind::Table1);
  cfg.workers = 0;
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = run_experiment(cfg);
  const double secs = seconds_since(t0);
  const char* dgps[2] = {"normal", "exponential"};
  const char* metrics[2] = {"pairwise_success", "eigen_distortion"};
  const double tol[2] = {0.03, 0.015};
  const std::size_t grid[6] = {161, 322, 644, 966, 1288, 2576};
  int cells = 0;
  double worst[2] = {0, 0};
  // Misses expected from sampling noise alone, taking the printed 1000-draw means to carry
  // the same per-draw spread as ours.
  double expected_misses = 0.0;
  const double noise_inflation = std::sqrt(1.0 + double(cfg.replications) / 1000.0);
  for (int g = 0; g < 2; ++g)
    for (int k = 0; k < 2; ++k)
      for (int mi = 0; mi < 6; ++mi)
        for (int s = 0; s < 9; ++s) {
          const std::string label(scheme_label(cfg.schemes[s]));
          const std::string panel = std::string(dgps[g]) + " " + metrics[k];
          const ReportRow& row = find_row(rows, panel, label, grid[mi], 0, metrics[k]);
          const double got = row.value;
          const double want = kTable1[g][k][mi][s];
          if (row.mc_stderr > 0) expected_misses += std::erfc(tol[k] / (row.mc_stderr * noise_inflation) / std::sqrt(2.0));
          const double dev = std::abs(got - want);
          worst[k] = std::max(worst[k], dev);
          ++cells;
          out.require(dev <= tol[k], panel + " " + label + " m=" + std::to_string(grid[mi]) +
                                         fmt(": %.4f vs printed %.3f", got, want));
        }
  out.summary = std::to_string(cells) + " cells, " + std::to_string(cfg.replications) + " replications" +
                fmt(", worst |dev| success %.4f (tol 0.03), distortion %.4f (tol 0.015), %.0f s", worst[0], worst[1],
                    secs);
  out.require(secs < 600, fmt("runtime %.0f s exceeds 600 s", secs));
  out.note(fmt("sampling noise alone predicts %.1f misses", expected_misses));
  return out;
}

struct Table3Cell {
  std::size_t m, J;
  double size_rs1, size_cs, power_rs1, power_cs, se_rs1, se_cs;
};

// Printed RS1 and CS columns.
const Table3Cell kTable3K3[12] = {
    {500, 1, 0.050, 0.062, 0.081, 0.071, 0.046, 0.045},   {500, 5, 0.035, 0.021, 0.114, 0.123, 0.021, 0.020},
    {500, 10, 0.039, 0.053, 0.276, 0.265, 0.014, 0.015},  {1000, 1, 0.048, 0.050, 0.101, 0.085, 0.032, 0.031},
    {1000, 5, 0.024, 0.032, 0.221, 0.233, 0.014, 0.015},  {1000, 10, 0.041, 0.044, 0.461, 0.452, 0.010, 0.010},
    {2000, 1, 0.045, 0.058, 0.136, 0.147, 0.021, 0.022},  {2000, 5, 0.034, 0.035, 0.436, 0.451, 0.010, 0.010},
    {2000, 10, 0.040, 0.038, 0.763, 0.767, 0.007, 0.007}, {5000, 1, 0.053, 0.040, 0.298, 0.275, 0.014, 0.014},
    {5000, 5, 0.026, 0.026, 0.835, 0.829, 0.006, 0.006},  {5000, 10, 0.045, 0.036, 0.987, 0.989, 0.005, 0.004}};
const Table3Cell kTable3K9[12] = {
    {500, 1, 0.049, 0.067, 0.076, 0.079, 0.046, 0.047},   {500, 5, 0.038, 0.029, 0.129, 0.120, 0.021, 0.020},
    {500, 10, 0.032, 0.039, 0.241, 0.268, 0.014, 0.015},  {1000, 1, 0.052, 0.041, 0.099, 0.087, 0.032, 0.031},
    {1000, 5, 0.036, 0.027, 0.219, 0.214, 0.014, 0.014},  {1000, 10, 0.033, 0.042, 0.461, 0.484, 0.010, 0.010},
    {2000, 1, 0.043, 0.050, 0.143, 0.128, 0.022, 0.022},  {2000, 5, 0.025, 0.028, 0.411, 0.400, 0.010, 0.010},
    {2000, 10, 0.041, 0.044, 0.782, 0.773, 0.007, 0.007}, {5000, 1, 0.051, 0.057, 0.260, 0.292, 0.014, 0.015},
    {5000, 5, 0.021, 0.037, 0.839, 0.813, 0.006, 0.007},  {5000, 10, 0.033, 0.044, 0.988, 0.990, 0.005, 0.005}};

Outcome criterion2() {
  Outcome out;
  ExperimentConfig cfg = default_config(ExperimentKind::Table3);
  cfg.workers = 0;
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = run_experiment(cfg);
  const double secs = seconds_since(t0);
  int checked = 0, missed = 0;
  double worst_size = 0, worst_power = 0, worst_se = 0;
  // Misses expected from sampling noise alone: each rate differs from the printed 1000-draw
  // estimate by roughly N(0, p(1-p)(1/R + 1/1000)).
  double expected_misses = 0.0, p_all_pass = 1.0;
  for (std::size_t K : {3u, 9u}) {
    const Table3Cell* table = K == 3 ? kTable3K3 : kTable3K9;
    const std::string panel = "K=" + std::to_string(K);
    for (int i = 0; i < 12; ++i) {
      const Table3Cell& c = table[i];
      for (const char* scheme : {"rs1", "cs"}) {
        const bool rs1 = std::string(scheme) == "rs1";
        struct Check {
          const char* metric;
          double want, tol;
          double* worst;
        } checks[] = {{"size", rs1 ? c.size_rs1 : c.size_cs, 0.02, &worst_size},
                      {"power", rs1 ? c.power_rs1 : c.power_cs, 0.04, &worst_power},
                      {"se", rs1 ? c.se_rs1 : c.se_cs, 0.002, &worst_se}};
        for (const auto& ch : checks) {
          const double got = find_row(rows, panel + " " + ch.metric, scheme, c.m, c.J, ch.metric).value;
          const double dev = std::abs(got - ch.want);
          *ch.worst = std::max(*ch.worst, dev);
          if (std::string(ch.metric) != "se") {
            const double p = std::clamp(ch.want, 0.01, 0.99);
            const double sd = std::sqrt(p * (1 - p) * (1.0 / double(cfg.replications) + 1.0 / 1000.0));
            const double miss = std::erfc(ch.tol / sd / std::sqrt(2.0));
            expected_misses += miss;
            p_all_pass *= 1 - miss;
          }
          ++checked;
          if (dev > ch.tol) ++missed;
          out.require(dev <= ch.tol, panel + " " + ch.metric + " " + scheme + " m=" + std::to_string(c.m) +
                                         " J=" + std::to_string(c.J) + fmt(": %.4f vs printed %.3f", got, ch.want));
        }
      }
    }
  }
  out.summary = std::to_string(checked) + " cells (" + std::to_string(missed) + " outside tolerance), " +
                std::to_string(cfg.replications) + " replications" +
                fmt(", worst |dev| size %.4f, power %.4f, ", worst_size, worst_power) +
                fmt("se %.4f, %.0f s", worst_se, secs);
  out.require(secs < 1800, fmt("runtime %.0f s exceeds 1800 s", secs));
  out.note(fmt("sampling noise alone predicts %.1f size/power misses; P(no miss) = %.1e", expected_misses, p_all_pass));
  return out;
}

const double kTable4[9][5] = {{29686, 7421, 3298, 1855, 1187},         {67837, 16959, 7537, 4240, 2713},
                              {93965, 23491, 10441, 5873, 3759},       {98296, 24574, 10922, 6143, 3932},
                              {224620, 56155, 24958, 14039, 8985},     {311136, 77784, 34571, 19446, 12445},
                              {981128, 245282, 109014, 61321, 39245},  {2242020, 560505, 249113, 140126, 89681},
                              {3105562, 776391, 345062, 194098, 124222}};

Outcome criterion3() {
  Outcome out;
  ExperimentConfig cfg = default_config(ExperimentKind::Table4);
  const auto rows = run_experiment(cfg);
  const double sigmas[3] = {0.5, 1.0, 3.0};
  const double gammas[3] = {0.5, 0.8, 0.9};
  const char* effects[5] = {"effect=0.005", "effect=0.01", "effect=0.015", "effect=0.02", "effect=0.025"};
  double worst = 0, worst_ratio = 0;
  for (int si = 0; si < 3; ++si)
    for (int gi = 0; gi < 3; ++gi) {
      const std::string param = fmt("gamma=%.2f;sigma_e=%.2f", gammas[gi], sigmas[si]);
      std::vector<double> exact(5);
      for (int e = 0; e < 5; ++e) {
        const double got = find_row(rows, "m2", "", 0, 0, effects[e], param).value;
        const double want = kTable4[si * 3 + gi][e];
        worst = std::max(worst, std::abs(got / want - 1));
        out.require(std::abs(got / want - 1) <= 0.15, param + " " + effects[e] + fmt(": %.0f vs printed %.0f", got, want));
        exact[e] = find_row(rows, "m2_exact", "", 0, 0, effects[e], param).value;
      }
      for (auto [lo, hi] : {std::pair{0, 1}, std::pair{1, 3}}) {
        const double rel = std::abs(exact[lo] / exact[hi] / 4.0 - 1);
        worst_ratio = std::max(worst_ratio, rel);
        out.require(rel <= 1e-12, param + fmt(": m2 ratio for doubled effect %.15g", exact[lo] / exact[hi]));
      }
    }
  const double s_ratio = std::pow(s_value(0.05, 0.9) / s_value(0.05, 0.5), 2);
  for (double sigma : sigmas)
    for (const char* eff : effects) {
      const double g9 = find_row(rows, "m2_exact", "", 0, 0, eff, fmt("gamma=0.90;sigma_e=%.2f", sigma)).value;
      const double g5 = find_row(rows, "m2_exact", "", 0, 0, eff, fmt("gamma=0.50;sigma_e=%.2f", sigma)).value;
      const double rel = std::abs(g9 / g5 / s_ratio - 1);
      worst_ratio = std::max(worst_ratio, rel);
      out.require(rel <= 1e-12, fmt("sigma_e=%.2f: gamma ratio %.15g vs %.15g", sigma, g9 / g5, s_ratio));
    }
  out.summary = fmt("45 cells, worst relative deviation %.1f%% (tol 15%%), worst exact-ratio error %.1e", 100 * worst,
                    worst_ratio);
  return out;
}

Outcome criterion4() {
  Outcome out;
  const double gammas[5] = {0.5, 0.6, 0.7, 0.8, 0.9};
  const double alphas[3] = {0.01, 0.05, 0.10};
  const double table[3][5] = {{2.326, 2.580, 2.851, 3.168, 3.608},
                              {1.645, 1.898, 2.169, 2.486, 2.926},
                              {1.282, 1.535, 1.806, 2.123, 2.563}};
  double worst = 0;
  for (int a = 0; a < 3; ++a)
    for (int g = 0; g < 5; ++g) {
      const double got = s_value(alphas[a], gammas[g]);
      worst = std::max(worst, std::abs(got - table[a][g]));
      out.require(std::abs(got - table[a][g]) <= 0.001,
                  fmt("alpha=%.2f gamma=%.1f: %.5f", alphas[a], gammas[g], got) + fmt(" vs %.3f", table[a][g]));
    }
  out.summary = fmt("15 cells, worst |dev| %.5f (tol 0.001)", worst);
  return out;
}

Outcome criterion5() {
  Outcome out;
  const auto r6 = m1_rule(1e7, 10, TailAssumption::moments(6));
  const auto r10 = m1_rule(1e7, 10, TailAssumption::moments(10));
  const auto thin = m1_rule(562170, 423, TailAssumption::thin());
  const auto m3 = m3_rule(562170, 5, 0.05, 0.8);
  out.require(r6.m == 10687, "m1(1e7, 10, r=6) = " + std::to_string(r6.m));
  out.require(thin.m == 8158, "thin-tail m1(562170, 423) = " + std::to_string(thin.m));
  out.require(m3.m >= 138900 && m3.m <= 139200, "m3(562170, 5, .05, .8) = " + std::to_string(m3.m));
  out.note("the 10,687 anchor is verified at r=6, the moment count the source text pairs with it; the formula at "
           "r=10 gives " + std::to_string(r10.m));
  out.summary = "m1(r=6) = " + std::to_string(r6.m) + ", thin-tail m1 = " + std::to_string(thin.m) +
                ", m3 = " + std::to_string(m3.m);
  return out;
}

/// Expected streaming state after step s, as printed: one string per output row listing the
/// signed input rows accumulated so far.
const char* const kStreamStates[9][3] = {{"", "-1", ""},
                                         {"", "-1", "-2"},
                                         {"3", "-1", "-2"},
                                         {"3", "-1 -4", "-2"},
                                         {"3 5", "-1 -4", "-2"},
                                         {"3 5 -6", "-1 -4", "-2"},
                                         {"3 5 -6", "-1 -4", "-2 7"},
                                         {"3 5 -6", "-1 -4 -8", "-2 7"},
                                         {"3 5 -6 9", "-1 -4 -8", "-2 7"}};

DenseMatrix expected_state(int step, const DenseMatrix& a) {
  DenseMatrix out(3, a.cols());
  for (int r = 0; r < 3; ++r) {
    std::istringstream in(kStreamStates[step][r]);
    int term;
    while (in >> term) {
      const std::size_t row = static_cast<std::size_t>(std::abs(term) - 1);
      for (std::size_t j = 0; j < a.cols(); ++j) out(r, j) += (term < 0 ? -1.0 : 1.0) * a(row, j);
    }
  }
  return out;
}

Outcome criterion6() {
  Outcome out;
  const std::vector<std::uint32_t> h{2, 3, 1, 2, 1, 1, 3, 2, 1};
  const std::vector<std::int8_t> g{-1, -1, 1, -1, 1, -1, 1, -1, 1};
  std::vector<std::uint32_t> bucket(9);
  for (int i = 0; i < 9; ++i) bucket[i] = h[i] - 1;
  const SketchOperator op = make_countsketch(3, bucket, g);
  // The identity tracks each row symbolically; the integer matrix checks a concrete d = 4 case.
  DenseMatrix ints(9, 4);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 4; ++j) ints(i, j) = double((i + 1) * 10 + j + 1);
  int states = 0;
  for (const DenseMatrix& a : {DenseMatrix::identity(9), ints}) {
    CsAccumulator acc(op, a.cols());
    for (int s = 0; s < 9; ++s) {
      acc.update(static_cast<std::size_t>(s), a.row(static_cast<std::size_t>(s)));
      const bool ok = acc.state() == expected_state(s, a);
      ++states;
      out.require(ok, "state after s=" + std::to_string(s + 1) + " (d=" + std::to_string(a.cols()) + ")");
    }
    out.require(acc.finalize() == apply_sketch(op, a), "final state differs from batch application");
  }
  const DenseMatrix printed = DenseMatrix::from_rows({{0, 0, 1, 0, 1, -1, 0, 0, 1},
                                                      {-1, 0, 0, -1, 0, 0, 0, -1, 0},
                                                      {0, -1, 0, 0, 0, 0, 1, 0, 0}});
  out.require(materialize(op) == printed, "materialized operator differs from the printed matrix");
  out.summary = std::to_string(states) + " intermediate states and the final sketch match exactly";
  return out;
}

Outcome criterion7() {
  Outcome out;
  ExperimentConfig cfg = default_config(ExperimentKind::BoundSuite);
  cfg.workers = 0;
  const auto rows = run_experiment(cfg);
  struct Need {
    const char* metric;
    double min_rate;
  } needs[] = {{"lemma3_ssr", 0.95},         {"lemma3_beta", 0.95},        {"lemma4_inverse_gram", 1.0},
               {"thm2_ratio_containment", 0.95}, {"hetero_ratio_bound", 0.95}, {"thm3_pooled_bound", 0.95}};
  std::ostringstream sum;
  for (const auto& n : needs) {
    const double rate = find_row(rows, "coverage", "", 0, 0, n.metric).value;
    const double count = find_row(rows, "evaluated", "", 0, 0, n.metric).value;
    out.require(rate >= n.min_rate, fmt("coverage %.3f below %.2f for ", rate, n.min_rate) + n.metric);
    out.note(std::string(n.metric) + fmt(": coverage %.3f over %.0f draws", rate, count));
    if (count < 0.9 * double(cfg.replications)) out.require(false, std::string(n.metric) + ": too few evaluated draws");
  }
  const double max_z = find_row(rows, "amm", "amm", 0, 0, "unbiased_max_abs_z").value;
  const double exceed = find_row(rows, "amm", "amm", 0, 0, "markov_exceed_rate").value;
  const double exceed_se = find_row(rows, "amm", "amm", 0, 0, "markov_exceed_rate").mc_stderr;
  const double bound = find_row(rows, "amm", "amm", 0, 0, "markov_bound").value;
  const double mse_z = find_row(rows, "amm", "amm", 0, 0, "mse_z").value;
  out.require(max_z <= 4.0, fmt("AMM unbiasedness max |z| %.2f > 4", max_z));
  out.require(exceed <= bound + 3 * std::max(exceed_se, std::sqrt(bound * (1 - bound) / double(cfg.replications))),
              fmt("Markov exceedance %.3f above bound %.3f", exceed, bound));
  out.require(std::abs(mse_z) <= 4.0, fmt("AMM mean squared error |z| %.2f against the exact variance", mse_z));
  out.note(fmt("amm: unbiased max |z| %.2f, Markov exceedance %.3f vs bound %.3f", max_z, exceed, bound));
  out.summary = std::to_string(cfg.replications) + " seeds, all coverage rates and AMM checks evaluated";
  return out;
}

Outcome criterion8() {
  Outcome out;
  ExperimentConfig cfg = default_config(ExperimentKind::Centering);
  cfg.workers = 0;
  const auto rows = run_experiment(cfg);
  double zs[2];
  const char* psis[2] = {"psi=identity", "psi=random_diagonal"};
  for (int p = 0; p < 2; ++p) {
    zs[p] = find_row(rows, "centering", "", 0, 0, "max_abs_z", psis[p]).value;
    out.require(zs[p] <= 4.0, std::string(psis[p]) + fmt(": max |z| %.2f > 4", zs[p]));
  }
  const double gap = find_row(rows, "centering", "", 0, 0, "closed_form_gap", "psi=2I").value;
  out.require(gap <= 1e-12, fmt("closed form gap %.3g", gap));
  out.summary = std::to_string(cfg.replications) + fmt(" draws, max |z| %.2f (identity), %.2f (random diagonal), ", zs[0], zs[1]) +
                fmt("closed-form gap %.1e", gap);
  return out;
}

Outcome criterion9() {
  Outcome out;
  ExperimentConfig cfg = default_config(ExperimentKind::RankFailure);
  cfg.replications = kPaperReplications;
  cfg.workers = 0;
  const auto rows = run_experiment(cfg);
  const double rs500 = find_row(rows, "singular_fraction", "rs1", 500, 0, "singular_fraction").value;
  const double rs1000 = find_row(rows, "singular_fraction", "rs1", 1000, 0, "singular_fraction").value;
  const double cs500 = find_row(rows, "singular_fraction", "cs", 500, 0, "singular_fraction").value;
  out.require(std::abs(rs500 - 0.25) <= 0.07, fmt("rs1 m=500: %.3f vs 0.25", rs500));
  out.require(std::abs(rs1000 - 0.076) <= 0.05, fmt("rs1 m=1000: %.3f vs 0.076", rs1000));
  out.require(cs500 < 0.02, fmt("cs m=500: %.3f", cs500));
  out.summary = std::to_string(cfg.replications) +
                fmt(" replications, rs1 m=500 %.3f (0.25 +/- 0.07), m=1000 %.3f (0.076 +/- 0.05), ", rs500, rs1000) +
                fmt("cs m=500 %.3f (< 0.02)", cs500);
  return out;
}

Outcome criterion10() {
  Outcome out;
  std::vector<ExperimentConfig> configs;
  {
    ExperimentConfig c = default_config(ExperimentKind::Table1);
    c.replications = 4;
    configs.push_back(c);
  }
  {
    ExperimentConfig c = default_config(ExperimentKind::Table3);
    c.n = 100000;
    c.replications = 6;
    configs.push_back(c);
  }
  configs.push_back(default_config(ExperimentKind::Table4));
  {
    ExperimentConfig c = default_config(ExperimentKind::BoundSuite);
    c.replications = 12;
    configs.push_back(c);
  }
  {
    ExperimentConfig c = default_config(ExperimentKind::Centering);
    c.replications = 300;
    configs.push_back(c);
  }
  {
    ExperimentConfig c = default_config(ExperimentKind::RankFailure);
    c.replications = 30;
    configs.push_back(c);
  }
  for (ExperimentConfig cfg : configs) {
    const std::string name(to_string(cfg.experiment));
    std::vector<std::string> outputs;
    for (unsigned workers : {1u, 3u, 3u}) {
      cfg.workers = workers;
      const auto rows = run_experiment(cfg);
      outputs.push_back(report_csv(rows) + report_markdown(rows));
    }
    out.require(outputs[0] == outputs[1], name + ": 1 and 3 workers differ");
    out.require(outputs[1] == outputs[2], name + ": repeated 3-worker runs differ");
    out.note(name + ": " + std::to_string(outputs[0].size()) + " report bytes identical across runs");
  }
  out.summary = std::to_string(configs.size()) + " experiments, reports byte-identical for 1, 3 and 3 workers";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <criterion 1-10>\n", argv[0]);
    return 2;
  }
  const int which = std::atoi(argv[1]);
  const std::map<int, std::function<Outcome()>> table = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}};
  const auto it = table.find(which);
  if (it == table.end()) {
    std::fprintf(stderr, "criterion must be between 1 and 10\n");
    return 2;
  }
  Outcome out;
  try {
    out = it->second();
  } catch (const std::exception& e) {
    out.pass = false;
    out.summary = std::string("error: ") + e.what();
  }
  std::printf("criterion %d %s: %s\n", which, out.pass ? "PASS" : "FAIL", out.summary.c_str());
  for (const auto& d : out.details) std::printf("  %s\n", d.c_str());
  return out.pass ? 0 : 1;
}
