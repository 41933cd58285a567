#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sketchreg/error.hpp"
#include "sketchreg/harness/csv.hpp"
#include "sketchreg/harness/experiment.hpp"
#include "sketchreg/harness/report.hpp"
#include "sketchreg/pooling.hpp"
#include "sketchreg/regression.hpp"
#include "sketchreg/sketch.hpp"
#include "sketchreg/sketch_size.hpp"

namespace {

using namespace sketchreg;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitAllFailed = 4;

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ConfigError:
    case ErrorKind::InvalidDims:
    case ErrorKind::DomainError:
    case ErrorKind::PartitionImpossible:
    case ErrorKind::MissingSource:
      return kExitConfig;
    case ErrorKind::AllSketchesSingular:
      return kExitAllFailed;
    default:
      return kExitData;
  }
}

/// Flags shared by the subcommands; each subcommand registers the subset it uses.
struct Options {
  std::string input;
  std::string out;
  std::string target = "y";
  std::vector<std::string> features;
  bool no_intercept = false;
  std::string scheme = "rs1";
  std::size_t m = 0;
  std::size_t J = 1;
  std::uint64_t seed = 1;
  std::string variance = "homo";
  double epsilon = 0.1;
  double delta = 0.1;
  double alpha = 0.05;
  std::vector<double> gamma{0.5, 0.8, 0.9};
  std::string config;
  unsigned workers = 1;
  bool paper_scale = false;
  std::string experiment = "table1";
  std::string format = "both";
  double beta0 = 0.0;
  int contrast = -1;
  // size
  double n = 0.0;
  double K = 0.0;
  std::vector<double> r{6, 8, 10};
  std::vector<double> effect{0.005, 0.01, 0.015, 0.02, 0.025};
  double var = 0.0;
  double m1 = 0.0;
  std::vector<double> tau2{5.0};
};

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty()) std::cout << text;
  else write_text_file(path, text);
}

CsvTable read_input(const std::string& path) {
  return path == "-" ? parse_csv_table(std::string(std::istreambuf_iterator<char>(std::cin), {}))
                     : read_csv_table(path);
}

int cmd_sketch(const Options& o) {
  const CsvTable t = read_input(o.input);
  if (t.rows.empty()) throw Error(ErrorKind::EmptyInput, "no data rows");
  const std::size_t n = t.rows.size();
  const std::size_t d = t.header.size();
  std::vector<double> flat(n * d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) flat[r * d + c] = parse_number(t.rows[r][c], r + 1, c + 1);
  const DenseMatrix a(n, d, std::move(flat));
  const SchemeId scheme = parse_scheme(o.scheme);
  const auto op = build_sketch(scheme, n, o.m, o.seed, &a);
  write_or_print(o.out, matrix_to_csv(t.header, apply_sketch(op, a)));
  return kExitOk;
}

int cmd_regress(const Options& o) {
  const Dataset d = ingest_csv(o.input, o.target, o.features, !o.no_intercept);
  const VarianceMode mode = parse_variance_mode(o.variance);
  if (o.scheme == "full" || o.m == 0) {
    write_or_print(o.out, serialize_fit(ols(d.y, d.X, mode), d.feature_names, "full", o.seed));
    return kExitOk;
  }
  const SchemeId scheme = parse_scheme(o.scheme);
  const auto op = build_sketch(scheme, d.X.rows(), o.m, o.seed, &d.X);
  write_or_print(o.out, serialize_fit(sketched_ols(d.y, d.X, op, mode), d.feature_names, scheme_label(scheme), o.seed));
  return kExitOk;
}

int cmd_pool(const Options& o) {
  const Dataset d = ingest_csv(o.input, o.target, o.features, !o.no_intercept);
  const VarianceMode mode = parse_variance_mode(o.variance);
  const SchemeId scheme = parse_scheme(o.scheme);
  const std::size_t K = d.X.cols();
  const std::size_t k = o.contrast < 0 ? K - 1 : static_cast<std::size_t>(o.contrast);
  if (k >= K) throw Error(ErrorKind::ConfigError, "contrast index out of range");
  const PooledFit pf = pooled_fit(d.y, d.X, o.m, o.J, o.seed, ContrastVector::unit(K, k), o.beta0, mode, scheme);
  std::string text = "# scheme=" + std::string(scheme_label(scheme)) + " m=" + std::to_string(o.m) +
                     " J=" + std::to_string(pf.J) + " failures=" + std::to_string(pf.failures) +
                     " seed=" + std::to_string(o.seed) + " variance_mode=" + o.variance + "\n";
  text += "coef_name,estimate,std_error\n";
  for (std::size_t i = 0; i < K; ++i)
    text += d.feature_names[i] + "," + format_double(pf.beta_bar[i]) + "," + format_double(pf.se_beta_bar[i]) + "\n";
  text += "# contrast=" + d.feature_names[k] + " beta0=" + format_double(o.beta0) +
          " t1=" + format_double(t1_statistic(pf));
  if (pf.J >= 2 && pf.se_t_bar2 > 0.0) text += " t2=" + format_double(t2_statistic(pf));
  text += "\n";
  write_or_print(o.out, text);
  return kExitOk;
}

int cmd_size(const Options& o) {
  std::string text;
  char buf[128];
  if (o.var > 0.0) {
    // Inference-conscious grid laid out as rows of gamma and columns of effect size.
    if (!(o.m1 > 0.0)) throw Error(ErrorKind::ConfigError, "--m1 is required with --var");
    text += "gamma";
    for (double e : o.effect) {
      std::snprintf(buf, sizeof buf, ",%g", e);
      text += buf;
    }
    text += "\n";
    for (double g : o.gamma) {
      std::snprintf(buf, sizeof buf, "%.2f", g);
      text += buf;
      for (double e : o.effect) {
        const auto res = m2_rule(o.m1, o.var, e, o.alpha, g, o.n);
        std::snprintf(buf, sizeof buf, ",%zu%s", res.m, res.feasible ? "" : "*");
        text += buf;
      }
      text += "\n";
    }
    write_or_print(o.out, text);
    return kExitOk;
  }
  if (!(o.n > 0.0 && o.K > 0.0)) throw Error(ErrorKind::ConfigError, "--n and --K are required");
  text += "rule,parameter,m,m_exact,feasible\n";
  auto line = [&](const char* rule, const std::string& p, const SizeRuleResult& res) {
    std::snprintf(buf, sizeof buf, "%s,%s,%zu,%.4f,%s\n", rule, p.c_str(), res.m, res.m_exact,
                  res.feasible ? "yes" : "no");
    text += buf;
  };
  for (double r : o.r) {
    std::snprintf(buf, sizeof buf, "r=%g", r);
    line("m1", buf, m1_rule(o.n, o.K, TailAssumption::moments(r)));
  }
  line("m1", "thin_tail", m1_rule(o.n, o.K, TailAssumption::thin()));
  for (double g : o.gamma)
    for (double t : o.tau2) {
      std::snprintf(buf, sizeof buf, "gamma=%g;tau2=%g", g, t);
      line("m3", buf, m3_rule(o.n, t, o.alpha, g));
    }
  std::snprintf(buf, sizeof buf, "countsketch,epsilon=%g;delta=%g,%zu,,\n", o.epsilon, o.delta,
                countsketch_m(o.K, o.epsilon, o.delta));
  text += buf;
  write_or_print(o.out, text);
  return kExitOk;
}

ExperimentConfig build_config(const Options& o, const CLI::App& sub, ExperimentKind kind) {
  ExperimentConfig cfg = default_config(kind);
  cfg.workers = o.workers;
  if (o.paper_scale) cfg.replications = std::max(cfg.replications, kPaperReplications);
  if (sub.count("--seed")) cfg.master_seed = o.seed;
  if (sub.count("--epsilon")) cfg.epsilon = o.epsilon;
  if (sub.count("--alpha")) cfg.alpha = o.alpha;
  if (sub.count("--gamma")) cfg.gamma = o.gamma;
  if (sub.count("--variance")) cfg.variance = parse_variance_mode(o.variance);
  if (sub.count("--scheme")) apply_setting(cfg, "schemes", o.scheme);
  if (sub.count("--m")) cfg.m_grid = {o.m};
  if (sub.count("--J")) cfg.J_grid = {o.J};
  if (!o.config.empty()) cfg = load_config(o.config, cfg);
  if (sub.count("--workers")) cfg.workers = o.workers;
  return cfg;
}

bool all_failed(const std::vector<ReportRow>& rows) {
  for (const auto& r : rows)
    if (r.metric != "failures" && !std::isnan(r.value)) return false;
  return true;
}

int run_and_emit(const ExperimentConfig& cfg, const Options& o) {
  const auto rows = run_experiment(cfg);
  if (all_failed(rows)) {
    std::cerr << "sketchreg: every replication failed\n";
    return kExitAllFailed;
  }
  const std::string dir = o.out.empty() ? cfg.output_dir : o.out;
  std::filesystem::create_directories(dir);
  const std::string stem = (std::filesystem::path(dir) / std::string(to_string(cfg.experiment))).string();
  if (o.format == "csv" || o.format == "both") emit_report(rows, ReportFormat::Csv, stem + ".csv");
  if (o.format == "md" || o.format == "markdown" || o.format == "both") emit_report(rows, ReportFormat::Markdown, stem + ".md");
  std::cout << report_markdown(rows);
  return kExitOk;
}

int cmd_mc(const Options& o, const CLI::App& sub) {
  ExperimentConfig base = build_config(o, sub, parse_experiment(o.experiment));
  return run_and_emit(base, o);
}

int cmd_verify(const Options& o, const CLI::App& sub) {
  ExperimentConfig cfg = build_config(o, sub, ExperimentKind::BoundSuite);
  int code = run_and_emit(cfg, o);
  if (code != kExitOk) return code;
  ExperimentConfig centering = default_config(ExperimentKind::Centering);
  centering.workers = cfg.workers;
  centering.master_seed = cfg.master_seed;
  return run_and_emit(centering, o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketching for linear regression: operators, fits, pooling, size rules and experiments"};
  app.require_subcommand(1);
  Options o;

  auto common_data = [&](CLI::App* s) {
    s->add_option("--input,-i", o.input, "Input CSV with a header row")->required();
    s->add_option("--target", o.target, "Response column");
    s->add_option("--features", o.features, "Regressor columns (default: all others)")->delimiter(',');
    s->add_flag("--no-intercept", o.no_intercept, "Do not prepend a column of ones");
    s->add_option("--variance", o.variance, "homo or sandwich");
  };

  auto* sketch = app.add_subcommand("sketch", "Apply a sketch to every column of a CSV");
  sketch->add_option("--input,-i", o.input, "Input CSV, or - for stdin")->required();
  sketch->add_option("--scheme", o.scheme, "rs1 rs2 rs3 lev rp1 rp2 rp3 rp4 cs");
  sketch->add_option("--m", o.m, "Sketch size")->required();
  sketch->add_option("--seed", o.seed, "Operator seed");
  sketch->add_option("--out,-o", o.out, "Output CSV (default stdout)");

  auto* regress = app.add_subcommand("regress", "Full-sample or sketched OLS");
  common_data(regress);
  regress->add_option("--scheme", o.scheme, "Sketch scheme, or full");
  regress->add_option("--m", o.m, "Sketch size (0 fits the full sample)");
  regress->add_option("--seed", o.seed, "Operator seed");
  regress->add_option("--out,-o", o.out, "Output CSV (default stdout)");

  auto* pool = app.add_subcommand("pool", "Pooled fit over J disjoint sketches");
  common_data(pool);
  pool->add_option("--scheme", o.scheme, "Sketch scheme");
  pool->add_option("--m", o.m, "Rows per sketch")->required();
  pool->add_option("--J", o.J, "Number of sketches");
  pool->add_option("--seed", o.seed, "Partition seed");
  pool->add_option("--contrast", o.contrast, "0-based coefficient tested (default: last)");
  pool->add_option("--beta0", o.beta0, "Hypothesised coefficient value");
  pool->add_option("--out,-o", o.out, "Output CSV (default stdout)");

  auto* size = app.add_subcommand("size", "Sketch size rules");
  size->add_option("--n", o.n, "Full sample size");
  size->add_option("--K", o.K, "Number of regressors");
  size->add_option("--r", o.r, "Assumed finite moments")->delimiter(',');
  size->add_option("--alpha", o.alpha, "Test size");
  size->add_option("--gamma", o.gamma, "Target power")->delimiter(',');
  size->add_option("--effect", o.effect, "Effect sizes")->delimiter(',');
  size->add_option("--var", o.var, "Preliminary variance of the contrast estimate");
  size->add_option("--m1", o.m1, "Preliminary sketch size");
  size->add_option("--tau2", o.tau2, "Expected full-sample t statistic")->delimiter(',');
  size->add_option("--epsilon", o.epsilon, "Embedding accuracy for the countsketch rule");
  size->add_option("--delta", o.delta, "Failure probability for the countsketch rule");
  size->add_option("--out,-o", o.out, "Output CSV (default stdout)");

  auto experiment_flags = [&](CLI::App* s) {
    s->add_option("--scheme", o.scheme, "Comma-separated scheme list");
    s->add_option("--m", o.m, "Single sketch size");
    s->add_option("--J", o.J, "Single number of sketches");
    s->add_option("--seed", o.seed, "Master seed");
    s->add_option("--variance", o.variance, "homo or sandwich");
    s->add_option("--epsilon", o.epsilon, "Embedding accuracy");
    s->add_option("--alpha", o.alpha, "Test size");
    s->add_option("--gamma", o.gamma, "Target power")->delimiter(',');
    s->add_option("--config", o.config, "Flat key=value file; its settings override flags");
    s->add_option("--out,-o", o.out, "Output directory");
    s->add_option("--workers", o.workers, "Worker threads (0 = all cores); output does not depend on it");
    s->add_flag("--paper-scale", o.paper_scale, "Use the published replication count");
    s->add_option("--format", o.format, "csv, md or both");
  };
  auto* mc = app.add_subcommand("mc", "Run a Monte Carlo experiment");
  mc->add_option("--experiment,-e", o.experiment,
                 "table1 table3 table4 bound_suite centering rank_failure regress pool size");
  experiment_flags(mc);
  auto* verify = app.add_subcommand("verify", "Run the bound verification suite");
  experiment_flags(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sketch) return cmd_sketch(o);
    if (*regress) return cmd_regress(o);
    if (*pool) return cmd_pool(o);
    if (*size) return cmd_size(o);
    if (*mc) return cmd_mc(o, *mc);
    if (*verify) return cmd_verify(o, *verify);
  } catch (const Error& e) {
    std::cerr << "sketchreg: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "sketchreg: " << e.what() << "\n";
    return kExitData;
  }
  return kExitConfig;
}
