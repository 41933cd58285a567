#include "sketchreg/harness/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sketchreg/embedding.hpp"
#include "sketchreg/error.hpp"
#include "sketchreg/harness/csv.hpp"
#include "sketchreg/pooling.hpp"
#include "sketchreg/sketch_size.hpp"

namespace sketchreg {

namespace {

std::string lower(std::string_view s) {
  std::string t(s);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return t;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const std::size_t comma = v.find(',', start);
    const auto item = trim(v.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorKind::ConfigError, "bad value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

template <class T>
T parse_integer(std::string_view key, std::string_view value) {
  T v{};
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) bad_value(key, value);
  return v;
}

double parse_real(std::string_view key, std::string_view value) {
  double v = 0.0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size() || !std::isfinite(v)) bad_value(key, value);
  return v;
}

std::size_t parse_size(std::string_view key, std::string_view value) {
  // Accepts integral scientific notation such as 1e6.
  if (value.find_first_of("eE.") != std::string_view::npos) {
    const double d = parse_real(key, value);
    if (d < 0 || d != std::floor(d) || d > 1e15) bad_value(key, value);
    return static_cast<std::size_t>(d);
  }
  return parse_integer<std::size_t>(key, value);
}

bool parse_bool(std::string_view key, std::string_view value) {
  const std::string v = lower(value);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  bad_value(key, value);
}

std::vector<ReportRow> run_regress(const ExperimentConfig& cfg);
std::vector<ReportRow> run_pool(const ExperimentConfig& cfg);
std::vector<ReportRow> run_size(const ExperimentConfig& cfg);

}  // namespace

std::string_view to_string(ExperimentKind k) noexcept {
  switch (k) {
    case ExperimentKind::Table1: return "table1";
    case ExperimentKind::Table3: return "table3";
    case ExperimentKind::Table4: return "table4";
    case ExperimentKind::BoundSuite: return "bound_suite";
    case ExperimentKind::Centering: return "centering";
    case ExperimentKind::RankFailure: return "rank_failure";
    case ExperimentKind::Regress: return "regress";
    case ExperimentKind::Pool: return "pool";
    case ExperimentKind::Size: return "size";
  }
  return "table1";
}

ExperimentKind parse_experiment(std::string_view text) {
  const std::string t = lower(trim(text));
  for (auto k : {ExperimentKind::Table1, ExperimentKind::Table3, ExperimentKind::Table4, ExperimentKind::BoundSuite,
                 ExperimentKind::Centering, ExperimentKind::RankFailure, ExperimentKind::Regress, ExperimentKind::Pool,
                 ExperimentKind::Size}) {
    if (t == to_string(k)) return k;
  }
  if (t == "boundsuite" || t == "verify") return ExperimentKind::BoundSuite;
  if (t == "rankfailure") return ExperimentKind::RankFailure;
  throw Error(ErrorKind::ConfigError, "unknown experiment '" + std::string(text) + "'");
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::Table1:
      c.n = 20'000;
      c.K = 5;
      c.epsilon = 0.1;
      c.m_grid = table1_m_grid(c.K, c.epsilon);
      c.schemes = {SchemeId::RS1, SchemeId::RS2, SchemeId::RS3, SchemeId::RP1, SchemeId::RP2,
                   SchemeId::RP3, SchemeId::RP4, SchemeId::CS,  SchemeId::RS4};
      c.dgps = {DgpKind::NormalX, DgpKind::ExponentialX};
      break;
    case ExperimentKind::Table3:
      c.n = 1'000'000;
      c.K = 3;
      c.k_grid = {3, 9};
      c.m_grid = {500, 1000, 2000, 5000};
      c.J_grid = {1, 5, 10};
      c.schemes = {SchemeId::RS1, SchemeId::CS};
      c.replications = 500;
      c.dgps = {DgpKind::PearsonX};
      c.sigma_e = {1.0};
      c.beta_true = 1.0;
      c.effect = {0.02};
      break;
    case ExperimentKind::Table4:
      c.n = 10'000'000;
      c.K = 10;
      c.m0 = 1000;
      c.schemes = {SchemeId::RS1};
      c.replications = 1;
      c.sigma_e = {0.5, 1.0, 3.0};
      c.gamma = {0.5, 0.8, 0.9};
      c.effect = {0.005, 0.01, 0.015, 0.02, 0.025};
      break;
    case ExperimentKind::BoundSuite:
      c.n = 20'000;
      c.K = 4;
      c.m_grid = {1000};
      c.J_grid = {5};
      c.schemes = {SchemeId::RS1};
      c.dgps = {DgpKind::PearsonX};
      c.epsilon = 0.2;
      break;
    case ExperimentKind::Centering:
      c.n = 64;
      c.K = 3;
      c.m_grid = {8};
      c.schemes = {SchemeId::CS};
      c.replications = 5000;
      break;
    case ExperimentKind::RankFailure:
      c.n = 100'000;
      c.K = 4;
      c.m_grid = {200, 500, 1000, 2000};
      c.schemes = {SchemeId::RS1, SchemeId::CS};
      c.dgps = {DgpKind::RareDummy};
      break;
    case ExperimentKind::Regress:
    case ExperimentKind::Pool:
      c.m_grid = {1000};
      c.J_grid = {kind == ExperimentKind::Pool ? std::size_t{5} : std::size_t{1}};
      c.schemes = {SchemeId::RS1};
      c.replications = 1;
      break;
    case ExperimentKind::Size:
      c.n = 10'000'000;
      c.K = 10;
      c.replications = 1;
      c.gamma = {0.5, 0.8, 0.9};
      break;
  }
  return c;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key_in, std::string_view value_in) {
  const std::string key = lower(trim(key_in));
  const std::string_view value = trim(value_in);
  auto sizes = [&] {
    std::vector<std::size_t> out;
    for (auto item : split_list(value)) out.push_back(parse_size(key, item));
    if (out.empty()) bad_value(key, value);
    return out;
  };
  auto reals = [&] {
    std::vector<double> out;
    for (auto item : split_list(value)) out.push_back(parse_real(key, item));
    if (out.empty()) bad_value(key, value);
    return out;
  };
  if (key == "experiment") cfg.experiment = parse_experiment(value);
  else if (key == "n") cfg.n = parse_size(key, value);
  else if (key == "k") cfg.K = parse_size(key, value);
  else if (key == "k_grid") cfg.k_grid = sizes();
  else if (key == "m" || key == "m_grid") cfg.m_grid = sizes();
  else if (key == "j" || key == "j_grid") cfg.J_grid = sizes();
  else if (key == "scheme" || key == "schemes") {
    cfg.schemes.clear();
    for (auto item : split_list(value)) {
      try {
        cfg.schemes.push_back(parse_scheme(item));
      } catch (const Error&) {
        bad_value(key, item);
      }
    }
    if (cfg.schemes.empty()) bad_value(key, value);
  } else if (key == "replications" || key == "reps") cfg.replications = parse_size(key, value);
  else if (key == "master_seed" || key == "seed") cfg.master_seed = parse_integer<std::uint64_t>(key, value);
  else if (key == "dgp" || key == "dgps") {
    cfg.dgps.clear();
    for (auto item : split_list(value)) cfg.dgps.push_back(parse_dgp(item));
    if (cfg.dgps.empty()) bad_value(key, value);
  } else if (key == "sigma_e") cfg.sigma_e = reals();
  else if (key == "beta_true") cfg.beta_true = parse_real(key, value);
  else if (key == "alpha") cfg.alpha = parse_real(key, value);
  else if (key == "gamma") cfg.gamma = reals();
  else if (key == "effect") cfg.effect = reals();
  else if (key == "epsilon") cfg.epsilon = parse_real(key, value);
  else if (key == "delta") cfg.delta = parse_real(key, value);
  else if (key == "r" || key == "r_grid") cfg.r_grid = reals();
  else if (key == "tau2") cfg.tau2 = reals();
  else if (key == "m0") cfg.m0 = parse_size(key, value);
  else if (key == "input" || key == "input_path") cfg.input_path = std::string(value);
  else if (key == "target") cfg.target = std::string(value);
  else if (key == "features") {
    cfg.features.clear();
    for (auto item : split_list(value)) cfg.features.emplace_back(item);
  } else if (key == "intercept") cfg.intercept = parse_bool(key, value);
  else if (key == "variance") {
    try {
      cfg.variance = parse_variance_mode(value);
    } catch (const Error&) {
      bad_value(key, value);
    }
  } else if (key == "output_dir" || key == "out") cfg.output_dir = std::string(value);
  else if (key == "workers") cfg.workers = parse_integer<unsigned>(key, value);
  else throw Error(ErrorKind::ConfigError, "unknown config key '" + std::string(key_in) + "'");
}

ExperimentConfig parse_config(std::string_view text, const ExperimentConfig& base) {
  ExperimentConfig cfg = base;
  std::vector<std::pair<std::string, std::string>> settings;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(line_no) + ": expected key=value");
    }
    settings.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
  }
  for (const auto& [k, v] : settings) {
    if (lower(k) == "experiment") {
      const unsigned workers = cfg.workers;
      cfg = default_config(parse_experiment(v));
      cfg.workers = workers;
    }
  }
  for (const auto& [k, v] : settings)
    if (lower(k) != "experiment") apply_setting(cfg, k, v);
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

void validate(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::ConfigError, what); };
  if (cfg.replications < 1) fail("replications must be at least 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) fail("alpha must lie in (0,1)");
  for (double g : cfg.gamma)
    if (!(g > 0.0 && g < 1.0)) fail("gamma must lie in (0,1)");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) fail("epsilon must lie in (0,1)");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) fail("delta must lie in (0,1)");
  for (double s : cfg.sigma_e)
    if (!(s > 0.0)) fail("sigma_e must be positive");
  const auto kind = cfg.experiment;
  const bool needs_m = kind == ExperimentKind::Table1 || kind == ExperimentKind::Table3 ||
                       kind == ExperimentKind::BoundSuite || kind == ExperimentKind::Centering ||
                       kind == ExperimentKind::RankFailure || kind == ExperimentKind::Pool;
  if (needs_m && cfg.m_grid.empty()) fail("m grid must be non-empty");
  for (std::size_t m : cfg.m_grid)
    if (m == 0) fail("m values must be positive");
  if (cfg.J_grid.empty()) fail("J grid must be non-empty");
  for (std::size_t J : cfg.J_grid)
    if (J == 0) fail("J values must be positive");
  if (kind != ExperimentKind::Size && kind != ExperimentKind::Regress && kind != ExperimentKind::Pool &&
      cfg.schemes.empty()) {
    fail("scheme list must be non-empty");
  }
  if ((kind == ExperimentKind::Regress || kind == ExperimentKind::Pool) && cfg.input_path.empty()) {
    fail("input path is required");
  }
  if (kind == ExperimentKind::Table4 || kind == ExperimentKind::Size) {
    if (cfg.effect.empty() || cfg.gamma.empty()) fail("gamma and effect grids must be non-empty");
    for (double e : cfg.effect)
      if (e == 0.0) fail("effect sizes must be non-zero");
  }
  if (kind == ExperimentKind::Table4 && (cfg.m0 <= cfg.K || cfg.m0 > cfg.n)) fail("m0 must lie in (K, n]");
  if (kind == ExperimentKind::Table1 || kind == ExperimentKind::Table3 || kind == ExperimentKind::RankFailure) {
    if (cfg.dgps.empty()) fail("dgp list must be non-empty");
    for (std::size_t m : cfg.m_grid)
      for (std::size_t J : cfg.J_grid)
        if (kind == ExperimentKind::Table3 ? m * J > cfg.n : m > cfg.n) fail("sketch size exceeds n");
  }
}

std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  switch (cfg.experiment) {
    case ExperimentKind::Table1: return run_table1(cfg);
    case ExperimentKind::Table3: return run_table3(cfg);
    case ExperimentKind::Table4: return run_table4(cfg);
    case ExperimentKind::BoundSuite: return run_bound_suite(cfg);
    case ExperimentKind::Centering: return run_centering(cfg);
    case ExperimentKind::RankFailure: return run_rank_failure(cfg);
    case ExperimentKind::Regress: return run_regress(cfg);
    case ExperimentKind::Pool: return run_pool(cfg);
    case ExperimentKind::Size: return run_size(cfg);
  }
  return {};
}

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe r;
  double sum = 0.0;
  for (double v : values)
    if (!std::isnan(v)) {
      sum += v;
      ++r.count;
    }
  if (r.count == 0) {
    r.mean = std::nan("");
    return r;
  }
  r.mean = sum / static_cast<double>(r.count);
  if (r.count > 1) {
    double ss = 0.0;
    for (double v : values)
      if (!std::isnan(v)) ss += (v - r.mean) * (v - r.mean);
    r.se = std::sqrt(ss / static_cast<double>(r.count - 1) / static_cast<double>(r.count));
  }
  return r;
}

namespace {

ReportRow make_row(const ExperimentConfig& cfg, std::string panel, std::string scheme, std::size_t m, std::size_t J,
                   std::string param, std::string metric, double value, double se = 0.0) {
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

void append_fit_rows(std::vector<ReportRow>& rows, const ExperimentConfig& cfg, const std::string& scheme, std::size_t m,
                     std::size_t J, const std::vector<std::string>& names, const std::vector<double>& beta,
                     const std::vector<double>& se) {
  for (std::size_t k = 0; k < beta.size(); ++k) {
    rows.push_back(make_row(cfg, "coefficients", scheme, m, J, "coef=" + names[k], "estimate", beta[k]));
    rows.push_back(make_row(cfg, "coefficients", scheme, m, J, "coef=" + names[k], "std_error", se[k]));
  }
}

std::vector<ReportRow> run_regress(const ExperimentConfig& cfg) {
  const Dataset d = ingest_csv(cfg.input_path, cfg.target, cfg.features, cfg.intercept);
  std::vector<ReportRow> rows;
  const RegressionFit full = ols(d.y, d.X, cfg.variance);
  append_fit_rows(rows, cfg, "full", d.X.rows(), 1, d.feature_names, full.beta, full.std_errors);
  for (SchemeId s : cfg.schemes)
    for (std::size_t m : cfg.m_grid) {
      const auto op = build_sketch(s, d.X.rows(), m, derive_seed(cfg.master_seed, {static_cast<std::uint64_t>(s), m, 1}),
                                   &d.X);
      const RegressionFit fit = sketched_ols(d.y, d.X, op, cfg.variance);
      append_fit_rows(rows, cfg, std::string(scheme_label(s)), m, 1, d.feature_names, fit.beta, fit.std_errors);
    }
  return rows;
}

std::vector<ReportRow> run_pool(const ExperimentConfig& cfg) {
  const Dataset d = ingest_csv(cfg.input_path, cfg.target, cfg.features, cfg.intercept);
  const std::size_t K = d.X.cols();
  std::vector<ReportRow> rows;
  for (SchemeId s : cfg.schemes)
    for (std::size_t m : cfg.m_grid)
      for (std::size_t J : cfg.J_grid) {
        const auto seed = derive_seed(cfg.master_seed, {static_cast<std::uint64_t>(s), m, J});
        const PooledFit pf = pooled_fit(d.y, d.X, m, J, seed, ContrastVector::unit(K, K - 1), cfg.beta_true,
                                        cfg.variance, s);
        append_fit_rows(rows, cfg, std::string(scheme_label(s)), m, J, d.feature_names, pf.beta_bar, pf.se_beta_bar);
        rows.push_back(make_row(cfg, "pooled", std::string(scheme_label(s)), m, J, "", "t1", t1_statistic(pf)));
        rows.push_back(make_row(cfg, "pooled", std::string(scheme_label(s)), m, J, "", "failures",
                                static_cast<double>(pf.failures)));
      }
  return rows;
}

std::vector<ReportRow> run_size(const ExperimentConfig& cfg) {
  std::vector<ReportRow> rows;
  const double n = static_cast<double>(cfg.n);
  const double K = static_cast<double>(cfg.K);
  for (double r : cfg.r_grid) {
    const auto res = m1_rule(n, K, TailAssumption::moments(r));
    char p[32];
    std::snprintf(p, sizeof p, "r=%g", r);
    rows.push_back(make_row(cfg, "m1", "", 0, 0, p, "m1", static_cast<double>(res.m)));
  }
  rows.push_back(make_row(cfg, "m1", "", 0, 0, "thin_tail", "m1",
                          static_cast<double>(m1_rule(n, K, TailAssumption::thin()).m)));
  for (double g : cfg.gamma)
    for (double t : cfg.tau2) {
      char p[48];
      std::snprintf(p, sizeof p, "gamma=%g;tau2=%g", g, t);
      rows.push_back(make_row(cfg, "m3", "", 0, 0, p, "m3", static_cast<double>(m3_rule(n, t, cfg.alpha, g).m)));
    }
  return rows;
}

}  // namespace

}  // namespace sketchreg
