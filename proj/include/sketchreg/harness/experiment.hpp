#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sketchreg/harness/dgp.hpp"
#include "sketchreg/harness/report.hpp"
#include "sketchreg/regression.hpp"
#include "sketchreg/sketch.hpp"

namespace sketchreg {

enum class ExperimentKind { Table1, Table3, Table4, BoundSuite, Centering, RankFailure, Regress, Pool, Size };
std::string_view to_string(ExperimentKind k) noexcept;
ExperimentKind parse_experiment(std::string_view text);

inline constexpr std::size_t kDeskReplications = 200;
inline constexpr std::size_t kPaperReplications = 1000;

/// Everything a run depends on. Seeds follow one contract throughout:
///   replication seed = derive_seed(master_seed, {experiment, panel, replication})
///   cell seed        = derive_seed(replication seed, {scheme, m, J})
/// so each number is a pure function of the configuration and the master seed.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Table1;
  std::size_t n = 20'000;
  std::size_t K = 5;
  std::vector<std::size_t> k_grid;  ///< panels over K (Table 3); empty means {K}
  std::vector<std::size_t> m_grid;
  std::vector<std::size_t> J_grid{1};
  std::vector<SchemeId> schemes;
  std::size_t replications = kDeskReplications;
  std::uint64_t master_seed = 20'200'101;
  std::vector<DgpKind> dgps{DgpKind::NormalX};
  std::vector<double> sigma_e{1.0};
  double beta_true = 1.0;
  double alpha = 0.05;
  std::vector<double> gamma{0.5};
  std::vector<double> effect{0.02};
  double epsilon = 0.1;
  double delta = 0.1;
  std::vector<double> r_grid{6.0, 8.0, 10.0};
  std::vector<double> tau2{5.0};
  std::size_t m0 = 1000;
  std::string input_path;
  std::string target = "y";
  std::vector<std::string> features;
  bool intercept = true;
  VarianceMode variance = VarianceMode::Homoskedastic;
  std::string output_dir = ".";
  unsigned workers = 1;
};

/// Defaults reproducing the published setups at desk scale.
ExperimentConfig default_config(ExperimentKind kind);

/// Applies one key=value setting; throws ConfigError for unknown keys or bad values.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);
/// Flat key=value text, '#' comments. An `experiment` key, when present, resets to that
/// experiment's defaults before the remaining keys apply.
ExperimentConfig parse_config(std::string_view text, const ExperimentConfig& base);
ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base);
/// Throws ConfigError naming the first violated requirement.
void validate(const ExperimentConfig& cfg);

/// Runs the configured experiment. Per-replication failures are counted, never fatal.
std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg);

std::vector<ReportRow> run_table1(const ExperimentConfig& cfg);
std::vector<ReportRow> run_table3(const ExperimentConfig& cfg);
std::vector<ReportRow> run_table4(const ExperimentConfig& cfg);
std::vector<ReportRow> run_bound_suite(const ExperimentConfig& cfg);
std::vector<ReportRow> run_centering(const ExperimentConfig& cfg);
std::vector<ReportRow> run_rank_failure(const ExperimentConfig& cfg);

/// Mean and Monte Carlo standard error of a sample, ignoring NaN entries.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};
MeanSe mean_se(const std::vector<double>& values);

}  // namespace sketchreg
