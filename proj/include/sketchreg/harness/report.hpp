#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sketchreg {

/// One reported number. `panel` groups rows into one displayed table and `param` carries
/// any extra row qualifier (for example "gamma=0.5;sigma_e=1").
struct ReportRow {
  std::string experiment;
  std::string panel;
  std::string scheme;
  std::size_t m = 0;
  std::size_t J = 0;
  std::string param;
  std::string metric;
  double value = 0.0;
  double mc_stderr = 0.0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;

  bool operator==(const ReportRow&) const = default;
};

enum class ReportFormat { Csv, Markdown };
ReportFormat parse_report_format(std::string_view text);

/// Fixed column order; doubles in shortest round-trip form so parsing restores them exactly.
std::string report_csv(const std::vector<ReportRow>& rows);
std::vector<ReportRow> parse_report_csv(std::string_view text);

/// One table per (experiment, panel). Rows are keyed by (m, J, param) and columns by scheme;
/// a panel holding a single scheme uses the metric names as columns instead.
std::string report_markdown(const std::vector<ReportRow>& rows, int decimals = 3);

/// Writes the rows to `path`. Throws EmptyInput for no rows and IoError on write failure.
void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::string& path);

/// First row matching every non-empty key; throws DomainError when absent.
const ReportRow& find_row(const std::vector<ReportRow>& rows, std::string_view panel, std::string_view scheme,
                          std::size_t m, std::size_t J, std::string_view metric, std::string_view param = {});

}  // namespace sketchreg
