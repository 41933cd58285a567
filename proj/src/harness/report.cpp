#include "sketchreg/harness/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>
#include <utility>

#include "sketchreg/error.hpp"
#include "sketchreg/harness/csv.hpp"

namespace sketchreg {

namespace {

const char* const kHeader = "experiment,panel,scheme,m,J,param,metric,value,mc_stderr,replications,seed";

void check_field(const std::string& s) {
  if (s.find_first_of(",\n\r") != std::string::npos) {
    throw Error(ErrorKind::DomainError, "report field '" + s + "' contains a separator");
  }
}

std::size_t parse_count(const std::string& s, std::size_t row) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (s.empty() || pos != s.size()) throw Error(ErrorKind::NonNumeric, "row " + std::to_string(row) + ": bad integer '" + s + "'");
  return static_cast<std::size_t>(v);
}

template <class Key>
std::size_t index_of(std::vector<Key>& keys, const Key& k) {
  const auto it = std::find(keys.begin(), keys.end(), k);
  if (it != keys.end()) return static_cast<std::size_t>(it - keys.begin());
  keys.push_back(k);
  return keys.size() - 1;
}

std::string fixed(double v, int decimals) {
  if (std::isnan(v)) return "";
  char buf[64];
  if (std::abs(v) >= 1e6 || (v == std::floor(v) && std::abs(v) >= 100)) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else if (v != 0.0 && std::abs(v) < 0.5 * std::pow(10.0, -decimals + 1)) {
    std::snprintf(buf, sizeof buf, "%.3g", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  }
  return buf;
}

}  // namespace

ReportFormat parse_report_format(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "csv") return ReportFormat::Csv;
  if (t == "md" || t == "markdown") return ReportFormat::Markdown;
  throw Error(ErrorKind::ConfigError, "unknown report format '" + std::string(text) + "'");
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out = kHeader;
  out += '\n';
  for (const auto& r : rows) {
    check_field(r.experiment);
    check_field(r.panel);
    check_field(r.scheme);
    check_field(r.param);
    check_field(r.metric);
    out += r.experiment + ',' + r.panel + ',' + r.scheme + ',' + std::to_string(r.m) + ',' + std::to_string(r.J) + ',' +
           r.param + ',' + r.metric + ',' + format_double(r.value) + ',' + format_double(r.mc_stderr) + ',' +
           std::to_string(r.replications) + ',' + std::to_string(r.seed) + '\n';
  }
  return out;
}

std::vector<ReportRow> parse_report_csv(std::string_view text) {
  const CsvTable t = parse_csv_table(text);
  std::string header;
  for (std::size_t i = 0; i < t.header.size(); ++i) header += (i ? "," : "") + t.header[i];
  if (header != kHeader) throw Error(ErrorKind::ParseError, "unexpected report header '" + header + "'");
  std::vector<ReportRow> rows;
  rows.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& c = t.rows[i];
    ReportRow r;
    r.experiment = c[0];
    r.panel = c[1];
    r.scheme = c[2];
    r.m = parse_count(c[3], i + 1);
    r.J = parse_count(c[4], i + 1);
    r.param = c[5];
    r.metric = c[6];
    r.value = parse_number(c[7], i + 1, 8);
    r.mc_stderr = parse_number(c[8], i + 1, 9);
    r.replications = parse_count(c[9], i + 1);
    r.seed = parse_count(c[10], i + 1);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string report_markdown(const std::vector<ReportRow>& rows, int decimals) {
  using PanelKey = std::pair<std::string, std::string>;
  std::vector<PanelKey> panels;
  std::map<std::size_t, std::vector<const ReportRow*>> by_panel;
  for (const auto& r : rows) by_panel[index_of(panels, PanelKey{r.experiment, r.panel})].push_back(&r);

  std::string out;
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& members = by_panel[p];
    std::vector<std::string> schemes;
    for (const auto* r : members) index_of(schemes, r->scheme);
    const bool by_metric = schemes.size() == 1;

    using RowKey = std::tuple<std::size_t, std::size_t, std::string>;
    std::vector<RowKey> row_keys;
    std::vector<std::string> col_keys;
    std::map<std::pair<std::size_t, std::size_t>, double> cells;
    bool any_m = false, any_j = false, any_param = false;
    for (const auto* r : members) {
      const std::size_t ri = index_of(row_keys, RowKey{r->m, r->J, r->param});
      const std::size_t ci = index_of(col_keys, by_metric ? r->metric : r->scheme);
      cells[{ri, ci}] = r->value;
      any_m = any_m || r->m != 0;
      any_j = any_j || r->J != 0;
      any_param = any_param || !r->param.empty();
    }

    out += "### " + panels[p].first + (panels[p].second.empty() ? "" : " / " + panels[p].second);
    if (by_metric) out += " (" + schemes.front() + ")";
    else if (!members.empty()) out += " (" + members.front()->metric + ")";
    out += "\n\n|";
    std::string rule = "|";
    if (any_m) out += " m |", rule += "---:|";
    if (any_j) out += " J |", rule += "---:|";
    if (any_param) out += " param |", rule += "---|";
    for (const auto& c : col_keys) out += " " + c + " |", rule += "---:|";
    out += "\n" + rule + "\n";
    for (std::size_t ri = 0; ri < row_keys.size(); ++ri) {
      const auto& [m, J, param] = row_keys[ri];
      out += "|";
      if (any_m) out += " " + std::to_string(m) + " |";
      if (any_j) out += " " + std::to_string(J) + " |";
      if (any_param) out += " " + param + " |";
      for (std::size_t ci = 0; ci < col_keys.size(); ++ci) {
        const auto it = cells.find({ri, ci});
        out += " " + (it == cells.end() ? std::string() : fixed(it->second, decimals)) + " |";
      }
      out += "\n";
    }
    out += "\n";
  }
  return out;
}

void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::string& path) {
  if (rows.empty()) throw Error(ErrorKind::EmptyInput, "no report rows to emit");
  write_text_file(path, format == ReportFormat::Csv ? report_csv(rows) : report_markdown(rows));
}

const ReportRow& find_row(const std::vector<ReportRow>& rows, std::string_view panel, std::string_view scheme,
                          std::size_t m, std::size_t J, std::string_view metric, std::string_view param) {
  for (const auto& r : rows) {
    if ((panel.empty() || r.panel == panel) && (scheme.empty() || r.scheme == scheme) && (m == 0 || r.m == m) &&
        (J == 0 || r.J == J) && (metric.empty() || r.metric == metric) && (param.empty() || r.param == param)) {
      return r;
    }
  }
  throw Error(ErrorKind::DomainError, "no report row for panel=" + std::string(panel) + " scheme=" + std::string(scheme) +
                                          " m=" + std::to_string(m) + " J=" + std::to_string(J) +
                                          " metric=" + std::string(metric) + " param=" + std::string(param));
}

}  // namespace sketchreg
