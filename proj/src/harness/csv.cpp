#include "sketchreg/harness/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sketchreg/error.hpp"

namespace sketchreg {

namespace {

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
    out.emplace_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool is_missing(std::string_view cell) {
  std::string lower(cell);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return lower.empty() || lower == "na" || lower == "nan" || lower == "null";
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view field, std::size_t row, std::size_t col) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (field.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
    throw Error(ErrorKind::NonNumeric, "row " + std::to_string(row) + ", column " + std::to_string(col) +
                                           ": '" + std::string(field) + "' is not a finite number");
  }
  return v;
}

CsvTable parse_csv_table(std::string_view text) {
  CsvTable t;
  std::size_t pos = 0;
  bool have_header = false;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto cells = split(line);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                             " fields, header has " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (!have_header) throw Error(ErrorKind::EmptyInput, "no header row");
  return t;
}

CsvTable read_csv_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv_table(ss.str());
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path + "'");
}

Dataset ingest_csv_text(std::string_view text, const std::string& target_column,
                        const std::vector<std::string>& feature_columns, bool intercept) {
  const CsvTable t = parse_csv_table(text);
  if (t.rows.empty()) throw Error(ErrorKind::EmptyInput, "no data rows");
  auto find = [&](const std::string& name) {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) throw Error(ErrorKind::ParseError, "column '" + name + "' not in header");
    return static_cast<std::size_t>(it - t.header.begin());
  };
  const std::size_t ycol = find(target_column);
  std::vector<std::size_t> xcols;
  std::vector<std::string> names;
  if (intercept) names.emplace_back("intercept");
  if (feature_columns.empty()) {
    for (std::size_t c = 0; c < t.header.size(); ++c)
      if (c != ycol) {
        xcols.push_back(c);
        names.push_back(t.header[c]);
      }
  } else {
    for (const auto& f : feature_columns) {
      xcols.push_back(find(f));
      names.push_back(f);
    }
  }

  std::vector<std::size_t> missing_rows;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    bool miss = is_missing(t.rows[r][ycol]);
    for (std::size_t c : xcols) miss = miss || is_missing(t.rows[r][c]);
    if (miss) missing_rows.push_back(r + 1);
  }
  if (!missing_rows.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing_rows.size() && i < 20; ++i) list += (i ? "," : "") + std::to_string(missing_rows[i]);
    if (missing_rows.size() > 20) list += ",...";
    throw Error(ErrorKind::ParseError, "missing values in data row(s) " + list);
  }

  const std::size_t n = t.rows.size();
  const std::size_t K = xcols.size() + (intercept ? 1 : 0);
  Dataset d;
  d.y.resize(n);
  std::vector<double> flat(n * K);
  for (std::size_t r = 0; r < n; ++r) {
    d.y[r] = parse_number(t.rows[r][ycol], r + 1, ycol + 1);
    std::size_t k = 0;
    if (intercept) flat[r * K + k++] = 1.0;
    for (std::size_t c : xcols) flat[r * K + k++] = parse_number(t.rows[r][c], r + 1, c + 1);
  }
  d.X = DenseMatrix(n, K, std::move(flat));
  d.feature_names = std::move(names);
  return d;
}

Dataset ingest_csv(const std::string& path, const std::string& target_column,
                   const std::vector<std::string>& feature_columns, bool intercept) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ingest_csv_text(ss.str(), target_column, feature_columns, intercept);
}

std::string matrix_to_csv(const std::vector<std::string>& header, const DenseMatrix& m) {
  if (header.size() != m.cols()) throw Error(ErrorKind::DimMismatch, "header width differs from matrix");
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
  out += '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

}  // namespace sketchreg
