#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sketchreg/matrix.hpp"

namespace sketchreg {

/// Shortest representation that reads back to the same double.
std::string format_double(double v);
/// Strict parse of a whole field; throws NonNumeric naming the location.
double parse_number(std::string_view field, std::size_t row, std::size_t col);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Comma-separated, header row required, no quoting. Lines starting with '#' are skipped.
CsvTable read_csv_table(const std::string& path);
CsvTable parse_csv_table(std::string_view text);
void write_text_file(const std::string& path, std::string_view text);

struct Dataset {
  std::vector<double> y;
  DenseMatrix X;
  std::vector<std::string> feature_names;  ///< includes "intercept" when requested
};

/// Reads y and the listed features (all non-target columns when empty). Missing cells
/// ("", NA, NaN) raise ParseError listing the offending data rows.
Dataset ingest_csv(const std::string& path, const std::string& target_column,
                   const std::vector<std::string>& feature_columns, bool intercept);
Dataset ingest_csv_text(std::string_view text, const std::string& target_column,
                        const std::vector<std::string>& feature_columns, bool intercept);

/// Writes a matrix with a header row.
std::string matrix_to_csv(const std::vector<std::string>& header, const DenseMatrix& m);

}  // namespace sketchreg
