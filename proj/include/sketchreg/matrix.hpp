#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sketchreg {

/// Row-major dense real matrix. Public constructors reject NaN/Inf.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  /// Zero matrix.
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static DenseMatrix column_vector(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::vector<double> column(std::size_t j) const;

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
/// A'B without forming A'.
DenseMatrix multiply_tn(const DenseMatrix& a, const DenseMatrix& b);
/// A'A.
DenseMatrix gram(const DenseMatrix& a);
std::vector<double> multiply(const DenseMatrix& a, std::span<const double> x);
/// A'x.
std::vector<double> multiply_tn(const DenseMatrix& a, std::span<const double> x);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scale(const DenseMatrix& a, double s);
/// Columns [first, first + count).
DenseMatrix column_block(const DenseMatrix& a, std::size_t first, std::size_t count);
/// [A x] with x appended as a last column.
DenseMatrix append_column(const DenseMatrix& a, std::span<const double> x);
DenseMatrix select_rows(const DenseMatrix& a, std::span<const std::size_t> rows);

double max_abs(const DenseMatrix& a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace sketchreg
