#pragma once

#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

namespace lrnlm {

/// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);
  /// Throws InvalidParameter when `values` is ragged.
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// max |M_ij - M_ji|; requires a square matrix.
  double max_asymmetry() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Anything that can multiply a length-dim() vector. `apply` writes into
/// `out`, which never aliases `in`.
template <class Op>
concept LinearOperator = requires(const Op& op, std::span<const double> in, std::span<double> out) {
  { op.dim() } -> std::convertible_to<std::size_t>;
  op.apply(in, out);
};

/// Square dense matrix exposed as a LinearOperator. Row sums are taken in
/// index order, so results do not depend on threading.
class MatrixOperator {
 public:
  /// Throws InvalidParameter for a non-square matrix.
  explicit MatrixOperator(DenseMatrix m);
  std::size_t dim() const { return m_.rows(); }
  void apply(std::span<const double> in, std::span<double> out) const;
  const DenseMatrix& matrix() const { return m_; }

 private:
  DenseMatrix m_;
};

double max_abs(std::span<const double> v);
double norm2(std::span<const double> v);

}  // namespace lrnlm
