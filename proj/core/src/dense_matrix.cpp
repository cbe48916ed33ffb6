#include "lrnlm/dense_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "lrnlm/error.hpp"

namespace lrnlm {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& values) {
  const std::size_t rows = values.size();
  const std::size_t cols = rows ? values.front().size() : 0;
  DenseMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (values[i].size() != cols) throw InvalidParameter("ragged matrix rows");
    std::copy(values[i].begin(), values[i].end(), m.row(i).begin());
  }
  return m;
}

double DenseMatrix::max_asymmetry() const {
  if (rows_ != cols_) throw InvalidParameter("asymmetry of a non-square matrix");
  double worst = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = i + 1; j < cols_; ++j) {
      worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
    }
  }
  return worst;
}

MatrixOperator::MatrixOperator(DenseMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw InvalidParameter("operator matrix must be square");
}

void MatrixOperator::apply(std::span<const double> in, std::span<double> out) const {
  if (in.size() != dim() || out.size() != dim()) {
    throw DimensionMismatch("matrix operator: vector length does not match dimension");
  }
  const auto n = static_cast<std::ptrdiff_t>(dim());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto r = m_.row(static_cast<std::size_t>(i));
    double acc = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * in[j];
    out[static_cast<std::size_t>(i)] = acc;
  }
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace lrnlm
