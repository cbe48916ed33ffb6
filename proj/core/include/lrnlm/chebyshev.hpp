#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lrnlm/dense_matrix.hpp"
#include "lrnlm/error.hpp"
#include "lrnlm/filters.hpp"

namespace lrnlm {

/// Truncated Chebyshev series sum_{j=0}^{N} alpha_j T_j(2x - 1) of a function
/// on [0, 1]. alpha_0 is stored already halved, i.e. alpha_0 = <f, T_0>/2 and
/// alpha_j = <f, T_j> for j >= 1, so the series is a plain sum.
class ChebyshevExpansion {
 public:
  /// Throws InvalidParameter for an empty or non-finite coefficient list.
  explicit ChebyshevExpansion(std::vector<double> coeffs, std::string source = {});

  std::size_t degree() const { return coeffs_.size() - 1; }
  std::span<const double> coeffs() const { return coeffs_; }
  const std::string& source() const { return source_; }

 private:
  std::vector<double> coeffs_;
  std::string source_;
};

/// Coefficients of f on [0, 1] through the substitution x = (y + 1) / 2 and
/// (N+1)-point Gauss-Chebyshev quadrature:
///   <g, T_j> = 2/(N+1) * sum_k g(y_k) T_j(y_k),  y_k = cos(pi (k - 1/2) / (N+1)).
/// Throws InvalidParameter for N < 1 and EvaluationError when f is not
/// finite at a node.
ChebyshevExpansion cheb_coefficients(const ScalarFilter& f, std::size_t degree,
                                     std::string source = {});

/// Scalar Clenshaw evaluation at x in [0, 1]; DomainError outside.
double cheb_eval_scalar(const ChebyshevExpansion& expansion, double x);

/// S_N(f, A) y = sum_j alpha_j T_j(2A - I) y via the matrix Clenshaw
/// recurrence, using only products with A:
///
///   b_{N+1} = b_{N+2} = 0
///   b_j = alpha_j y + 2 T b_{j+1} - b_{j+2},   j = N, ..., 1,   T = 2A - I
///   result = alpha_0 y + T b_1 - b_2
///
/// The textbook form keeps the unhalved <f, T_0> and finishes with
/// "+ 0.5 c_0 y"; with alpha_0 stored halved the final term is alpha_0 y.
/// Costs N products with A.
template <LinearOperator Op>
std::vector<double> clenshaw_matvec(const Op& op, const ChebyshevExpansion& expansion,
                                    std::span<const double> y) {
  const std::size_t n = op.dim();
  if (y.size() != n) throw DimensionMismatch("clenshaw_matvec: vector length does not match operator");
  const auto a = expansion.coeffs();
  const std::size_t degree = expansion.degree();
  std::vector<double> b1(n, 0.0), b2(n, 0.0), av(n);

  // av = A b; returns T b = 2 A b - b into `out`.
  auto apply_shifted = [&](const std::vector<double>& b, std::vector<double>& out) {
    op.apply(b, av);
    for (std::size_t i = 0; i < n; ++i) out[i] = 2.0 * av[i] - b[i];
  };

  std::vector<double> tb(n);
  for (std::size_t j = degree; j >= 1; --j) {
    apply_shifted(b1, tb);
    for (std::size_t i = 0; i < n; ++i) {
      const double next = a[j] * y[i] + 2.0 * tb[i] - b2[i];
      b2[i] = b1[i];
      b1[i] = next;
    }
  }
  std::vector<double> out(n);
  if (degree == 0) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[0] * y[i];
    return out;
  }
  apply_shifted(b1, tb);
  for (std::size_t i = 0; i < n; ++i) out[i] = a[0] * y[i] + tb[i] - b2[i];
  return out;
}

/// (2 / (pi m)) * deriv_norm / (N - m)^m * kappa: bound on the spectral norm
/// of S_N(f, A) - f(A) for an NLM operator, where deriv_norm is the
/// Chebyshev-weighted L1 norm of f^(m+1) on [-1, 1] and kappa = kappa(D^1/2).
/// Throws InvalidParameter unless N > m >= 1, deriv_norm >= 0, kappa >= 1.
double theorem2_bound(double deriv_norm, int m, std::size_t degree, double kappa);

/// Frobenius-norm variant: the spectral bound times sqrt(n), with kappa_F.
double theorem2_bound_frobenius(double deriv_norm, int m, std::size_t degree, double kappa_f,
                                std::size_t n);

/// Numerical int_{-1}^{1} |g''(t)| / sqrt(1 - t^2) dt for g(t) = f((t + 1)/2),
/// by the midpoint rule in theta (t = cos theta) on `nodes` points with
/// central second differences of step `step`. Stencils are shifted inward so
/// f is only evaluated on [0, 1].
double second_derivative_cheb_norm(const ScalarFilter& f, int nodes = 10000, double step = 1e-4);

/// CSV "index,coefficient", 17 significant digits so a reload is exact.
void write_expansion_csv(const ChebyshevExpansion& expansion, std::ostream& out);
ChebyshevExpansion read_expansion_csv(std::istream& in);

}  // namespace lrnlm
