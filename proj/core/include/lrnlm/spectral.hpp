#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "lrnlm/dense_matrix.hpp"
#include "lrnlm/filters.hpp"
#include "lrnlm/nlm_operator.hpp"

namespace lrnlm {

inline constexpr std::size_t kDefaultOracleCap = 2000;

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
/// Column k of `vectors` is the unit eigenvector of `values[k]`.
struct EigenSystem {
  std::vector<double> values;
  DenseMatrix vectors;
  int sweeps = 0;          ///< Jacobi sweeps performed (0 for the tridiagonal solver)
  bool converged = true;
};

struct JacobiOptions {
  double tolerance = 1e-12;  ///< stop when off(S) < tolerance * ||S||_F
  int max_sweeps = 30;
  std::size_t max_n = kDefaultOracleCap;
};

/// Cyclic Jacobi eigensolver for dense symmetric matrices. Rotations visit
/// (p, q) pairs row by row in a fixed order, so results are reproducible.
/// Ties in the final ordering go to the lower original diagonal index.
/// Stops one sweep after off(S) < tolerance * ||S||_F, or after max_sweeps.
/// Throws ContractViolation when max |S_ij - S_ji| > 1e-12 and CapacityError
/// above options.max_n.
EigenSystem jacobi_eigh(const DenseMatrix& s, const JacobiOptions& options = {});

/// Householder tridiagonalization + implicit QR (Eigen's
/// SelfAdjointEigenSolver) with the same output conventions. Used for
/// operators too large for Jacobi.
EigenSystem tridiagonal_eigh(const DenseMatrix& s);

/// S = D^-1/2 W D^-1/2, the symmetric matrix similar to A = D^-1 W.
DenseMatrix symmetrize(const NlmOperator& op);

enum class EigenSolver {
  kJacobi,
  kTridiagonal,
  kAuto,  ///< Jacobi up to max_n, tridiagonal QR beyond
};

struct DecomposeOptions {
  EigenSolver solver = EigenSolver::kJacobi;
  /// Largest dimension handed to Jacobi. With kJacobi, larger operators are
  /// rejected with CapacityError.
  std::size_t max_n = kDefaultOracleCap;
  JacobiOptions jacobi{};
};

/// A = D^-1/2 O diag(lambda) O^T D^1/2 with O orthogonal.
class SpectralDecomposition {
 public:
  SpectralDecomposition(std::vector<double> eigenvalues, DenseMatrix eigenvectors,
                        std::vector<double> degree_sqrt);

  std::size_t dim() const { return eigenvalues_.size(); }
  std::span<const double> eigenvalues() const { return eigenvalues_; }
  const DenseMatrix& eigenvectors() const { return eigenvectors_; }
  std::span<const double> degree_sqrt() const { return degree_sqrt_; }

  /// D^-1/2 O diag(gains) O^T D^1/2 y. gains[k] multiplies eigenvalue k.
  std::vector<double> apply_spectral(std::span<const double> gains,
                                     std::span<const double> y) const;

 private:
  std::vector<double> eigenvalues_;
  DenseMatrix eigenvectors_;
  std::vector<double> degree_sqrt_;
};

/// symmetrize + eigensolver.
SpectralDecomposition decompose_nlm(const NlmOperator& op, const DecomposeOptions& options = {});

/// Keeps the k leading eigenvalues: D^-1/2 O Lambda_k O^T D^1/2 y.
/// Throws InvalidParameter unless 1 <= k <= n.
std::vector<double> apply_rank_truncated(const SpectralDecomposition& dec, std::size_t k,
                                         std::span<const double> y);

/// Exact f(A) y. Eigenvalues are clamped to [0, 1] before evaluating f; a
/// warning is logged when the clamp moves a value by more than 1e-9.
std::vector<double> apply_filtered_exact(const SpectralDecomposition& dec, const ScalarFilter& f,
                                         std::span<const double> y);

/// NLM operator of a seeded sqrt(n) x sqrt(n) white-noise image (uniform on
/// [0, 1]). Throws InvalidParameter when n is not a perfect square and
/// CapacityError when n exceeds max_n.
NlmOperator random_nlm_operator(std::size_t n, std::uint64_t seed, std::size_t patch, double h,
                                std::size_t max_n = kDefaultOracleCap);

/// CSV with header "index,eigenvalue", 1-based index, 9 significant digits.
void write_spectrum_csv(const SpectralDecomposition& dec, std::ostream& out);

}  // namespace lrnlm
