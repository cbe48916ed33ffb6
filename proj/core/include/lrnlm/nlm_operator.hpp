#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "lrnlm/dense_matrix.hpp"
#include "lrnlm/image.hpp"

namespace lrnlm {

inline constexpr std::size_t kDefaultDenseCap = 8192;

/// How squared patch distances are scaled before the Gaussian kernel.
enum class DistanceScaling {
  /// ||v_i - v_j||^2 / p^2: h is comparable across patch sizes (default).
  kPerPixel,
  /// ||v_i - v_j||^2 as is.
  kRaw,
};

struct NlmParams {
  std::size_t patch = 5;
  double h = 1.0;
  DistanceScaling scaling = DistanceScaling::kPerPixel;
  std::size_t max_n = kDefaultDenseCap;
};

/// Non-Local Means operator A = D^-1 W of an image.
///
/// W is dense and symmetric with W_ij = exp(-dist(i, j) / (2 h^2)), where
/// dist is the (possibly per-pixel scaled) squared distance between the
/// mirror-padded patches around pixels i and j of the image rescaled to
/// [0, 1]. Every unordered pair is evaluated once and mirrored, so W is
/// exactly symmetric and W_ii = 1. D holds the row sums of W, hence
/// 1 <= D_ii <= n and A is row-stochastic.
class NlmOperator {
 public:
  /// Adopts a weight matrix, recomputing D. Throws ContractViolation unless W
  /// is square, exactly symmetric, has a unit diagonal and entries in (0, 1].
  NlmOperator(DenseMatrix weights, std::size_t patch, double h,
              DistanceScaling scaling = DistanceScaling::kPerPixel);

  std::size_t dim() const { return weights_.rows(); }
  std::size_t patch() const { return patch_; }
  double h() const { return h_; }
  DistanceScaling scaling() const { return scaling_; }
  const DenseMatrix& weights() const { return weights_; }
  std::span<const double> degrees() const { return degrees_; }

  /// out = D^-1 (W in). Each row is reduced sequentially in index order.
  void apply(std::span<const double> in, std::span<double> out) const;

  /// Entry A_ij.
  double entry(std::size_t i, std::size_t j) const { return weights_(i, j) / degrees_[i]; }

 private:
  DenseMatrix weights_;
  std::vector<double> degrees_;
  std::size_t patch_;
  double h_;
  DistanceScaling scaling_;
};

/// Builds the operator of `img` (rescaled by its declared range to [0, 1]).
/// Throws CapacityError when width*height exceeds params.max_n and
/// InvalidParameter for h <= 0 or an even patch side.
NlmOperator build_nlm_operator(const Image& img, const NlmParams& params);

/// x = A y.
std::vector<double> apply_operator(const NlmOperator& op, std::span<const double> y);

struct ConditionNumbers {
  double spectral;   ///< max sqrt(D_ii) / min sqrt(D_ii)
  double frobenius;  ///< sqrt(sum D_ii / sum 1/D_ii)
};

/// Condition numbers of D^{1/2}. Both are at most sqrt(n) and n respectively.
ConditionNumbers condition_numbers(const NlmOperator& op);
ConditionNumbers condition_numbers(std::span<const double> degrees);

/// Binary cache format, all fields little-endian:
///   8 bytes magic "LRNLMOP" followed by 'P' (per-pixel scaling) or 'R' (raw),
///   u64 n, u64 patch, f64 h, n*n f64 weights in row-major order.
/// D is not stored; it is recomputed and validated on load.
void save_operator(const NlmOperator& op, const std::filesystem::path& path);
NlmOperator load_operator(const std::filesystem::path& path);

}  // namespace lrnlm
