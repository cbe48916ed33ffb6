#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>

#include "lrnlm/image.hpp"
#include "lrnlm/nlm_operator.hpp"
#include "lrnlm/spectral.hpp"

namespace lrnlm {

inline constexpr std::size_t kDefaultChebDegree = 150;

/// Shared knobs of every pipeline besides the filter parameters.
struct PipelineOptions {
  DistanceScaling scaling = DistanceScaling::kPerPixel;
  std::size_t max_n = kDefaultDenseCap;
  DecomposeOptions decompose{EigenSolver::kAuto};
};

/// Plain NLM: IMAGE(A COL(img)).
Image denoise_nlm(const Image& img, std::size_t patch, double h, const PipelineOptions& opt = {});

/// Rank-k truncated eigendecomposition of A applied to the image.
Image denoise_nlm_eig(const Image& img, std::size_t patch, double h, std::size_t rank,
                      const PipelineOptions& opt = {});

/// Slanted Butterworth filter of A evaluated with an N-term Chebyshev series
/// and the matrix Clenshaw recurrence.
Image denoise_nlm_sb(const Image& img, std::size_t patch, double h, double omega, int order,
                     std::size_t degree = kDefaultChebDegree, const PipelineOptions& opt = {});

/// Two-stage scheme parameters; field names follow the key=value file format.
struct Sb2Config {
  std::size_t p = 5;
  double h1 = 1.5;
  double h2 = 1.0;
  double omega1 = 0.3;
  double omega2 = 0.3;
  int d1 = 50;
  int d2 = 50;
  double gamma = 0.5;
  std::size_t N = kDefaultChebDegree;

  /// Throws InvalidParameter when an invariant is violated.
  void validate() const;
};

/// Published two-stage settings for SNR 0.5, 0.75 and 1. Throws
/// InvalidParameter for other levels.
Sb2Config sb2_preset(double snr);

/// Reads `key = value` lines (p, h1, h2, omega1, omega2, d1, d2, gamma, N);
/// '#' starts a comment. Unset keys keep the values of `base`.
Sb2Config parse_sb2_config(std::istream& in, Sb2Config base = {});
Sb2Config load_sb2_config(const std::filesystem::path& path, Sb2Config base = {});

/// Stage 1 NLM-SB on img; mix (1 - gamma) stage1 + gamma img; stage 2 NLM-SB
/// with an operator built from the mixed image.
Image denoise_nlm_sb2(const Image& img, const Sb2Config& cfg, const PipelineOptions& opt = {});

}  // namespace lrnlm
