#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lrnlm/chebyshev.hpp"
#include "lrnlm/filters.hpp"
#include "lrnlm/nlm_operator.hpp"
#include "lrnlm/spectral.hpp"

namespace lrnlm {

enum class ProbeAggregate { kMax, kMean };

struct ProbeOptions {
  std::size_t count = 16;
  std::uint64_t seed = 20240601;
  ProbeAggregate aggregate = ProbeAggregate::kMax;
};

/// Randomized estimate of ||S_N(f, A) - f(A)|| using seeded unit probe
/// vectors v: the errors ||S_N(f, A) v - f(A) v||_2 are a lower bound on the
/// matrix 2-norm. f(A) v comes from the exact spectral decomposition, and
/// S_N(f, A) v from clenshaw_matvec on the operator itself, so the two
/// sides share no arithmetic. Exact references are computed once and reused
/// across expansions.
class TruncationProbe {
 public:
  /// Throws DegenerateInput when f(A) v = 0 for every probe.
  TruncationProbe(const NlmOperator& op, const SpectralDecomposition& dec, const ScalarFilter& f,
                  const ProbeOptions& options = {});

  /// Aggregate of ||S_N v - f(A) v|| / ||f(A) v|| over the probes.
  double relative_error(const ChebyshevExpansion& expansion) const;
  /// Aggregate of ||S_N v - f(A) v|| over the (unit) probes.
  double absolute_error(const ChebyshevExpansion& expansion) const;

 private:
  std::vector<double> errors(const ChebyshevExpansion& expansion, bool relative) const;

  const NlmOperator* op_;
  ProbeOptions options_;
  std::vector<std::vector<double>> probes_;
  std::vector<std::vector<double>> exact_;
  std::vector<double> exact_norms_;
};

/// One-shot relative error of the degree-N expansion of `filter`.
double relative_truncation_error(const NlmOperator& op, const SpectralDecomposition& dec,
                                 const FilterSpec& filter, std::size_t degree,
                                 const ProbeOptions& options = {});
double relative_truncation_error(const NlmOperator& op, const SpectralDecomposition& dec,
                                 const ScalarFilter& f, std::size_t degree,
                                 const ProbeOptions& options = {});

}  // namespace lrnlm
