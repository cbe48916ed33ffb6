#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace lrnlm {

/// Real function on [0, 1] applied to operator eigenvalues.
using ScalarFilter = std::function<double(double)>;

enum class FilterKind { kHardThreshold, kButterworth, kSlantedButterworth };

/// A spectral filter with cutoff omega and order d (d is ignored by the hard
/// threshold).
struct FilterSpec {
  FilterKind kind = FilterKind::kSlantedButterworth;
  double omega = 0.5;
  int order = 4;

  /// Throws InvalidParameter for omega outside [0, 1], order < 1, or
  /// omega == 1 for the Butterworth kinds.
  void validate() const;
  double operator()(double x) const;
  /// Same syntax `parse_filter_spec` accepts, e.g. "sb:omega=0.7,d=4".
  std::string to_string() const;
  ScalarFilter as_function() const;
};

/// 0 below omega, identity at and above it.
double eval_hard_threshold(double x, double omega);

/// Butterworth gain (1 + ((1 - x) / (1 - omega))^(2d))^(-1/2).
double eval_butterworth(double x, double omega, int order);

/// Slanted Butterworth x * eval_butterworth(x, omega, order): a smooth
/// surrogate of the hard threshold that keeps f(1) = 1 and f([0,1]) in [0,1].
double eval_slanted_butterworth(double x, double omega, int order);

/// Parses "sb:omega=0.7,d=4", "bw:omega=0.5,d=8" or "hard:omega=0.5".
/// Throws InvalidParameter on malformed input.
FilterSpec parse_filter_spec(std::string_view text);

struct FilterViolation {
  double x;
  double value;
  std::string reason;
};

struct FilterCheck {
  bool passed = true;
  std::optional<FilterViolation> first_violation;
};

/// Checks the two sufficient conditions for f(A) to remain an extended NLM
/// operator: |f(1) - 1| <= tol and 0 <= f(x) <= 1 (within tol) on a uniform
/// grid of `grid_size` points over [0, 1]. Reports the first violation found,
/// checking f(1) first.
FilterCheck verify_filter_conditions(const ScalarFilter& f, int grid_size, double tol);

}  // namespace lrnlm
