#include "lrnlm/truncation_error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lrnlm/error.hpp"
#include "lrnlm/image.hpp"

namespace lrnlm {

TruncationProbe::TruncationProbe(const NlmOperator& op, const SpectralDecomposition& dec,
                                 const ScalarFilter& f, const ProbeOptions& options)
    : op_(&op), options_(options) {
  if (dec.dim() != op.dim()) throw DimensionMismatch("decomposition does not match operator");
  if (options.count == 0) throw InvalidParameter("need at least one probe vector");
  GaussianSampler rng(options.seed);
  for (std::size_t p = 0; p < options.count; ++p) {
    std::vector<double> v(op.dim());
    for (double& x : v) x = rng.next();
    const double nv = norm2(v);
    for (double& x : v) x /= nv;
    auto exact = apply_filtered_exact(dec, f, v);
    const double ne = norm2(exact);
    if (ne == 0.0) continue;
    probes_.push_back(std::move(v));
    exact_.push_back(std::move(exact));
    exact_norms_.push_back(ne);
  }
  if (probes_.empty()) throw DegenerateInput("f(A) annihilates every probe vector");
}

std::vector<double> TruncationProbe::errors(const ChebyshevExpansion& expansion,
                                            bool relative) const {
  std::vector<double> out;
  out.reserve(probes_.size());
  for (std::size_t p = 0; p < probes_.size(); ++p) {
    auto approx = clenshaw_matvec(*op_, expansion, probes_[p]);
    for (std::size_t i = 0; i < approx.size(); ++i) approx[i] -= exact_[p][i];
    const double e = norm2(approx);
    out.push_back(relative ? e / exact_norms_[p] : e);
  }
  return out;
}

namespace {

double aggregate(const std::vector<double>& v, ProbeAggregate mode) {
  if (mode == ProbeAggregate::kMax) return *std::max_element(v.begin(), v.end());
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double TruncationProbe::relative_error(const ChebyshevExpansion& expansion) const {
  return aggregate(errors(expansion, true), options_.aggregate);
}

double TruncationProbe::absolute_error(const ChebyshevExpansion& expansion) const {
  return aggregate(errors(expansion, false), options_.aggregate);
}

double relative_truncation_error(const NlmOperator& op, const SpectralDecomposition& dec,
                                 const FilterSpec& filter, std::size_t degree,
                                 const ProbeOptions& options) {
  const auto f = filter.as_function();
  const TruncationProbe probe(op, dec, f, options);
  return probe.relative_error(cheb_coefficients(f, degree, filter.to_string()));
}

double relative_truncation_error(const NlmOperator& op, const SpectralDecomposition& dec,
                                 const ScalarFilter& f, std::size_t degree,
                                 const ProbeOptions& options) {
  const TruncationProbe probe(op, dec, f, options);
  return probe.relative_error(cheb_coefficients(f, degree));
}

}  // namespace lrnlm
