#include "lrnlm/nlm_operator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "lrnlm/error.hpp"

namespace lrnlm {

NlmOperator::NlmOperator(DenseMatrix weights, std::size_t patch, double h,
                         DistanceScaling scaling)
    : weights_(std::move(weights)), patch_(patch), h_(h), scaling_(scaling) {
  const std::size_t n = weights_.rows();
  if (n == 0 || weights_.cols() != n) throw ContractViolation("NLM weights must be square and non-empty");
  degrees_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (weights_(i, i) != 1.0) throw ContractViolation("NLM weights need a unit diagonal");
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = weights_(i, j);
      if (!(w > 0.0 && w <= 1.0)) throw ContractViolation("NLM weights must lie in (0, 1]");
      if (w != weights_(j, i)) throw ContractViolation("NLM weights must be exactly symmetric");
      sum += w;
    }
    degrees_[i] = sum;
  }
}

void NlmOperator::apply(std::span<const double> in, std::span<double> out) const {
  if (in.size() != dim() || out.size() != dim()) {
    throw DimensionMismatch("NLM operator of dimension " + std::to_string(dim()) +
                            " applied to vector of length " + std::to_string(in.size()));
  }
  const auto n = static_cast<std::ptrdiff_t>(dim());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto r = weights_.row(static_cast<std::size_t>(i));
    double acc = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * in[j];
    out[static_cast<std::size_t>(i)] = acc / degrees_[static_cast<std::size_t>(i)];
  }
}

NlmOperator build_nlm_operator(const Image& img, const NlmParams& params) {
  if (!(params.h > 0.0) || !std::isfinite(params.h)) {
    throw InvalidParameter("kernel width h must be positive");
  }
  if (params.patch == 0 || params.patch % 2 == 0) {
    throw InvalidParameter("patch side must be odd and positive");
  }
  const std::size_t n = img.size();
  if (n > params.max_n) {
    throw CapacityError("image has " + std::to_string(n) + " pixels, above the dense cap of " +
                        std::to_string(params.max_n));
  }

  const Image unit = img.with_pixels(normalized_intensities(img));
  const std::size_t len = params.patch * params.patch;
  std::vector<double> patches(n * len);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = extract_patch_vector(unit, i, params.patch);
    std::copy(v.begin(), v.end(), patches.begin() + static_cast<std::ptrdiff_t>(i * len));
  }

  double denom = 2.0 * params.h * params.h;
  if (params.scaling == DistanceScaling::kPerPixel) denom *= static_cast<double>(len);
  const double inv = 1.0 / denom;

  DenseMatrix w(n, n);
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t si = 0; si < sn; ++si) {
    const auto i = static_cast<std::size_t>(si);
    const double* pi = patches.data() + i * len;
    w(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* pj = patches.data() + j * len;
      double dist = 0.0;
      for (std::size_t k = 0; k < len; ++k) {
        const double diff = pi[k] - pj[k];
        dist += diff * diff;
      }
      const double val = std::exp(-dist * inv);
      w(i, j) = val;
      w(j, i) = val;
    }
  }
  // Weights underflowing to zero would break strict positivity; this needs
  // distances beyond ~1400 h^2, impossible for [0, 1] intensities with the
  // default scaling but reachable in raw mode with tiny h.
  for (double v : w.data()) {
    if (!(v > 0.0)) {
      throw InvalidParameter("kernel width too small: patch weights underflow to zero");
    }
  }
  return NlmOperator(std::move(w), params.patch, params.h, params.scaling);
}

std::vector<double> apply_operator(const NlmOperator& op, std::span<const double> y) {
  std::vector<double> out(op.dim());
  op.apply(y, out);
  return out;
}

ConditionNumbers condition_numbers(std::span<const double> degrees) {
  const auto [lo, hi] = std::minmax_element(degrees.begin(), degrees.end());
  double sum = 0.0, sum_inv = 0.0;
  for (double d : degrees) {
    sum += d;
    sum_inv += 1.0 / d;
  }
  return {std::sqrt(*hi) / std::sqrt(*lo), std::sqrt(sum / sum_inv)};
}

ConditionNumbers condition_numbers(const NlmOperator& op) { return condition_numbers(op.degrees()); }

namespace {

constexpr char kMagicPrefix[7] = {'L', 'R', 'N', 'L', 'M', 'O', 'P'};

template <class T>
void write_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  unsigned char buf[8];
  for (int k = 0; k < 8; ++k) buf[k] = static_cast<unsigned char>(bits >> (8 * k));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

template <class T>
T read_le(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (in.gcount() != 8) throw IoError("operator file truncated");
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(buf[k]) << (8 * k);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

}  // namespace

void save_operator(const NlmOperator& op, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kMagicPrefix, 7);
  out.put(op.scaling() == DistanceScaling::kPerPixel ? 'P' : 'R');
  write_le<std::uint64_t>(out, op.dim());
  write_le<std::uint64_t>(out, op.patch());
  write_le<double>(out, op.h());
  for (double v : op.weights().data()) write_le<double>(out, v);
  if (!out) throw IoError("write failed: " + path.string());
}

NlmOperator load_operator(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (in.gcount() != 8 || std::memcmp(magic, kMagicPrefix, 7) != 0 ||
      (magic[7] != 'P' && magic[7] != 'R')) {
    throw IoError(path.string() + ": not an NLM operator file");
  }
  const auto scaling = magic[7] == 'P' ? DistanceScaling::kPerPixel : DistanceScaling::kRaw;
  const auto n = read_le<std::uint64_t>(in);
  const auto patch = read_le<std::uint64_t>(in);
  const auto h = read_le<double>(in);
  if (n == 0 || n > (std::uint64_t{1} << 20)) throw IoError(path.string() + ": implausible dimension");
  DenseMatrix w(n, n);
  for (double& v : w.data()) v = read_le<double>(in);
  try {
    NlmOperator op(std::move(w), patch, h, scaling);
    for (double d : op.degrees()) {
      if (d < 1.0 || d > static_cast<double>(n)) throw ContractViolation("degree outside [1, n]");
    }
    return op;
  } catch (const ContractViolation& e) {
    throw IoError(path.string() + ": invalid operator: " + e.what());
  }
}

}  // namespace lrnlm
