#include "lrnlm/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>

#include "lrnlm/error.hpp"
#include "lrnlm/image.hpp"
#include "lrnlm/log.hpp"

namespace lrnlm {
namespace {

void require_square(const DenseMatrix& s) {
  if (s.rows() != s.cols()) throw InvalidParameter("eigensolver needs a square matrix");
  if (s.rows() == 0) throw InvalidParameter("eigensolver needs a non-empty matrix");
}

// Sorts eigenpairs descending; `vt` holds eigenvectors as rows.
EigenSystem sorted_system(const std::vector<double>& values, const DenseMatrix& vt,
                          int sweeps, bool converged) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  EigenSystem out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = values[order[k]];
    const auto src = vt.row(order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = src[i];
  }
  out.sweeps = sweeps;
  out.converged = converged;
  return out;
}

double off_diagonal_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

}  // namespace

EigenSystem jacobi_eigh(const DenseMatrix& s, const JacobiOptions& options) {
  require_square(s);
  const std::size_t n = s.rows();
  if (n > options.max_n) {
    throw CapacityError("Jacobi eigensolver: dimension " + std::to_string(n) +
                        " exceeds the oracle cap of " + std::to_string(options.max_n));
  }
  if (s.max_asymmetry() > 1e-12) throw ContractViolation("Jacobi eigensolver needs a symmetric matrix");

  DenseMatrix a = s;
  DenseMatrix vt = DenseMatrix::identity(n);  // rows are eigenvectors
  double frob = 0.0;
  for (double v : a.data()) frob += v * v;
  frob = std::sqrt(frob);
  const double target = options.tolerance * frob;

  // Once off(S) drops below the target, one more sweep is run: convergence
  // is quadratic at that point, so it costs one sweep and takes the residual
  // from the tolerance down to roundoff.
  int sweep = 0;
  bool converged = off_diagonal_norm(a) <= target;
  bool polished = converged;
  while (!polished && sweep < options.max_sweeps) {
    polished = converged;
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Negligible against both diagonal entries: annihilate without rotating.
        if (sweep > 3 && std::abs(app) + 1e2 * std::abs(apq) == std::abs(app) &&
            std::abs(aqq) + 1e2 * std::abs(apq) == std::abs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;

        auto rp = a.row(p);
        auto rq = a.row(q);
        for (std::size_t k = 0; k < n; ++k) {
          const double xp = rp[k];
          const double xq = rq[k];
          rp[k] = c * xp - sn * xq;
          rq[k] = sn * xp + c * xq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          a(k, p) = rp[k];
          a(k, q) = rq[k];
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        auto vp = vt.row(p);
        auto vq = vt.row(q);
        for (std::size_t k = 0; k < n; ++k) {
          const double xp = vp[k];
          const double xq = vq[k];
          vp[k] = c * xp - sn * xq;
          vq[k] = sn * xp + c * xq;
        }
      }
    }
    converged = converged || off_diagonal_norm(a) <= target;
  }

  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
  return sorted_system(values, vt, sweep, converged);
}

EigenSystem tridiagonal_eigh(const DenseMatrix& s) {
  require_square(s);
  if (s.max_asymmetry() > 1e-12) throw ContractViolation("eigensolver needs a symmetric matrix");
  const auto n = static_cast<Eigen::Index>(s.rows());
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      m(s.data().data(), n, n);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw EvaluationError("tridiagonal QR eigensolver did not converge");
  std::vector<double> values(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  DenseMatrix vt(s.rows(), s.rows());
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      vt(static_cast<std::size_t>(k), static_cast<std::size_t>(i)) = solver.eigenvectors()(i, k);
    }
  }
  return sorted_system(values, vt, 0, true);
}

DenseMatrix symmetrize(const NlmOperator& op) {
  const std::size_t n = op.dim();
  const auto deg = op.degrees();
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(deg[i]);
  DenseMatrix s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    s(i, i) = op.weights()(i, i) * inv_sqrt[i] * inv_sqrt[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = op.weights()(i, j) * inv_sqrt[i] * inv_sqrt[j];
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

SpectralDecomposition::SpectralDecomposition(std::vector<double> eigenvalues,
                                             DenseMatrix eigenvectors,
                                             std::vector<double> degree_sqrt)
    : eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      degree_sqrt_(std::move(degree_sqrt)) {
  const std::size_t n = eigenvalues_.size();
  if (eigenvectors_.rows() != n || eigenvectors_.cols() != n || degree_sqrt_.size() != n) {
    throw DimensionMismatch("spectral decomposition parts disagree in dimension");
  }
}

std::vector<double> SpectralDecomposition::apply_spectral(std::span<const double> gains,
                                                          std::span<const double> y) const {
  const std::size_t n = dim();
  if (gains.size() != n || y.size() != n) {
    throw DimensionMismatch("spectral application: vector length does not match dimension");
  }
  // coeffs = O^T D^1/2 y
  std::vector<double> coeffs(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double zi = degree_sqrt_[i] * y[i];
    const auto row = eigenvectors_.row(i);
    for (std::size_t k = 0; k < n; ++k) coeffs[k] += row[k] * zi;
  }
  for (std::size_t k = 0; k < n; ++k) coeffs[k] *= gains[k];
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = eigenvectors_.row(i);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += row[k] * coeffs[k];
    out[i] = acc / degree_sqrt_[i];
  }
  return out;
}

SpectralDecomposition decompose_nlm(const NlmOperator& op, const DecomposeOptions& options) {
  const std::size_t n = op.dim();
  const bool use_jacobi = options.solver == EigenSolver::kJacobi ||
                          (options.solver == EigenSolver::kAuto && n <= options.max_n);
  if (use_jacobi && n > options.max_n) {
    throw CapacityError("operator dimension " + std::to_string(n) +
                        " exceeds the Jacobi oracle cap of " + std::to_string(options.max_n));
  }
  const DenseMatrix s = symmetrize(op);
  EigenSystem es;
  if (use_jacobi) {
    JacobiOptions jo = options.jacobi;
    jo.max_n = std::max(jo.max_n, options.max_n);
    es = jacobi_eigh(s, jo);
    if (!es.converged) {
      log_warning("Jacobi eigensolver stopped after " + std::to_string(es.sweeps) +
                  " sweeps without reaching its tolerance");
    }
  } else {
    es = tridiagonal_eigh(s);
  }
  std::vector<double> dsqrt(n);
  for (std::size_t i = 0; i < n; ++i) dsqrt[i] = std::sqrt(op.degrees()[i]);
  return SpectralDecomposition(std::move(es.values), std::move(es.vectors), std::move(dsqrt));
}

std::vector<double> apply_rank_truncated(const SpectralDecomposition& dec, std::size_t k,
                                         std::span<const double> y) {
  if (k < 1 || k > dec.dim()) {
    throw InvalidParameter("rank k = " + std::to_string(k) + " outside [1, " +
                           std::to_string(dec.dim()) + "]");
  }
  std::vector<double> gains(dec.eigenvalues().begin(), dec.eigenvalues().end());
  std::fill(gains.begin() + static_cast<std::ptrdiff_t>(k), gains.end(), 0.0);
  return dec.apply_spectral(gains, y);
}

std::vector<double> apply_filtered_exact(const SpectralDecomposition& dec, const ScalarFilter& f,
                                         std::span<const double> y) {
  std::vector<double> gains(dec.dim());
  double worst_clamp = 0.0;
  for (std::size_t k = 0; k < dec.dim(); ++k) {
    const double lambda = dec.eigenvalues()[k];
    const double clamped = std::clamp(lambda, 0.0, 1.0);
    worst_clamp = std::max(worst_clamp, std::abs(clamped - lambda));
    gains[k] = f(clamped);
  }
  if (worst_clamp > 1e-9) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "eigenvalue clamped to [0, 1] by %.3g", worst_clamp);
    log_warning(buf);
  }
  return dec.apply_spectral(gains, y);
}

NlmOperator random_nlm_operator(std::size_t n, std::uint64_t seed, std::size_t patch, double h,
                                std::size_t max_n) {
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (n == 0 || side * side != n) {
    throw InvalidParameter("random operator size " + std::to_string(n) + " is not a perfect square");
  }
  if (n > max_n) {
    throw CapacityError("random operator size " + std::to_string(n) + " exceeds the cap of " +
                        std::to_string(max_n));
  }
  GaussianSampler rng(seed);
  std::vector<double> px(n);
  for (double& v : px) v = rng.uniform();
  const Image noise(side, side, std::move(px), ValueRange::kUnit);
  return build_nlm_operator(noise, NlmParams{patch, h, DistanceScaling::kPerPixel, max_n});
}

void write_spectrum_csv(const SpectralDecomposition& dec, std::ostream& out) {
  out << "index,eigenvalue\n";
  char buf[64];
  for (std::size_t k = 0; k < dec.dim(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.9g\n", k + 1, dec.eigenvalues()[k]);
    out << buf;
  }
}

}  // namespace lrnlm
