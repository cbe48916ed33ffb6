#include "lrnlm/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

namespace lrnlm {

ChebyshevExpansion::ChebyshevExpansion(std::vector<double> coeffs, std::string source)
    : coeffs_(std::move(coeffs)), source_(std::move(source)) {
  if (coeffs_.empty()) throw InvalidParameter("Chebyshev expansion needs at least one coefficient");
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw InvalidParameter("Chebyshev coefficient is not finite");
  }
}

ChebyshevExpansion cheb_coefficients(const ScalarFilter& f, std::size_t degree,
                                     std::string source) {
  if (degree < 1) throw InvalidParameter("Chebyshev degree N must be >= 1");
  const std::size_t nodes = degree + 1;
  std::vector<double> theta(nodes), values(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    theta[k] = std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(nodes);
    const double x = 0.5 * (std::cos(theta[k]) + 1.0);
    values[k] = f(x);
    if (!std::isfinite(values[k])) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "filter is not finite at quadrature node %zu (x = %.17g)",
                    k + 1, x);
      throw EvaluationError(buf);
    }
  }
  std::vector<double> coeffs(nodes);
  const double scale = 2.0 / static_cast<double>(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes; ++k) {
      acc += values[k] * std::cos(static_cast<double>(j) * theta[k]);
    }
    coeffs[j] = scale * acc;
  }
  coeffs[0] *= 0.5;
  return ChebyshevExpansion(std::move(coeffs), std::move(source));
}

double cheb_eval_scalar(const ChebyshevExpansion& expansion, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("Chebyshev evaluation outside [0, 1]");
  const double y = 2.0 * x - 1.0;
  const auto a = expansion.coeffs();
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t j = expansion.degree(); j >= 1; --j) {
    const double next = a[j] + 2.0 * y * b1 - b2;
    b2 = b1;
    b1 = next;
  }
  return a[0] + y * b1 - b2;
}

double theorem2_bound(double deriv_norm, int m, std::size_t degree, double kappa) {
  if (m < 1) throw InvalidParameter("smoothness order m must be >= 1");
  if (degree <= static_cast<std::size_t>(m)) throw InvalidParameter("truncation bound needs N > m");
  if (!(deriv_norm >= 0.0)) throw InvalidParameter("derivative norm must be non-negative");
  if (!(kappa >= 1.0)) throw InvalidParameter("condition number must be >= 1");
  const double c = 2.0 / (std::numbers::pi * m) * deriv_norm;
  return c / std::pow(static_cast<double>(degree) - m, m) * kappa;
}

double theorem2_bound_frobenius(double deriv_norm, int m, std::size_t degree, double kappa_f,
                                std::size_t n) {
  return theorem2_bound(deriv_norm, m, degree, kappa_f) * std::sqrt(static_cast<double>(n));
}

double second_derivative_cheb_norm(const ScalarFilter& f, int nodes, double step) {
  if (nodes < 1) throw InvalidParameter("quadrature needs at least one node");
  if (!(step > 0.0 && step < 0.5)) throw InvalidParameter("finite-difference step must lie in (0, 0.5)");
  // g(t) = f((t + 1) / 2) on [-1, 1], so g''(t) = f''(x) / 4. Work in t.
  auto g = [&](double t) { return f(std::clamp(0.5 * (t + 1.0), 0.0, 1.0)); };
  double sum = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double theta = std::numbers::pi * (k + 0.5) / nodes;
    const double t = std::clamp(std::cos(theta), -1.0 + step, 1.0 - step);
    const double second = (g(t + step) - 2.0 * g(t) + g(t - step)) / (step * step);
    sum += std::abs(second);
  }
  // dt / sqrt(1 - t^2) = d theta
  return sum * std::numbers::pi / nodes;
}

void write_expansion_csv(const ChebyshevExpansion& expansion, std::ostream& out) {
  out << "index,coefficient\n";
  char buf[64];
  for (std::size_t j = 0; j < expansion.coeffs().size(); ++j) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", j, expansion.coeffs()[j]);
    out << buf;
  }
}

ChebyshevExpansion read_expansion_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("index,coefficient", 0) != 0) {
    throw IoError("expansion CSV must start with header 'index,coefficient'");
  }
  std::vector<double> coeffs;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError("malformed expansion CSV line: " + line);
    std::size_t index = 0;
    double value = 0.0;
    try {
      index = std::stoul(line.substr(0, comma));
      value = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw IoError("malformed expansion CSV line: " + line);
    }
    if (index != coeffs.size()) throw IoError("expansion CSV indices must be 0, 1, 2, ...");
    coeffs.push_back(value);
  }
  return ChebyshevExpansion(std::move(coeffs));
}

}  // namespace lrnlm
