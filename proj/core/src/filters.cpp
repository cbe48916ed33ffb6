#include "lrnlm/filters.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "lrnlm/error.hpp"

namespace lrnlm {
namespace {

void check_unit_interval(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("filter argument " + std::to_string(x) + " outside [0, 1]");
  }
}

void check_cutoff(double omega) {
  if (!(omega >= 0.0 && omega <= 1.0)) throw InvalidParameter("cutoff omega must lie in [0, 1]");
}

void check_butterworth(double omega, int order) {
  check_cutoff(omega);
  if (omega == 1.0) throw InvalidParameter("Butterworth cutoff omega = 1 is singular");
  if (order < 1) throw InvalidParameter("filter order d must be >= 1");
}

}  // namespace

double eval_hard_threshold(double x, double omega) {
  check_unit_interval(x);
  check_cutoff(omega);
  return x < omega ? 0.0 : x;
}

double eval_butterworth(double x, double omega, int order) {
  check_unit_interval(x);
  check_butterworth(omega, order);
  const double ratio = (1.0 - x) / (1.0 - omega);
  if (ratio == 0.0) return 1.0;
  const double log_power = 2.0 * order * std::log(ratio);
  // ratio^(2d) overflows for large d near x = 0.
  if (log_power > 300.0) {
    return std::exp(-0.5 * (log_power + std::log1p(std::exp(-log_power))));
  }
  return 1.0 / std::sqrt(1.0 + std::pow(ratio, 2 * order));
}

double eval_slanted_butterworth(double x, double omega, int order) {
  return x * eval_butterworth(x, omega, order);
}

void FilterSpec::validate() const {
  if (kind == FilterKind::kHardThreshold) {
    check_cutoff(omega);
  } else {
    check_butterworth(omega, order);
  }
}

double FilterSpec::operator()(double x) const {
  switch (kind) {
    case FilterKind::kHardThreshold:
      return eval_hard_threshold(x, omega);
    case FilterKind::kButterworth:
      return eval_butterworth(x, omega, order);
    case FilterKind::kSlantedButterworth:
      return eval_slanted_butterworth(x, omega, order);
  }
  return 0.0;
}

std::string FilterSpec::to_string() const {
  char buf[96];
  switch (kind) {
    case FilterKind::kHardThreshold:
      std::snprintf(buf, sizeof buf, "hard:omega=%.9g", omega);
      break;
    case FilterKind::kButterworth:
      std::snprintf(buf, sizeof buf, "bw:omega=%.9g,d=%d", omega, order);
      break;
    case FilterKind::kSlantedButterworth:
      std::snprintf(buf, sizeof buf, "sb:omega=%.9g,d=%d", omega, order);
      break;
  }
  return buf;
}

ScalarFilter FilterSpec::as_function() const {
  validate();
  return [spec = *this](double x) { return spec(x); };
}

FilterSpec parse_filter_spec(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidParameter("filter spec '" + std::string(text) + "' lacks a 'kind:' prefix");
  }
  FilterSpec spec;
  const auto kind = text.substr(0, colon);
  if (kind == "sb") {
    spec.kind = FilterKind::kSlantedButterworth;
  } else if (kind == "bw") {
    spec.kind = FilterKind::kButterworth;
  } else if (kind == "hard") {
    spec.kind = FilterKind::kHardThreshold;
  } else {
    throw InvalidParameter("unknown filter kind '" + std::string(kind) + "'");
  }
  bool have_omega = false, have_order = false;
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidParameter("filter parameter '" + std::string(item) + "' is not key=value");
    }
    const std::string key(item.substr(0, eq));
    const std::string value(item.substr(eq + 1));
    std::size_t used = 0;
    try {
      if (key == "omega") {
        spec.omega = std::stod(value, &used);
        have_omega = true;
      } else if (key == "d") {
        spec.order = std::stoi(value, &used);
        have_order = true;
      } else {
        throw InvalidParameter("unknown filter parameter '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw InvalidParameter("bad value '" + value + "' for filter parameter " + key);
    }
    if (used != value.size()) {
      throw InvalidParameter("bad value '" + value + "' for filter parameter " + key);
    }
  }
  if (!have_omega) throw InvalidParameter("filter spec needs omega=");
  if (spec.kind != FilterKind::kHardThreshold && !have_order) {
    throw InvalidParameter("Butterworth filter spec needs d=");
  }
  spec.validate();
  return spec;
}

FilterCheck verify_filter_conditions(const ScalarFilter& f, int grid_size, double tol) {
  if (grid_size < 2) throw InvalidParameter("grid_size must be >= 2");
  FilterCheck check;
  const double at_one = f(1.0);
  if (!(std::abs(at_one - 1.0) <= tol)) {
    check.passed = false;
    check.first_violation = FilterViolation{1.0, at_one, "f(1) != 1"};
    return check;
  }
  for (int k = 0; k < grid_size; ++k) {
    const double x = static_cast<double>(k) / (grid_size - 1);
    const double v = f(x);
    if (!(v >= -tol && v <= 1.0 + tol)) {
      check.passed = false;
      check.first_violation = FilterViolation{x, v, "f(x) outside [0, 1]"};
      return check;
    }
  }
  return check;
}

}  // namespace lrnlm
