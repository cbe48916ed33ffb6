#include "lrnlm_tools/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "lrnlm/error.hpp"

namespace lrnlm::tools {
namespace {

void check_side(std::size_t side) {
  if (side == 0) throw InvalidParameter("image side must be positive");
}

}  // namespace

Image checkerboard(std::size_t side, std::size_t block) {
  check_side(side);
  if (block == 0) throw InvalidParameter("checkerboard block must be positive");
  std::vector<double> p(side * side);
  for (std::size_t y = 0; y < side; ++y) {
    for (std::size_t x = 0; x < side; ++x) p[y * side + x] = ((x / block + y / block) % 2) ? 200.0 : 50.0;
  }
  return Image(side, side, std::move(p));
}

Image filtered_noise(std::size_t side, double blur, std::uint64_t seed) {
  check_side(side);
  if (!(blur > 0.0)) throw InvalidParameter("blur width must be positive");
  GaussianSampler g(seed);
  std::vector<double> w(side * side);
  for (auto& v : w) v = g.next();

  const auto r = static_cast<std::ptrdiff_t>(std::ceil(3.0 * blur));
  std::vector<double> k(2 * r + 1);
  double z = 0.0;
  for (std::ptrdiff_t i = -r; i <= r; ++i) z += k[i + r] = std::exp(-double(i * i) / (2.0 * blur * blur));
  for (auto& v : k) v /= z;

  const auto n = static_cast<std::ptrdiff_t>(side);
  std::vector<double> t(w.size()), o(w.size());
  for (std::ptrdiff_t y = 0; y < n; ++y) {
    for (std::ptrdiff_t x = 0; x < n; ++x) {
      double a = 0.0;
      for (std::ptrdiff_t i = -r; i <= r; ++i) a += k[i + r] * w[y * n + mirror_index(x + i, n)];
      t[y * n + x] = a;
    }
  }
  for (std::ptrdiff_t y = 0; y < n; ++y) {
    for (std::ptrdiff_t x = 0; x < n; ++x) {
      double a = 0.0;
      for (std::ptrdiff_t i = -r; i <= r; ++i) a += k[i + r] * t[mirror_index(y + i, n) * n + x];
      o[y * n + x] = a;
    }
  }
  const auto [lo, hi] = std::minmax_element(o.begin(), o.end());
  const double a = *lo, span = *hi - *lo;
  if (!(span > 0.0)) return Image::filled(side, side, 127.5);
  for (auto& v : o) v = (v - a) / span * 255.0;
  return Image(side, side, std::move(o));
}

Image cartoon(std::size_t side, std::uint64_t seed) {
  check_side(side);
  GaussianSampler g(seed);
  const double s = static_cast<double>(side);
  std::vector<double> p(side * side, 40.0 + 40.0 * g.uniform());
  for (int shape = 0; shape < 6; ++shape) {
    const double cx = s * g.uniform(), cy = s * g.uniform();
    const double r = s * (0.1 + 0.2 * g.uniform());
    const double v = 255.0 * g.uniform();
    const bool disc = g.uniform() < 0.5;
    for (std::size_t y = 0; y < side; ++y) {
      for (std::size_t x = 0; x < side; ++x) {
        const double dx = double(x) - cx, dy = double(y) - cy;
        const bool in = disc ? dx * dx + dy * dy < r * r
                             : std::abs(dx) < r && std::abs(dy) < 0.6 * r;
        if (in) p[y * side + x] = v;
      }
    }
  }
  return Image(side, side, std::move(p));
}

std::vector<NamedImage> synthetic_test_set(std::size_t side, std::uint64_t seed) {
  const std::size_t small = std::max<std::size_t>(1, side / 10);
  const std::size_t large = std::max<std::size_t>(1, side / 4);
  std::vector<NamedImage> set;
  set.push_back({"checker" + std::to_string(small), checkerboard(side, small)});
  set.push_back({"checker" + std::to_string(large), checkerboard(side, large)});
  set.push_back({"fnoise2", filtered_noise(side, 2.0, seed * 1000 + 5)});
  set.push_back({"fnoise4", filtered_noise(side, 4.0, seed * 1000 + 6)});
  set.push_back({"cartoon1", cartoon(side, seed * 1000 + 1)});
  set.push_back({"cartoon2", cartoon(side, seed * 1000 + 2)});
  return set;
}

}  // namespace lrnlm::tools
