#include <cmath>
#include <sstream>

#include "doctest.h"
#include "lrnlm/chebyshev.hpp"
#include "lrnlm/error.hpp"
#include "lrnlm/pipelines.hpp"
#include "support/oracles.hpp"

using namespace lrnlm;

namespace {

Image textured(std::size_t side, std::uint64_t seed, double sigma) {
  std::vector<double> px(side * side);
  for (std::size_t y = 0; y < side; ++y)
    for (std::size_t x = 0; x < side; ++x) px[y * side + x] = ((x / 3 + y / 3) % 2) ? 180.0 : 60.0;
  return add_gaussian_noise(Image(side, side, px), {sigma, seed});
}

}  // namespace

TEST_CASE("constant images are fixed points of every pipeline") {
  const Image flat = Image::filled(8, 8, 123.0);
  auto near = [&](const Image& out) {
    for (double v : out.pixels()) CHECK(std::abs(v - 123.0) < 1e-6);
  };
  near(denoise_nlm(flat, 5, 1.0));
  near(denoise_nlm_eig(flat, 5, 1.0, 1));
  near(denoise_nlm_eig(flat, 5, 1.0, 64));
  near(denoise_nlm_sb(flat, 5, 1.0, 0.3, 4));
  near(denoise_nlm_sb2(flat, sb2_preset(1.0)));
}

TEST_CASE("sharp filters preserve constants up to the truncation error at 1") {
  // With d = 50 and N = 150 the series misses f(1) = 1 by about 1e-6. Both
  // stages use the same filter, so a constant c maps to c g ((1 - gamma) g + gamma).
  const Image flat = Image::filled(8, 8, 123.0);
  const auto cfg = sb2_preset(0.5);
  const auto f = FilterSpec{FilterKind::kSlantedButterworth, cfg.omega1, cfg.d1}.as_function();
  const double at_one = cheb_eval_scalar(cheb_coefficients(f, cfg.N), 1.0);
  const double gain = at_one * ((1.0 - cfg.gamma) * at_one + cfg.gamma);
  const Image out = denoise_nlm_sb2(flat, cfg);
  for (double v : out.pixels()) CHECK(v == doctest::Approx(123.0 * gain).epsilon(1e-12));
  CHECK(std::abs(gain - 1.0) < 1e-5);
}

TEST_CASE("single pixel and two pixels") {
  const Image one = Image::filled(1, 1, 42.0);
  CHECK(denoise_nlm(one, 5, 1.0) == one);
  const double e2 = std::exp(-2.0);
  const auto out = denoise_nlm(oracle::two_pixel(), 1, 0.5);
  CHECK(out[0] == doctest::Approx(255.0 * e2 / (1.0 + e2)));
  CHECK(out[1] == doctest::Approx(255.0 / (1.0 + e2)));
}

TEST_CASE("full-rank Eig equals NLM") {
  const Image noisy = textured(12, 3, 40.0);
  const auto a = denoise_nlm(noisy, 5, 0.7);
  const auto b = denoise_nlm_eig(noisy, 5, 0.7, noisy.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-8);
  CHECK_THROWS_AS(denoise_nlm_eig(noisy, 5, 0.7, 0), InvalidParameter);
  CHECK_THROWS_AS(denoise_nlm_eig(noisy, 5, 0.7, noisy.size() + 1), InvalidParameter);
}

TEST_CASE("SB matches the exact filtered operator") {
  const Image noisy = textured(14, 5, 50.0);
  const double omega = 0.5;
  const int d = 4;
  const auto out = denoise_nlm_sb(noisy, 5, 0.7, omega, d, 150);
  const auto op = build_nlm_operator(noisy, {5, 0.7});
  const auto dec = decompose_nlm(op);
  const FilterSpec spec{FilterKind::kSlantedButterworth, omega, d};
  const auto exact = apply_filtered_exact(dec, spec.as_function(), noisy.pixels());
  const auto e = cheb_coefficients(spec.as_function(), 150);
  double scalar = 0.0;
  for (double lam : dec.eigenvalues()) {
    const double x = std::clamp(lam, 0.0, 1.0);
    scalar = std::max(scalar, std::abs(cheb_eval_scalar(e, x) - spec(x)));
  }
  const double tol = 10.0 * (scalar + 1e-13) * max_abs(noisy.pixels()) * std::sqrt(double(noisy.size()));
  CHECK(oracle::max_abs_diff(out.pixels(), exact) <= tol);
}

TEST_CASE("SB approaches Eig as the order grows with the cutoff in a gap") {
  const Image noisy = textured(12, 9, 50.0);
  const double h = 0.6;
  const auto dec = decompose_nlm(build_nlm_operator(noisy, {5, h}));
  const auto lam = dec.eigenvalues();
  std::size_t k = 1;
  double best_gap = 0.0;
  for (std::size_t i = 1; i + 1 < 40; ++i) {
    if (lam[i - 1] - lam[i] > best_gap) {
      best_gap = lam[i - 1] - lam[i];
      k = i;
    }
  }
  const double omega = 0.5 * (lam[k - 1] + lam[k]);
  const auto eig = denoise_nlm_eig(noisy, 5, h, k);
  double prev = INFINITY;
  for (int d : {4, 15, 50}) {
    const auto sb = denoise_nlm_sb(noisy, 5, h, omega, d, 400);
    const double gap = oracle::max_abs_diff(sb.pixels(), eig.pixels());
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("SB2 with gamma 0 is SB applied twice") {
  const Image noisy = textured(10, 2, 40.0);
  Sb2Config cfg{5, 0.8, 0.8, 0.4, 0.4, 6, 6, 0.0, 60};
  const auto two = denoise_nlm_sb2(noisy, cfg);
  const auto once = denoise_nlm_sb(noisy, 5, 0.8, 0.4, 6, 60);
  const auto twice = denoise_nlm_sb(once, 5, 0.8, 0.4, 6, 60);
  CHECK(two == twice);
}

TEST_CASE("SB2 with gamma 1 filters the noisy image with the second stage") {
  const Image noisy = textured(10, 4, 40.0);
  Sb2Config cfg{5, 0.8, 0.6, 0.4, 0.3, 6, 9, 1.0, 60};
  CHECK(denoise_nlm_sb2(noisy, cfg) == denoise_nlm_sb(noisy, 5, 0.6, 0.3, 9, 60));
}

TEST_CASE("outputs stay within the input range up to truncation slack") {
  const Image noisy = textured(12, 6, 60.0);
  const auto px = noisy.pixels();
  const double lo = *std::min_element(px.begin(), px.end());
  const double hi = *std::max_element(px.begin(), px.end());
  const FilterSpec spec{FilterKind::kSlantedButterworth, 0.3, 15};
  const auto e = cheb_coefficients(spec.as_function(), 150);
  double scalar = 0.0;
  for (int k = 0; k <= 2000; ++k) scalar = std::max(scalar, std::abs(cheb_eval_scalar(e, k / 2000.0) - spec(k / 2000.0)));
  const double slack = 5.0 * scalar * max_abs(px) * std::sqrt(double(px.size())) + 1e-9;
  for (const Image& out : {denoise_nlm(noisy, 5, 0.8), denoise_nlm_eig(noisy, 5, 0.8, 10),
                           denoise_nlm_sb(noisy, 5, 0.8, 0.3, 15)}) {
    for (double v : out.pixels()) {
      CHECK(v >= lo - slack - 1e-8);
      CHECK(v <= hi + slack + 1e-8);
    }
  }
}

TEST_CASE("pipelines are deterministic") {
  const Image noisy = textured(10, 8, 50.0);
  CHECK(denoise_nlm_sb(noisy, 5, 0.7, 0.3, 15) == denoise_nlm_sb(noisy, 5, 0.7, 0.3, 15));
  CHECK(denoise_nlm_eig(noisy, 5, 0.7, 7) == denoise_nlm_eig(noisy, 5, 0.7, 7));
  CHECK(denoise_nlm_sb2(noisy, sb2_preset(0.75)) == denoise_nlm_sb2(noisy, sb2_preset(0.75)));
}

TEST_CASE("SB2 presets and config files") {
  const auto p = sb2_preset(0.5);
  CHECK(p.p == 5);
  CHECK(p.h1 == 1.5);
  CHECK(p.h2 == 1.0);
  CHECK(p.d1 == 50);
  CHECK(p.gamma == 0.5);
  CHECK(p.N == 150);
  CHECK(sb2_preset(0.75).h1 == 1.05);
  CHECK(sb2_preset(0.75).h2 == 0.35);
  CHECK(sb2_preset(1.0).d2 == 4);
  CHECK_THROWS_AS(sb2_preset(2.0), InvalidParameter);

  std::istringstream in("# stage widths\nh1 = 0.9\n\nd2=7  # sharper\nN=80\n");
  const auto cfg = parse_sb2_config(in, p);
  CHECK(cfg.h1 == 0.9);
  CHECK(cfg.d2 == 7);
  CHECK(cfg.N == 80);
  CHECK(cfg.h2 == 1.0);

  std::istringstream unknown("alpha=1\n");
  CHECK_THROWS_AS(parse_sb2_config(unknown), InvalidParameter);
  std::istringstream bad_gamma("gamma=1.5\n");
  CHECK_THROWS_AS(parse_sb2_config(bad_gamma), InvalidParameter);
  std::istringstream bad_value("h1=wide\n");
  CHECK_THROWS_AS(parse_sb2_config(bad_value), InvalidParameter);
  std::istringstream no_eq("h1 0.5\n");
  CHECK_THROWS_AS(parse_sb2_config(no_eq), InvalidParameter);
  std::istringstream even("p=4\n");
  CHECK_THROWS_AS(parse_sb2_config(even), InvalidParameter);
  CHECK_THROWS_AS(load_sb2_config("/nonexistent/sb2.cfg"), IoError);
}
