#include "lrnlm/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lrnlm/error.hpp"

namespace lrnlm {

double range_max(ValueRange range) { return range == ValueRange::kUnit ? 1.0 : 255.0; }

Image::Image(std::size_t width, std::size_t height, std::vector<double> pixels,
             ValueRange range)
    : width_(width), height_(height), pixels_(std::move(pixels)), range_(range) {
  if (width_ == 0 || height_ == 0) {
    throw InvalidParameter("image dimensions must be at least 1x1");
  }
  if (pixels_.size() != width_ * height_) {
    throw InvalidParameter("pixel count " + std::to_string(pixels_.size()) +
                           " does not match " + std::to_string(width_) + "x" +
                           std::to_string(height_));
  }
  for (double v : pixels_) {
    if (!std::isfinite(v)) throw InvalidParameter("image contains non-finite intensities");
  }
}

Image Image::filled(std::size_t width, std::size_t height, double value, ValueRange range) {
  return Image(width, height, std::vector<double>(width * height, value), range);
}

Image Image::with_pixels(std::vector<double> pixels) const {
  return Image(width_, height_, std::move(pixels), range_);
}

GaussianSampler::GaussianSampler(std::uint64_t seed) : engine_(seed) {}

double GaussianSampler::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianSampler::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - u lies in (0, 1], keeping the logarithm finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Image add_gaussian_noise(const Image& img, const NoiseModel& noise) {
  if (!std::isfinite(noise.sigma) || noise.sigma < 0.0) {
    throw InvalidParameter("noise sigma must be finite and non-negative");
  }
  std::vector<double> out(img.pixels().begin(), img.pixels().end());
  if (noise.sigma == 0.0) return img.with_pixels(std::move(out));
  GaussianSampler sampler(noise.seed);
  for (double& v : out) v += noise.sigma * sampler.next();
  return img.with_pixels(std::move(out));
}

double intensity_stddev(const Image& img) {
  const auto px = img.pixels();
  double mean = 0.0;
  for (double v : px) mean += v;
  mean /= static_cast<double>(px.size());
  double ss = 0.0;
  for (double v : px) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(px.size()));
}

double sigma_for_snr(const Image& img, double snr) {
  if (!(snr > 0.0) || !std::isfinite(snr)) throw InvalidParameter("snr must be positive");
  if (img.size() < 2) throw DegenerateInput("SNR needs an image with at least 2 pixels");
  const double sd = intensity_stddev(img);
  if (sd == 0.0) throw DegenerateInput("constant image has zero intensity spread");
  return sd / snr;
}

double psnr(const Image& a, const Image& b, PsnrMode mode) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionMismatch("psnr: image dimensions differ");
  }
  if (a.range() != b.range()) throw DimensionMismatch("psnr: declared ranges differ");
  const double scale = 255.0 / range_max(a.range());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = (a[i] - b[i]) * scale;
    sum += diff * diff;
  }
  if (sum == 0.0) return std::numeric_limits<double>::infinity();
  const double err = mode == PsnrMode::kStandard ? sum / static_cast<double>(a.size()) : sum;
  return 20.0 * std::log10(255.0 / std::sqrt(err));
}

std::ptrdiff_t mirror_index(std::ptrdiff_t i, std::ptrdiff_t n) {
  if (n == 1) return 0;
  const std::ptrdiff_t period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

std::vector<double> extract_patch_vector(const Image& img, std::size_t index,
                                         std::size_t patch) {
  if (patch == 0 || patch % 2 == 0) {
    throw InvalidParameter("patch side must be odd and positive, got " + std::to_string(patch));
  }
  if (index >= img.size()) throw InvalidParameter("pixel index outside image");
  const auto w = static_cast<std::ptrdiff_t>(img.width());
  const auto h = static_cast<std::ptrdiff_t>(img.height());
  const auto cx = static_cast<std::ptrdiff_t>(index % img.width());
  const auto cy = static_cast<std::ptrdiff_t>(index / img.width());
  const auto r = static_cast<std::ptrdiff_t>(patch / 2);
  std::vector<double> out;
  out.reserve(patch * patch);
  for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
    const auto y = static_cast<std::size_t>(mirror_index(cy + dy, h));
    for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
      const auto x = static_cast<std::size_t>(mirror_index(cx + dx, w));
      out.push_back(img.at(x, y));
    }
  }
  return out;
}

namespace {

double keys_kernel(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

struct Taps {
  std::ptrdiff_t first;
  double weights[4];
};

// Source sample positions and weights for each output coordinate.
std::vector<Taps> resize_taps(std::size_t in, std::size_t out) {
  std::vector<Taps> taps(out);
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  for (std::size_t o = 0; o < out; ++o) {
    const double src = (static_cast<double>(o) + 0.5) * scale - 0.5;
    const double base = std::floor(src);
    taps[o].first = static_cast<std::ptrdiff_t>(base) - 1;
    for (int k = 0; k < 4; ++k) {
      taps[o].weights[k] = keys_kernel(src - (base - 1.0 + k));
    }
  }
  return taps;
}

}  // namespace

Image resize_bicubic(const Image& img, std::size_t new_width, std::size_t new_height) {
  if (new_width == 0 || new_height == 0) throw InvalidParameter("resize target must be >= 1x1");
  const auto w = static_cast<std::ptrdiff_t>(img.width());
  const auto h = static_cast<std::ptrdiff_t>(img.height());
  const auto xt = resize_taps(img.width(), new_width);
  const auto yt = resize_taps(img.height(), new_height);

  // Separable: horizontal pass into (new_width x height), then vertical.
  std::vector<double> tmp(new_width * img.height());
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < new_width; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) {
        const auto sx = mirror_index(xt[x].first + k, w);
        acc += xt[x].weights[k] * img.at(static_cast<std::size_t>(sx), static_cast<std::size_t>(y));
      }
      tmp[static_cast<std::size_t>(y) * new_width + x] = acc;
    }
  }
  std::vector<double> out(new_width * new_height);
  for (std::size_t y = 0; y < new_height; ++y) {
    for (std::size_t x = 0; x < new_width; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) {
        const auto sy = static_cast<std::size_t>(mirror_index(yt[y].first + k, h));
        acc += yt[y].weights[k] * tmp[sy * new_width + x];
      }
      out[y * new_width + x] = acc;
    }
  }
  return Image(new_width, new_height, std::move(out), img.range());
}

std::vector<double> normalized_intensities(const Image& img) {
  const double m = range_max(img.range());
  std::vector<double> out(img.pixels().begin(), img.pixels().end());
  for (double& v : out) v /= m;
  return out;
}

}  // namespace lrnlm
