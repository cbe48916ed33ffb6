#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace lrnlm {

/// Nominal intensity range an image was declared with.
enum class ValueRange { k255, kUnit };

/// Upper end of a declared range (255 or 1).
double range_max(ValueRange range);

/// Grayscale image: row-major 64-bit intensities with a declared nominal
/// range. Values are not clipped to the range; noisy images routinely leave
/// it. Immutable after construction except through explicit copies.
class Image {
 public:
  /// Throws InvalidParameter on zero dimensions, a size mismatch or
  /// non-finite pixels.
  Image(std::size_t width, std::size_t height, std::vector<double> pixels,
        ValueRange range = ValueRange::k255);

  /// Constant image.
  static Image filled(std::size_t width, std::size_t height, double value,
                      ValueRange range = ValueRange::k255);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  ValueRange range() const { return range_; }

  double at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }
  double operator[](std::size_t i) const { return pixels_[i]; }
  std::span<const double> pixels() const { return pixels_; }

  /// Same geometry and range, new pixel values (the COL/IMAGE round trip).
  Image with_pixels(std::vector<double> pixels) const;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> pixels_;
  ValueRange range_;
};

/// Additive white Gaussian noise parameters in intensity units.
struct NoiseModel {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Deterministic standard-normal sampler: std::mt19937_64 feeding the
/// Box-Muller transform. Both halves of each Box-Muller pair are used.
/// The output sequence is fully specified, so results are identical across
/// platforms and standard libraries.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed);
  double next();
  /// Uniform draw on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// y_i = x_i + r_i, r_i ~ N(0, sigma^2) i.i.d. Output is not clipped.
Image add_gaussian_noise(const Image& img, const NoiseModel& noise);

/// Population standard deviation of the intensities.
double intensity_stddev(const Image& img);

/// Noise level giving SNR = std(img) / sigma. Throws DegenerateInput for a
/// constant image.
double sigma_for_snr(const Image& img, double snr);

enum class PsnrMode {
  kStandard,   ///< 20 log10(255 / sqrt(mean squared error))
  kSumOfSquares  ///< 20 log10(255 / sqrt(sum of squared errors)), no 1/n
};

/// PSNR in dB on the 0-255 scale (unit-range images are scaled by 255).
/// Identical images give +infinity.
double psnr(const Image& a, const Image& b, PsnrMode mode = PsnrMode::kStandard);

/// Half-sample symmetric reflection of an index into [0, n).
std::ptrdiff_t mirror_index(std::ptrdiff_t i, std::ptrdiff_t n);

/// p x p window centered on pixel `index`, row-major, mirror padded.
std::vector<double> extract_patch_vector(const Image& img, std::size_t index,
                                         std::size_t patch);

/// Keys cubic convolution (a = -0.5), pixel-center alignment, mirror
/// boundary, no antialiasing prefilter.
Image resize_bicubic(const Image& img, std::size_t new_width, std::size_t new_height);

/// Intensities divided by the declared range maximum.
std::vector<double> normalized_intensities(const Image& img);

}  // namespace lrnlm
