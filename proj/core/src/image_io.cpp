#include "lrnlm/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cfenv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "lrnlm/error.hpp"

namespace lrnlm {
namespace {

double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

// Reads the next whitespace/comment separated header token of a PNM file.
std::string pnm_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (in) {
    if (c == '#') {
      while (in && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      if (!tok.empty()) break;
    } else {
      tok.push_back(static_cast<char>(c));
    }
    c = in.get();
  }
  return tok;
}

Image read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string magic = pnm_token(in);
  if (magic != "P5" && magic != "P6") {
    throw IoError(path.string() + ": only binary PGM (P5) and PPM (P6) are supported");
  }
  std::size_t w = 0, h = 0;
  int maxval = 0;
  try {
    w = std::stoul(pnm_token(in));
    h = std::stoul(pnm_token(in));
    maxval = std::stoi(pnm_token(in));
  } catch (const std::exception&) {
    throw IoError(path.string() + ": malformed PNM header");
  }
  if (maxval <= 0 || maxval > 255) {
    throw IoError(path.string() + ": only 8-bit PNM (maxval <= 255) is supported");
  }
  const std::size_t channels = magic == "P6" ? 3 : 1;
  std::vector<unsigned char> raw(w * h * channels);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw IoError(path.string() + ": truncated pixel data");
  }
  const double scale = 255.0 / maxval;
  std::vector<double> px(w * h);
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = channels == 1 ? raw[i] * scale
                          : luma(raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]) * scale;
  }
  return Image(w, h, std::move(px));
}

Image read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw IoError(path.string() + ": " + image.message);
  }
  // Let libpng expand palettes, strip alpha and 16-bit depth; the gray
  // conversion is done here so the luma weights are exact.
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> raw(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, raw.data(), 0, nullptr)) {
    png_image_free(&image);
    throw IoError(path.string() + ": " + image.message);
  }
  const std::size_t w = image.width, h = image.height;
  std::vector<double> px(w * h);
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = color ? luma(raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]) : raw[i];
  }
  return Image(w, h, std::move(px));
}

}  // namespace

Image read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  unsigned char sig[8] = {};
  in.read(reinterpret_cast<char*>(sig), 8);
  in.close();
  if (png_sig_cmp(sig, 0, 8) == 0) return read_png(path);
  return read_pnm(path);
}

std::vector<std::uint8_t> quantize_8bit(const Image& img) {
  const double scale = 255.0 / range_max(img.range());
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  std::vector<std::uint8_t> out(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double v = std::clamp(img[i] * scale, 0.0, 255.0);
    out[i] = static_cast<std::uint8_t>(std::nearbyint(v));
  }
  std::fesetround(saved);
  return out;
}

void write_pgm(const Image& img, const std::filesystem::path& path) {
  const auto bytes = quantize_8bit(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_png(const Image& img, const std::filesystem::path& path) {
  const auto bytes = quantize_8bit(img);
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    throw IoError(path.string() + ": " + image.message);
  }
}

void write_image(const Image& img, const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") {
    write_png(img, path);
  } else {
    write_pgm(img, path);
  }
}

}  // namespace lrnlm
