#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lrnlm/image.hpp"

namespace lrnlm {

/// Loads an 8-bit PGM (P5) or PNG as a 0-255 image. Color PNG/PPM input is
/// converted with luma weights 0.299 R + 0.587 G + 0.114 B. The format is
/// detected from the file signature, not the extension.
Image read_image(const std::filesystem::path& path);

/// Clamp to [0, 255] (after scaling unit-range images by 255) and round half
/// to even.
std::vector<std::uint8_t> quantize_8bit(const Image& img);

void write_pgm(const Image& img, const std::filesystem::path& path);
void write_png(const Image& img, const std::filesystem::path& path);

/// Dispatches on the extension (.png, otherwise PGM).
void write_image(const Image& img, const std::filesystem::path& path);

}  // namespace lrnlm
