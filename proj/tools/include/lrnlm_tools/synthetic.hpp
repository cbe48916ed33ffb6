#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lrnlm/image.hpp"

namespace lrnlm::tools {

struct NamedImage {
  std::string name;
  Image image;
};

/// Square checkerboard with block side `block`, levels 50 and 200.
Image checkerboard(std::size_t side, std::size_t block);

/// White noise blurred by a separable Gaussian of width `blur` pixels,
/// then stretched to [0, 255].
Image filtered_noise(std::size_t side, double blur, std::uint64_t seed);

/// Piecewise-constant scene: a flat background with six discs and
/// rectangles at random positions and levels.
Image cartoon(std::size_t side, std::uint64_t seed);

/// The default synthetic test set: two checkerboards, two filtered-noise
/// textures and two cartoon scenes. `seed` varies the random images.
std::vector<NamedImage> synthetic_test_set(std::size_t side = 60, std::uint64_t seed = 1);

}  // namespace lrnlm::tools
