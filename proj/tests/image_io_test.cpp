#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "lrnlm/error.hpp"
#include "lrnlm/image_io.hpp"

using namespace lrnlm;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() : path(std::filesystem::temp_directory_path() / "lrnlm_io_test") {
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("quantization clamps and rounds half to even") {
  const Image img(6, 1, {-3.0, 0.5, 1.5, 2.5, 254.7, 300.0});
  CHECK(quantize_8bit(img) == std::vector<std::uint8_t>{0, 0, 2, 2, 255, 255});
  const Image unit(2, 1, {0.5, 1.0}, ValueRange::kUnit);
  CHECK(quantize_8bit(unit) == std::vector<std::uint8_t>{128, 255});
}

TEST_CASE("PGM round trip and exact bytes") {
  TempDir tmp;
  const Image img(3, 2, {0, 10, 20, 30, 40, 255});
  write_pgm(img, tmp.path / "a.pgm");
  CHECK(slurp(tmp.path / "a.pgm") == std::string("P5\n3 2\n255\n") + std::string("\x00\x0a\x14\x1e\x28\xff", 6));
  CHECK(read_image(tmp.path / "a.pgm") == img);
}

TEST_CASE("PNG round trip") {
  TempDir tmp;
  std::vector<double> px(35);
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<double>(7 * i % 256);
  const Image img(7, 5, px);
  write_image(img, tmp.path / "b.png");
  CHECK(slurp(tmp.path / "b.png").substr(1, 3) == "PNG");
  CHECK(read_image(tmp.path / "b.png") == img);
  // Signature detection ignores the extension.
  std::filesystem::copy_file(tmp.path / "b.png", tmp.path / "b.pgm");
  CHECK(read_image(tmp.path / "b.pgm") == img);
}

TEST_CASE("color PPM is converted by luma") {
  TempDir tmp;
  {
    std::ofstream out(tmp.path / "c.ppm", std::ios::binary);
    out << "P6\n2 1\n255\n";
    const unsigned char rgb[] = {255, 0, 0, 10, 20, 30};
    out.write(reinterpret_cast<const char*>(rgb), 6);
  }
  const Image img = read_image(tmp.path / "c.ppm");
  CHECK(img.width() == 2);
  CHECK(img[0] == doctest::Approx(0.299 * 255));
  CHECK(img[1] == doctest::Approx(0.299 * 10 + 0.587 * 20 + 0.114 * 30));
}

TEST_CASE("read errors") {
  TempDir tmp;
  CHECK_THROWS_AS(read_image(tmp.path / "missing.pgm"), IoError);
  {
    std::ofstream out(tmp.path / "p2.pgm");
    out << "P2\n1 1\n255\n7\n";
  }
  CHECK_THROWS_AS(read_image(tmp.path / "p2.pgm"), IoError);
  {
    std::ofstream out(tmp.path / "short.pgm", std::ios::binary);
    out << "P5\n4 4\n255\n" << "abc";
  }
  CHECK_THROWS_AS(read_image(tmp.path / "short.pgm"), IoError);
  {
    std::ofstream out(tmp.path / "deep.pgm", std::ios::binary);
    out << "P5\n1 1\n65535\n" << "ab";
  }
  CHECK_THROWS_AS(read_image(tmp.path / "deep.pgm"), IoError);
}
