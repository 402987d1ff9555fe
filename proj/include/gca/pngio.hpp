#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gca::plot {

// Small RGB raster with the few drawing primitives the plots need.
class Image {
 public:
  Image(std::size_t width, std::size_t height);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  const std::vector<std::uint8_t>& pixels() const { return rgb_; }

  void set(std::size_t x, std::size_t y, std::uint8_t r, std::uint8_t g, std::uint8_t b);
  void fill_rect(std::size_t x, std::size_t y, std::size_t w, std::size_t h,
                 std::uint8_t r, std::uint8_t g, std::uint8_t b);
  void line(int x0, int y0, int x1, int y1, std::uint8_t r, std::uint8_t g,
            std::uint8_t b);

 private:
  std::size_t width_, height_;
  std::vector<std::uint8_t> rgb_;
};

// 8-bit truecolor PNG via zlib.
void write_png(const std::string& path, const Image& img);

// Width/height from a PNG header (dimension checks in tests).
std::pair<std::size_t, std::size_t> read_png_size(const std::string& path);

}  // namespace gca::plot
