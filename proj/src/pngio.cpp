#include "gca/pngio.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "gca/errors.hpp"

namespace gca::plot {

Image::Image(std::size_t width, std::size_t height)
    : width_(width), height_(height), rgb_(width * height * 3, 0xFF) {}

void Image::set(std::size_t x, std::size_t y, std::uint8_t r, std::uint8_t g,
                std::uint8_t b) {
  if (x >= width_ || y >= height_) return;
  const std::size_t i = (y * width_ + x) * 3;
  rgb_[i] = r;
  rgb_[i + 1] = g;
  rgb_[i + 2] = b;
}

void Image::fill_rect(std::size_t x, std::size_t y, std::size_t w, std::size_t h,
                      std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  for (std::size_t yy = y; yy < y + h; ++yy)
    for (std::size_t xx = x; xx < x + w; ++xx) set(xx, yy, r, g, b);
}

void Image::line(int x0, int y0, int x1, int y1, std::uint8_t r, std::uint8_t g,
                 std::uint8_t b) {
  const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (x0 >= 0 && y0 >= 0) set(std::size_t(x0), std::size_t(y0), r, g, b);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

namespace {

void put_be32(std::vector<std::uint8_t>& v, std::uint32_t x) {
  v.push_back(std::uint8_t(x >> 24));
  v.push_back(std::uint8_t(x >> 16));
  v.push_back(std::uint8_t(x >> 8));
  v.push_back(std::uint8_t(x));
}

void write_chunk(std::ofstream& out, const char type[4],
                 const std::vector<std::uint8_t>& payload) {
  std::vector<std::uint8_t> head;
  put_be32(head, std::uint32_t(payload.size()));
  out.write(reinterpret_cast<const char*>(head.data()), 4);
  out.write(type, 4);
  if (!payload.empty())
    out.write(reinterpret_cast<const char*>(payload.data()), std::streamsize(payload.size()));
  std::uint32_t crc = crc32(0, reinterpret_cast<const Bytef*>(type), 4);
  if (!payload.empty()) crc = crc32(crc, payload.data(), uInt(payload.size()));
  std::vector<std::uint8_t> tail;
  put_be32(tail, crc);
  out.write(reinterpret_cast<const char*>(tail.data()), 4);
}

}  // namespace

void write_png(const std::string& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  out.write(reinterpret_cast<const char*>(sig), 8);

  std::vector<std::uint8_t> ihdr;
  put_be32(ihdr, std::uint32_t(img.width()));
  put_be32(ihdr, std::uint32_t(img.height()));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // truecolor
  ihdr.push_back(0);   // deflate
  ihdr.push_back(0);   // filter method
  ihdr.push_back(0);   // no interlace
  write_chunk(out, "IHDR", ihdr);

  // scanlines, each prefixed with filter byte 0
  const std::size_t stride = img.width() * 3;
  std::vector<std::uint8_t> raw((stride + 1) * img.height());
  for (std::size_t y = 0; y < img.height(); ++y) {
    raw[y * (stride + 1)] = 0;
    std::memcpy(&raw[y * (stride + 1) + 1], &img.pixels()[y * stride], stride);
  }
  uLongf bound = compressBound(uLong(raw.size()));
  std::vector<std::uint8_t> idat(bound);
  if (compress2(idat.data(), &bound, raw.data(), uLong(raw.size()), 6) != Z_OK)
    throw IoError("png deflate failed for " + path);
  idat.resize(bound);
  write_chunk(out, "IDAT", idat);
  write_chunk(out, "IEND", {});
  if (!out) throw IoError("png write failed: " + path);
}

std::pair<std::size_t, std::size_t> read_png_size(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::uint8_t head[24];
  in.read(reinterpret_cast<char*>(head), 24);
  if (!in || head[1] != 'P' || head[2] != 'N' || head[3] != 'G')
    throw IoError("not a png: " + path);
  auto be32 = [&](std::size_t off) {
    return (std::size_t(head[off]) << 24) | (std::size_t(head[off + 1]) << 16) |
           (std::size_t(head[off + 2]) << 8) | std::size_t(head[off + 3]);
  };
  return {be32(16), be32(20)};
}

}  // namespace gca::plot
