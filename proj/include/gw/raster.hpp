#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gw/types.hpp"

namespace gw {

// 8-bit RGB canvas, row-major interleaved.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // width*height*3 bytes

  RasterImage() = default;
  RasterImage(int w, int h, Rgb fill = {0, 0, 0}) : width(w), height(h) {
    pixels.resize(std::size_t(w) * h * 3);
    for (int i = 0; i < w * h; ++i) set_index(i, fill);
  }

  Rgb at(int x, int y) const {
    std::size_t i = (std::size_t(y) * width + x) * 3;
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }
  void set(int x, int y, Rgb c) { set_index(y * width + x, c); }
  void set_index(int i, Rgb c) {
    pixels[std::size_t(i) * 3] = c.r;
    pixels[std::size_t(i) * 3 + 1] = c.g;
    pixels[std::size_t(i) * 3 + 2] = c.b;
  }
  bool operator==(const RasterImage&) const = default;
};

struct RasterParams {
  Rgb background = {0, 0, 0};
  int stroke = 0;        // 0: derive as max(1, round(size/64))
  bool antialias = false;
};

/// Renders figure geometry to a size x size image with hard-edged integer
/// strokes (midpoint/Bresenham). With antialiasing off every pixel is exactly
/// the background or the figure color. Throws OutOfCanvas when geometry
/// exceeds [0, size).
RasterImage rasterize_figure(const FigureGeometry& geom, Rgb color, int size,
                             const RasterParams& params = {});

/// Stamps one segment onto an existing image (test and exception-fixture helper).
void draw_segment(RasterImage& img, const Vec2& a, const Vec2& b, Rgb color, int stroke = 1);

/// Lossless PNG encode: color type RGB, bit depth 8, no interlacing.
std::vector<std::uint8_t> encode_png(const RasterImage& img);

/// Decodes 8-bit RGB/RGBA/grayscale PNGs (no interlacing) to RGB.
/// Throws DecodeError on malformed input.
RasterImage decode_png(const std::vector<std::uint8_t>& bytes);

void save_png(const std::filesystem::path& path, const RasterImage& img);
RasterImage load_png(const std::filesystem::path& path);

/// encode-then-decode; the result is byte-identical to the input.
RasterImage image_roundtrip(const RasterImage& img);

}  // namespace gw
