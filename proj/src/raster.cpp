#include "gw/raster.hpp"

#include <cmath>

namespace gw {

namespace {

int stroke_for(int size, int requested) {
  if (requested > 0) return requested;
  return std::max(1, static_cast<int>(std::lround(size / 64.0)));
}

void stamp(RasterImage& img, int x, int y, Rgb color, int stroke) {
  if (stroke == 1) {
    if (x >= 0 && y >= 0 && x < img.width && y < img.height) img.set(x, y, color);
    return;
  }
  int lo = -(stroke - 1) / 2, hi = stroke / 2;
  for (int dy = lo; dy <= hi; ++dy)
    for (int dx = lo; dx <= hi; ++dx) {
      int px = x + dx, py = y + dy;
      if (px >= 0 && py >= 0 && px < img.width && py < img.height)
        img.set(px, py, color);
    }
}

void bresenham(RasterImage& img, int x0, int y0, int x1, int y1, Rgb color, int stroke) {
  int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    stamp(img, x0, y0, color, stroke);
    if (x0 == x1 && y0 == y1) break;
    int e2 = 2 * err;
    if (e2 >= dy) { err += dy; x0 += sx; }
    if (e2 <= dx) { err += dx; y0 += sy; }
  }
}

void check_bounds(const FigureGeometry& geom, int size) {
  auto ok = [size](const Vec2& p) {
    return p.x() >= 0.0 && p.y() >= 0.0 && p.x() < double(size) && p.y() < double(size);
  };
  for (const auto& s : geom.segments)
    if (!ok(s.a) || !ok(s.b)) throw OutOfCanvas("segment endpoint outside canvas");
  for (const auto& v : geom.ring)
    if (!ok(v)) throw OutOfCanvas("ring vertex outside canvas");
}

void draw_hard(RasterImage& img, const FigureGeometry& geom, Rgb color, int stroke) {
  auto px = [](double v) { return static_cast<int>(std::lround(v)); };
  for (const auto& s : geom.segments)
    bresenham(img, px(s.a.x()), px(s.a.y()), px(s.b.x()), px(s.b.y()), color, stroke);
  const auto& ring = geom.ring;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Vec2& a = ring[i];
    const Vec2& b = ring[(i + 1) % ring.size()];
    bresenham(img, px(a.x()), px(a.y()), px(b.x()), px(b.y()), color, stroke);
  }
}

}  // namespace

void draw_segment(RasterImage& img, const Vec2& a, const Vec2& b, Rgb color, int stroke) {
  auto px = [](double v) { return static_cast<int>(std::lround(v)); };
  bresenham(img, px(a.x()), px(a.y()), px(b.x()), px(b.y()), color, stroke);
}

RasterImage rasterize_figure(const FigureGeometry& geom, Rgb color, int size,
                             const RasterParams& params) {
  if (size < 1) throw std::invalid_argument("rasterize_figure: size must be positive");
  check_bounds(geom, size);
  const int stroke = stroke_for(size, params.stroke);

  if (!params.antialias) {
    RasterImage img(size, size, params.background);
    draw_hard(img, geom, color, stroke);
    return img;
  }

  // 2x supersample then box-filter down; edge pixels blend toward background.
  RasterImage hi(size * 2, size * 2, params.background);
  FigureGeometry scaled_geom = geom;
  for (auto& s : scaled_geom.segments) { s.a *= 2.0; s.b *= 2.0; }
  for (auto& v : scaled_geom.ring) v *= 2.0;
  draw_hard(hi, scaled_geom, color, stroke * 2);

  RasterImage img(size, size, params.background);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      int r = 0, g = 0, b = 0;
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
          Rgb c = hi.at(2 * x + dx, 2 * y + dy);
          r += c.r; g += c.g; b += c.b;
        }
      img.set(x, y, {std::uint8_t(r / 4), std::uint8_t(g / 4), std::uint8_t(b / 4)});
    }
  return img;
}

RasterImage image_roundtrip(const RasterImage& img) { return decode_png(encode_png(img)); }

}  // namespace gw
