#include <zlib.h>

#include <cstring>
#include <fstream>

#include "gw/raster.hpp"

// Minimal PNG codec over zlib. Encoding is pinned to one representation
// (color type 2, bit depth 8, filter 0 rows, single IDAT, compression level 6)
// so identical images always produce identical files. Decoding accepts 8-bit
// gray / RGB / RGBA, no interlacing, any standard row filter.

namespace gw {

namespace {

const std::uint8_t kSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v >> 24));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& data) {
  put_u32(out, std::uint32_t(data.size()));
  std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  std::uint32_t crc = ::crc32(0, out.data() + crc_start, uInt(out.size() - crc_start));
  put_u32(out, crc);
}

int paeth(int a, int b, int c) {
  int p = a + b - c;
  int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const RasterImage& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.pixels.size() != std::size_t(img.width) * img.height * 3)
    throw Error("encode_png: invalid image");

  std::vector<std::uint8_t> raw;
  raw.reserve(std::size_t(img.height) * (1 + std::size_t(img.width) * 3));
  for (int y = 0; y < img.height; ++y) {
    raw.push_back(0);  // filter: none
    const std::uint8_t* row = img.pixels.data() + std::size_t(y) * img.width * 3;
    raw.insert(raw.end(), row, row + std::size_t(img.width) * 3);
  }

  uLongf bound = compressBound(uLong(raw.size()));
  std::vector<std::uint8_t> compressed(bound);
  if (compress2(compressed.data(), &bound, raw.data(), uLong(raw.size()), 6) != Z_OK)
    throw Error("encode_png: deflate failed");
  compressed.resize(bound);

  std::vector<std::uint8_t> out(kSignature, kSignature + 8);
  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, std::uint32_t(img.width));
  put_u32(ihdr, std::uint32_t(img.height));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // color type: truecolor
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter method
  ihdr.push_back(0);   // no interlace
  append_chunk(out, "IHDR", ihdr);
  append_chunk(out, "IDAT", compressed);
  append_chunk(out, "IEND", {});
  return out;
}

RasterImage decode_png(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kSignature, 8) != 0)
    throw DecodeError("bad PNG signature");

  std::size_t pos = 8;
  std::uint32_t width = 0, height = 0;
  int color_type = -1;
  bool saw_ihdr = false, saw_iend = false;
  std::vector<std::uint8_t> idat;

  while (pos + 12 <= bytes.size()) {
    std::uint32_t len = read_u32(bytes.data() + pos);
    if (pos + 12 + std::size_t(len) > bytes.size()) throw DecodeError("truncated chunk");
    const char* type = reinterpret_cast<const char*>(bytes.data() + pos + 4);
    const std::uint8_t* data = bytes.data() + pos + 8;
    std::uint32_t stored_crc = read_u32(data + len);
    std::uint32_t crc = ::crc32(0, bytes.data() + pos + 4, uInt(len + 4));
    if (crc != stored_crc) throw DecodeError("chunk CRC mismatch");

    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) throw DecodeError("bad IHDR length");
      width = read_u32(data);
      height = read_u32(data + 4);
      int bit_depth = data[8];
      color_type = data[9];
      if (bit_depth != 8) throw DecodeError("unsupported bit depth");
      if (color_type != 0 && color_type != 2 && color_type != 6)
        throw DecodeError("unsupported color type");
      if (data[12] != 0) throw DecodeError("interlaced PNG not supported");
      saw_ihdr = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), data, data + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      saw_iend = true;
      break;
    }
    pos += 12 + len;
  }
  if (!saw_ihdr || !saw_iend || idat.empty()) throw DecodeError("missing chunks");
  if (width == 0 || height == 0 || width > 1u << 20 || height > 1u << 20)
    throw DecodeError("bad dimensions");

  const int channels = color_type == 2 ? 3 : (color_type == 6 ? 4 : 1);
  const std::size_t stride = std::size_t(width) * channels;
  std::vector<std::uint8_t> raw(height * (stride + 1));
  uLongf raw_len = uLongf(raw.size());
  if (uncompress(raw.data(), &raw_len, idat.data(), uLong(idat.size())) != Z_OK ||
      raw_len != raw.size())
    throw DecodeError("inflate failed");

  // Undo per-row filters in place, then expand to RGB.
  std::vector<std::uint8_t> prev(stride, 0);
  RasterImage img{int(width), int(height)};
  for (std::uint32_t y = 0; y < height; ++y) {
    std::uint8_t* row = raw.data() + std::size_t(y) * (stride + 1);
    int filter = row[0];
    std::uint8_t* cur = row + 1;
    for (std::size_t i = 0; i < stride; ++i) {
      int a = i >= std::size_t(channels) ? cur[i - channels] : 0;
      int b = prev[i];
      int c = i >= std::size_t(channels) ? prev[i - channels] : 0;
      int x = cur[i];
      switch (filter) {
        case 0: break;
        case 1: x += a; break;
        case 2: x += b; break;
        case 3: x += (a + b) / 2; break;
        case 4: x += paeth(a, b, c); break;
        default: throw DecodeError("unknown row filter");
      }
      cur[i] = std::uint8_t(x);
    }
    std::memcpy(prev.data(), cur, stride);
    for (std::uint32_t x = 0; x < width; ++x) {
      Rgb px;
      if (channels == 1) px = {cur[x], cur[x], cur[x]};
      else px = {cur[x * channels], cur[x * channels + 1], cur[x * channels + 2]};
      img.set(int(x), int(y), px);
    }
  }
  return img;
}

void save_png(const std::filesystem::path& path, const RasterImage& img) {
  auto bytes = encode_png(img);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for write: " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!f) throw Error("write failed: " + path.string());
}

RasterImage load_png(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return decode_png(bytes);
}

}  // namespace gw
