#include "bogwatch/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "bogwatch/error.hpp"

namespace bogwatch::imaging {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    if (mode[0] == 'r') throw MissingInputError(path.string());
    throw Error("cannot open " + path.string() + " for writing");
  }
  return f;
}

[[noreturn]] void png_fail(png_structp, png_const_charp msg) { throw Error(std::string("png: ") + msg); }
void png_warn(png_structp, png_const_charp) {}

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 8;
  std::vector<std::uint16_t> samples;
};

DecodedPng decode_png(const std::filesystem::path& path) {
  auto file = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  if (!png) throw Error("png: cannot allocate reader");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_read_struct(p, i, nullptr); }
  } guard{&png, &info};

  png_init_io(png, file.get());
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (depth == 16) png_set_swap(png);  // host-order samples on little-endian
  png_read_update_info(png, info);

  DecodedPng out;
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  std::vector<png_byte> buf(rowbytes * out.height);
  std::vector<png_bytep> rows(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = buf.data() + y * rowbytes;
  png_read_image(png, rows.data());

  const std::size_t n = static_cast<std::size_t>(out.width) * out.height * out.channels;
  out.samples.resize(n);
  if (out.bit_depth == 16) {
    for (std::size_t i = 0; i < n; ++i) {
      std::uint16_t v;
      std::memcpy(&v, buf.data() + 2 * i, 2);
      out.samples[i] = v;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = buf[i];
  }
  return out;
}

void encode_png(const std::filesystem::path& path, int width, int height, int channels, int depth,
                const std::vector<std::uint8_t>& bytes) {
  auto file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  if (!png) throw Error("png: cannot allocate writer");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_write_struct(p, i); }
  } guard{&png, &info};

  int color = PNG_COLOR_TYPE_GRAY;
  if (channels == 2) color = PNG_COLOR_TYPE_GRAY_ALPHA;
  if (channels == 3) color = PNG_COLOR_TYPE_RGB;
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, depth, color, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t rowbytes = static_cast<std::size_t>(width) * channels * (depth / 8);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(bytes.data() + y * rowbytes));
  }
  png_write_end(png, nullptr);
}

// Skips whitespace and '#' comments in a PNM header.
int read_pnm_int(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int v = 0;
  if (!(in >> v)) throw Error("pnm: malformed header");
  return v;
}

Raster read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError(path.string());
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  int channels = 0;
  bool ascii = false;
  if (magic == "P5" || magic == "P2") channels = 1;
  if (magic == "P6" || magic == "P3") channels = 3;
  ascii = magic == "P2" || magic == "P3";
  if (channels == 0) throw Error("pnm: unsupported magic in " + path.string());
  const int w = read_pnm_int(in);
  const int h = read_pnm_int(in);
  const int maxval = read_pnm_int(in);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) throw Error("pnm: bad header");
  in.get();  // single whitespace before binary data
  const std::size_t n = static_cast<std::size_t>(w) * h * channels;
  std::vector<float> data(n);
  for (std::size_t i = 0; i < n; ++i) {
    int v = 0;
    if (ascii) {
      v = read_pnm_int(in);
    } else if (maxval < 256) {
      v = in.get();
    } else {
      const int hi = in.get();
      v = (hi << 8) | in.get();
    }
    if (!in) throw Error("pnm: truncated data in " + path.string());
    data[i] = std::clamp(static_cast<float>(v) / static_cast<float>(maxval), 0.0f, 1.0f);
  }
  return Raster::from_data(w, h, channels, std::move(data));
}

std::string lower_ext(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

}  // namespace

Raster read_image(const std::filesystem::path& path) {
  const auto ext = lower_ext(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return read_pnm(path);
  DecodedPng png = decode_png(path);
  int channels = png.channels;
  // Alpha is dropped.
  const int keep = (channels == 2 || channels == 4) ? channels - 1 : channels;
  const float scale = png.bit_depth == 16 ? 1.0f / 65535.0f : 1.0f / 255.0f;
  Raster out(png.width, png.height, keep);
  for (int y = 0; y < png.height; ++y) {
    for (int x = 0; x < png.width; ++x) {
      const std::size_t base = (static_cast<std::size_t>(y) * png.width + x) * channels;
      for (int c = 0; c < keep; ++c) out.set(x, y, c, png.samples[base + c] * scale);
    }
  }
  return out;
}

void write_png(const std::filesystem::path& path, const Raster& img) {
  if (img.channels() != 1 && img.channels() != 3) throw ChannelError("write_png: need 1 or 3 channels");
  std::vector<std::uint8_t> bytes(img.data().size());
  std::transform(img.data().begin(), img.data().end(), bytes.begin(),
                 [](float v) { return static_cast<std::uint8_t>(std::lround(v * 255.0f)); });
  encode_png(path, img.width(), img.height(), img.channels(), 8, bytes);
}

void write_png16(const std::filesystem::path& path, int width, int height, int channels,
                 const std::vector<std::uint16_t>& samples) {
  if (channels != 1 && channels != 2) throw ChannelError("write_png16: need 1 or 2 channels");
  if (samples.size() != static_cast<std::size_t>(width) * height * channels) {
    throw ShapeError("write_png16: sample count mismatch");
  }
  std::vector<std::uint8_t> bytes(samples.size() * 2);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    bytes[2 * i] = static_cast<std::uint8_t>(samples[i] >> 8);  // PNG is big-endian
    bytes[2 * i + 1] = static_cast<std::uint8_t>(samples[i] & 0xff);
  }
  encode_png(path, width, height, channels, 16, bytes);
}

Png16 read_png16(const std::filesystem::path& path) {
  DecodedPng png = decode_png(path);
  if (png.bit_depth != 16) throw Error("read_png16: " + path.string() + " is not 16-bit");
  return {png.width, png.height, png.channels, std::move(png.samples)};
}

Raster quantize8(const Raster& img) {
  std::vector<float> data(img.data().begin(), img.data().end());
  for (float& v : data) v = static_cast<float>(std::lround(v * 255.0f)) / 255.0f;
  return Raster::from_data(img.width(), img.height(), img.channels(), std::move(data));
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw MissingInputError(dir.string());
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = lower_ext(entry.path());
    if (ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace bogwatch::imaging
