#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "bogwatch/raster.hpp"

namespace bogwatch::imaging {

/// Reads an 8-bit (or 16-bit) PNG, or a binary/ASCII PGM/PPM. Samples are
/// scaled to [0, 1] by the format maximum (1/255 for 8-bit files).
Raster read_image(const std::filesystem::path& path);

/// Writes a 1- or 3-channel raster as an 8-bit PNG (values rounded to 1/255).
void write_png(const std::filesystem::path& path, const Raster& img);

/// Writes raw 16-bit samples, 1 (gray) or 2 (gray+alpha) channels, interleaved.
void write_png16(const std::filesystem::path& path, int width, int height, int channels,
                 const std::vector<std::uint16_t>& samples);

struct Png16 {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint16_t> samples;
};
Png16 read_png16(const std::filesystem::path& path);

/// Rounds every sample to the nearest multiple of 1/255.
Raster quantize8(const Raster& img);

/// Image files (png, pgm, ppm, pnm) in a directory, sorted by file name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

}  // namespace bogwatch::imaging
