#include "bogwatch/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bogwatch/error.hpp"

namespace bogwatch::imaging {

double Vec2::norm() const { return std::hypot(x, y); }

Raster::Raster(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 0 || height < 0 || channels < 1) {
    throw ShapeError("raster dimensions must be non-negative with at least one channel");
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, std::clamp(fill, 0.0f, 1.0f));
}

Raster Raster::from_data(int width, int height, int channels, std::vector<float> data) {
  Raster r(width, height, channels);
  if (data.size() != r.data_.size()) {
    throw ShapeError("raster data length " + std::to_string(data.size()) + " != " +
                     std::to_string(r.data_.size()));
  }
  for (float v : data) {
    if (!(v >= 0.0f && v <= 1.0f)) throw RangeError("raster intensity outside [0, 1]");
  }
  r.data_ = std::move(data);
  return r;
}

void Raster::set(int x, int y, int c, float value) noexcept {
  data_[index(x, y, c)] = std::isnan(value) ? 0.0f : std::clamp(value, 0.0f, 1.0f);
}

double sample_bilinear(const Raster& img, double x, double y, int c) noexcept {
  const int w = img.width();
  const int h = img.height();
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = (1.0 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
  const double bottom = (1.0 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
  return (1.0 - fy) * top + fy * bottom;
}

Raster to_gray(const Raster& img) {
  if (img.channels() == 1) return img;
  Raster out(img.width(), img.height(), 1);
  const float scale = 1.0f / static_cast<float>(img.channels());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      float sum = 0.0f;
      for (int c = 0; c < img.channels(); ++c) sum += img.at(x, y, c);
      out.set(x, y, sum * scale);
    }
  }
  return out;
}

FlowField::FlowField(int width, int height)
    : width_(width),
      height_(height),
      u_(static_cast<std::size_t>(width) * height, 0.0),
      v_(static_cast<std::size_t>(width) * height, 0.0),
      valid_(static_cast<std::size_t>(width) * height, 0) {
  if (width < 0 || height < 0) throw ShapeError("flow dimensions must be non-negative");
}

void FlowField::set(int x, int y, Vec2 d, bool is_valid) noexcept {
  const auto i = index(x, y);
  valid_[i] = is_valid ? 1 : 0;
  u_[i] = is_valid ? d.x : 0.0;
  v_[i] = is_valid ? d.y : 0.0;
}

std::size_t FlowField::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{1}));
}

Vec2 FlowField::sample(double x, double y) const noexcept {
  x = std::clamp(x, 0.0, static_cast<double>(width_ - 1));
  y = std::clamp(y, 0.0, static_cast<double>(height_ - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, width_ - 1);
  const int y1 = std::min(y0 + 1, height_ - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  auto lerp2 = [&](const std::vector<double>& a) {
    const double top = (1.0 - fx) * a[index(x0, y0)] + fx * a[index(x1, y0)];
    const double bottom = (1.0 - fx) * a[index(x0, y1)] + fx * a[index(x1, y1)];
    return (1.0 - fy) * top + fy * bottom;
  };
  return {lerp2(u_), lerp2(v_)};
}

}  // namespace bogwatch::imaging
