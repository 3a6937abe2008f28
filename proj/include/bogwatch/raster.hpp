#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bogwatch::imaging {

// Sub-pixel image coordinate. (0, 0) is the centre of the top-left pixel,
// x grows to the right (columns) and y grows downwards (rows).
struct Pixel {
  double x = 0.0;
  double y = 0.0;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  double norm() const;
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
};

/// Row-major W x H x C image of unit-interval intensities.
///
/// Writes are clamped to [0, 1] (NaN becomes 0), so every stored value
/// satisfies the unit-interval invariant.
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, int channels, float fill = 0.0f);

  /// Adopts `data`; throws ShapeError on a length mismatch and RangeError
  /// if any value lies outside [0, 1].
  static Raster from_data(int width, int height, int channels, std::vector<float> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  float at(int x, int y, int c = 0) const noexcept {
    return data_[index(x, y, c)];
  }
  void set(int x, int y, int c, float value) noexcept;
  void set(int x, int y, float value) noexcept { set(x, y, 0, value); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool same_size(const Raster& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  std::span<const float> data() const noexcept { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

/// Bilinear sample of channel `c` at a sub-pixel position; coordinates outside
/// the image are clamped to the border (replication).
double sample_bilinear(const Raster& img, double x, double y, int c = 0) noexcept;

/// Luminance as the channel mean; single-channel input is returned unchanged.
Raster to_gray(const Raster& img);

/// Per-pixel displacement field with a validity channel. Invalid pixels
/// always hold a (0, 0) displacement.
class FlowField {
 public:
  FlowField() = default;
  FlowField(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return u_.size(); }

  double u(int x, int y) const noexcept { return u_[index(x, y)]; }
  double v(int x, int y) const noexcept { return v_[index(x, y)]; }
  Vec2 at(int x, int y) const noexcept { return {u(x, y), v(x, y)}; }
  bool valid(int x, int y) const noexcept { return valid_[index(x, y)] != 0; }

  void set(int x, int y, Vec2 d, bool is_valid) noexcept;
  void invalidate(int x, int y) noexcept { set(x, y, {}, false); }

  std::size_t valid_count() const noexcept;

  /// Bilinear sample of the displacement (validity ignored), border-replicated.
  Vec2 sample(double x, double y) const noexcept;

  bool same_size(const Raster& r) const noexcept {
    return width_ == r.width() && height_ == r.height();
  }
  bool same_size(const FlowField& f) const noexcept {
    return width_ == f.width_ && height_ == f.height_;
  }

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> u_;
  std::vector<double> v_;
  std::vector<std::uint8_t> valid_;
};

}  // namespace bogwatch::imaging
