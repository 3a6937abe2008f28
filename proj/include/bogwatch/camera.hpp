#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "bogwatch/raster.hpp"

namespace bogwatch::imaging {

/// Local sky direction: east, north, up components.
struct Direction {
  double east = 0.0;
  double north = 0.0;
  double up = 1.0;

  double norm() const;
};

/// Unit direction for a sky point given azimuth (degrees clockwise from
/// north) and elevation (degrees above the horizon).
Direction direction_from_angles(double azimuth_deg, double elevation_deg);

struct FisheyeParams {
  int image_width = 0;
  int image_height = 0;
  double cx = 0.0;
  double cy = 0.0;
  // r(theta) = sum_i poly_coeffs[i] * theta^i, pixels; poly_coeffs[0] must be 0.
  std::vector<double> poly_coeffs;
  double theta_max_rad = 0.0;
  // OCamCalib-style affine [c d; e 1] applied to the ideal image-plane offset.
  double affine_c = 1.0;
  double affine_d = 0.0;
  double affine_e = 0.0;
  // Azimuth that appears along image "up" (-y). Image +x is 90 degrees clockwise from it.
  double north_offset_deg = 0.0;
};

/// Omnidirectional camera with a radial polynomial r(theta).
///
/// Camera up is the local zenith. With north_offset_deg = 0 north lies
/// towards the top of the image and east towards +x.
class FisheyeCamera {
 public:
  /// Validates the parameters (monotone r on [0, theta_max], r(0) = 0,
  /// principal point inside the image, invertible affine). Throws ModelError.
  static FisheyeCamera create(FisheyeParams params);

  /// Pure equidistant lens r = f * theta, centred in the image.
  static FisheyeCamera equidistant(int width, int height, double focal_px, double theta_max_rad);

  static FisheyeCamera load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  const FisheyeParams& params() const noexcept { return params_; }
  int width() const noexcept { return params_.image_width; }
  int height() const noexcept { return params_.image_height; }
  Pixel principal_point() const noexcept { return {params_.cx, params_.cy}; }

  double radius(double theta) const;
  /// Inverse of r(theta) by bisection to 1e-9 rad; theta clamped to [0, theta_max].
  double theta_for_radius(double r) const;

  /// Throws OutOfFieldError outside the image or beyond theta_max.
  Direction pixel_to_ray(Pixel p) const;
  /// nullopt marks a direction below the field of view. Throws
  /// InvalidDirectionError when |d| deviates from 1 by more than 1e-6.
  std::optional<Pixel> ray_to_pixel(Direction d) const;

  bool in_field(Pixel p) const;
  /// 1 for in-field pixels, 0 elsewhere.
  Raster field_mask() const;

 private:
  explicit FisheyeCamera(FisheyeParams params) : params_(std::move(params)) {}

  // Ideal (pre-affine) offset from the principal point.
  Vec2 ideal_offset(Pixel p) const;

  FisheyeParams params_;
};

/// Backward warp: out(q) = bilinear sample of img at q + flow(q), border replicated.
Raster warp(const Raster& img, const FlowField& flow);

}  // namespace bogwatch::imaging
