#include "bogwatch/camera.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "bogwatch/error.hpp"

namespace bogwatch::imaging {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double eval_poly(const std::vector<double>& coeffs, double t) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double eval_poly_derivative(const std::vector<double>& coeffs, double t) {
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 1;) acc = acc * t + static_cast<double>(i) * coeffs[i];
  return acc;
}

}  // namespace

double Direction::norm() const { return std::sqrt(east * east + north * north + up * up); }

Direction direction_from_angles(double azimuth_deg, double elevation_deg) {
  const double az = azimuth_deg * kDeg;
  const double el = elevation_deg * kDeg;
  return {std::cos(el) * std::sin(az), std::cos(el) * std::cos(az), std::sin(el)};
}

FisheyeCamera FisheyeCamera::create(FisheyeParams params) {
  if (params.image_width <= 0 || params.image_height <= 0) {
    throw ModelError("camera image size must be positive");
  }
  if (!(params.cx >= 0.0 && params.cy >= 0.0 && params.cx <= params.image_width - 1 &&
        params.cy <= params.image_height - 1)) {
    throw ModelError("principal point lies outside the image");
  }
  if (params.poly_coeffs.size() < 2) throw ModelError("poly_coeffs needs at least two terms");
  if (std::abs(params.poly_coeffs[0]) > 1e-12) {
    throw ModelError("poly_coeffs[0] must be zero so the zenith maps to the principal point");
  }
  if (!(params.theta_max_rad > 0.0 && params.theta_max_rad <= std::numbers::pi)) {
    throw ModelError("theta_max_rad must lie in (0, pi]");
  }
  // Dense derivative scan; r must be strictly increasing on [0, theta_max].
  constexpr int kSamples = 2000;
  for (int i = 0; i <= kSamples; ++i) {
    const double t = params.theta_max_rad * i / kSamples;
    if (!(eval_poly_derivative(params.poly_coeffs, t) > 0.0)) {
      throw ModelError("radial polynomial is not strictly increasing on [0, theta_max]");
    }
  }
  if (std::abs(params.affine_c - params.affine_d * params.affine_e) < 1e-12) {
    throw ModelError("affine terms are singular");
  }
  return FisheyeCamera(std::move(params));
}

FisheyeCamera FisheyeCamera::equidistant(int width, int height, double focal_px,
                                         double theta_max_rad) {
  FisheyeParams p;
  p.image_width = width;
  p.image_height = height;
  p.cx = (width - 1) / 2.0;
  p.cy = (height - 1) / 2.0;
  p.poly_coeffs = {0.0, focal_px};
  p.theta_max_rad = theta_max_rad;
  return create(std::move(p));
}

FisheyeCamera FisheyeCamera::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError(path.string());
  nlohmann::json j;
  try {
    in >> j;
    FisheyeParams p;
    p.image_width = j.at("image_width").get<int>();
    p.image_height = j.at("image_height").get<int>();
    p.cx = j.at("cx").get<double>();
    p.cy = j.at("cy").get<double>();
    p.poly_coeffs = j.at("poly_coeffs").get<std::vector<double>>();
    p.theta_max_rad = j.at("theta_max_rad").get<double>();
    if (j.contains("affine")) {
      const auto& a = j.at("affine");
      p.affine_c = a.value("c", 1.0);
      p.affine_d = a.value("d", 0.0);
      p.affine_e = a.value("e", 0.0);
    }
    p.north_offset_deg = j.value("north_offset_deg", 0.0);
    return create(std::move(p));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void FisheyeCamera::save(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["image_width"] = params_.image_width;
  j["image_height"] = params_.image_height;
  j["cx"] = params_.cx;
  j["cy"] = params_.cy;
  j["poly_coeffs"] = params_.poly_coeffs;
  j["theta_max_rad"] = params_.theta_max_rad;
  j["affine"] = {{"c", params_.affine_c}, {"d", params_.affine_d}, {"e", params_.affine_e}};
  j["north_offset_deg"] = params_.north_offset_deg;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

double FisheyeCamera::radius(double theta) const { return eval_poly(params_.poly_coeffs, theta); }

double FisheyeCamera::theta_for_radius(double r) const {
  double lo = 0.0;
  double hi = params_.theta_max_rad;
  if (r <= 0.0) return 0.0;
  if (r >= radius(hi)) return hi;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (radius(mid) < r ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Vec2 FisheyeCamera::ideal_offset(Pixel p) const {
  // Solve [c d; e 1] * (x', y') = (dx, dy).
  const double dx = p.x - params_.cx;
  const double dy = p.y - params_.cy;
  const double det = params_.affine_c - params_.affine_d * params_.affine_e;
  return {(dx - params_.affine_d * dy) / det, (params_.affine_c * dy - params_.affine_e * dx) / det};
}

bool FisheyeCamera::in_field(Pixel p) const {
  if (!(p.x >= 0.0 && p.y >= 0.0 && p.x <= width() - 1 && p.y <= height() - 1)) return false;
  return ideal_offset(p).norm() <= radius(params_.theta_max_rad);
}

Raster FisheyeCamera::field_mask() const {
  Raster m(width(), height(), 1);
  for (int y = 0; y < height(); ++y) {
    for (int x = 0; x < width(); ++x) m.set(x, y, in_field({double(x), double(y)}) ? 1.0f : 0.0f);
  }
  return m;
}

Direction FisheyeCamera::pixel_to_ray(Pixel p) const {
  if (!in_field(p)) throw OutOfFieldError("pixel outside the camera field of view");
  const Vec2 off = ideal_offset(p);
  const double r = off.norm();
  const double theta = theta_for_radius(r);
  // Image-frame azimuth: 0 towards -y, 90 degrees towards +x.
  const double psi = r > 0.0 ? std::atan2(off.x, -off.y) : 0.0;
  const double az = psi + params_.north_offset_deg * kDeg;
  return {std::sin(theta) * std::sin(az), std::sin(theta) * std::cos(az), std::cos(theta)};
}

std::optional<Pixel> FisheyeCamera::ray_to_pixel(Direction d) const {
  if (std::abs(d.norm() - 1.0) > 1e-6) throw InvalidDirectionError("direction is not unit-norm");
  const double horizontal = std::hypot(d.east, d.north);
  const double theta = std::atan2(horizontal, d.up);
  if (theta > params_.theta_max_rad) return std::nullopt;
  const double r = radius(theta);
  const double psi = std::atan2(d.east, d.north) - params_.north_offset_deg * kDeg;
  const double xi = r * std::sin(psi);
  const double yi = -r * std::cos(psi);
  return Pixel{params_.cx + params_.affine_c * xi + params_.affine_d * yi,
               params_.cy + params_.affine_e * xi + yi};
}

Raster warp(const Raster& img, const FlowField& flow) {
  if (!flow.same_size(img)) throw ShapeError("warp: flow and image dimensions differ");
  Raster out(img.width(), img.height(), img.channels());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double sx = x + flow.u(x, y);
      const double sy = y + flow.v(x, y);
      for (int c = 0; c < img.channels(); ++c) {
        out.set(x, y, c, static_cast<float>(sample_bilinear(img, sx, sy, c)));
      }
    }
  }
  return out;
}

}  // namespace bogwatch::imaging
