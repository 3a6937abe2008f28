#include "bogwatch/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "bogwatch/error.hpp"

namespace bogwatch::forecast {

namespace {

constexpr double kSampleSpacing = 0.5;

struct SliceReading {
  double mean = 0.0;
  double inside_fraction = 0.0;
};

bool usable(const Raster& prob, const Raster* field, double x, double y) {
  if (!(x >= 0.0 && y >= 0.0 && x <= prob.width() - 1 && y <= prob.height() - 1)) return false;
  if (field == nullptr) return true;
  return field->at(static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y))) >= 0.5f;
}

SliceReading read_rect(const Raster& prob, const Raster* field, Pixel center, Vec2 axis,
                       double thickness, double width) {
  const Vec2 across{-axis.y, axis.x};
  const int n_along = std::max(1, static_cast<int>(std::ceil(thickness / kSampleSpacing)));
  const int n_across = std::max(1, static_cast<int>(std::ceil(width / kSampleSpacing)));
  double sum = 0.0;
  int inside = 0;
  for (int i = 0; i < n_along; ++i) {
    const double a = ((i + 0.5) / n_along - 0.5) * thickness;
    for (int j = 0; j < n_across; ++j) {
      const double b = ((j + 0.5) / n_across - 0.5) * width;
      const double x = center.x + a * axis.x + b * across.x;
      const double y = center.y + a * axis.y + b * across.y;
      if (!usable(prob, field, x, y)) continue;
      sum += imaging::sample_bilinear(prob, x, y);
      ++inside;
    }
  }
  const int total = n_along * n_across;
  if (inside == 0) return {0.0, 0.0};
  return {sum / inside, static_cast<double>(inside) / total};
}

SliceReading read_disc(const Raster& prob, const Raster* field, Pixel center, double radius) {
  const int n = std::max(1, static_cast<int>(std::ceil(2.0 * radius / kSampleSpacing)));
  double sum = 0.0;
  int inside = 0;
  int total = 0;
  for (int i = 0; i < n; ++i) {
    const double a = ((i + 0.5) / n - 0.5) * 2.0 * radius;
    for (int j = 0; j < n; ++j) {
      const double b = ((j + 0.5) / n - 0.5) * 2.0 * radius;
      if (a * a + b * b > radius * radius) continue;
      ++total;
      if (!usable(prob, field, center.x + a, center.y + b)) continue;
      sum += imaging::sample_bilinear(prob, center.x + a, center.y + b);
      ++inside;
    }
  }
  if (total == 0) {
    // Radius below the sample spacing: read the centre only.
    total = 1;
    if (usable(prob, field, center.x, center.y)) {
      sum = imaging::sample_bilinear(prob, center.x, center.y);
      inside = 1;
    }
  }
  if (inside == 0) return {0.0, 0.0};
  return {sum / inside, static_cast<double>(inside) / total};
}

}  // namespace

PredictionZone build_prediction_zone(std::optional<Pixel> sun_px, const GlobalMotion& gm,
                                     double horizon_s, double frame_dt_s, double width_px) {
  if (!sun_px) throw NoSunError("sun is below the horizon; no prediction zone");
  if (!(frame_dt_s > 0.0)) throw Error("build_prediction_zone: frame_dt must be positive");
  if (!(width_px > 0.0)) throw Error("build_prediction_zone: width must be positive");
  PredictionZone zone;
  zone.origin = *sun_px;
  zone.width = width_px;
  zone.speed = gm.v.norm();
  if (zone.speed < PredictionZone::kStaticSpeed) {
    zone.is_disc = true;
    return zone;
  }
  zone.axis = {-gm.v.x / zone.speed, -gm.v.y / zone.speed};
  zone.length = zone.speed * std::max(0.0, horizon_s) / frame_dt_s;
  return zone;
}

OcclusionProfile occlusion_profile(const Raster& prob, const PredictionZone& zone,
                                   const GlobalMotion& gm, int steps, const Raster* field) {
  if (steps < 1) throw Error("occlusion_profile: steps must be >= 1");
  if (prob.channels() != 1) throw ChannelError("occlusion_profile: probability map must be 1-channel");
  if (field != nullptr && !field->same_size(prob)) throw ShapeError("occlusion_profile: field mask size");

  OcclusionProfile out;
  out.occlusion.reserve(steps);
  out.confidence.reserve(steps);
  if (zone.is_disc) {
    const auto r = read_disc(prob, field, zone.origin, 0.5 * zone.width);
    out.occlusion.assign(steps, r.mean);
    out.confidence.assign(steps, std::clamp(r.inside_fraction * gm.confidence, 0.0, 1.0));
    return out;
  }

  const double thickness = std::max(1.0, zone.length / steps);
  // Carried into slices that fall completely outside the image.
  double last = read_disc(prob, field, zone.origin, 0.5 * thickness).mean;
  for (int k = 1; k <= steps; ++k) {
    const double dist = zone.length * k / steps;
    const Pixel c{zone.origin.x + dist * zone.axis.x, zone.origin.y + dist * zone.axis.y};
    const auto r = read_rect(prob, field, c, zone.axis, thickness, zone.width);
    if (r.inside_fraction > 0.0) last = r.mean;
    out.occlusion.push_back(std::clamp(last, 0.0, 1.0));
    out.confidence.push_back(std::clamp(r.inside_fraction * gm.confidence, 0.0, 1.0));
  }
  return out;
}

IrradianceSeries forecast_irradiance(const OcclusionProfile& profile,
                                     const IrradianceSeries& clear_sky, double alpha) {
  if (profile.steps() != clear_sky.size()) throw ShapeError("forecast_irradiance: length mismatch");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw RangeError("attenuation alpha must lie in [0, 1]");
  std::vector<double> values(profile.steps());
  for (std::size_t k = 0; k < values.size(); ++k) {
    values[k] = clear_sky.value(k) * (1.0 - alpha * profile.occlusion[k]);
  }
  return IrradianceSeries({clear_sky.timestamps().begin(), clear_sky.timestamps().end()},
                          std::move(values));
}

Site load_site(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError(path.string());
  try {
    nlohmann::json j;
    in >> j;
    Site s;
    s.lat_deg = j.at("lat").get<double>();
    s.lon_deg = j.at("lon").get<double>();
    if (j.contains("north_offset_deg")) s.north_offset_deg = j.at("north_offset_deg").get<double>();
    if (std::abs(s.lat_deg) > 90.0) throw ConfigError(path.string() + ": |lat| > 90");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void save_site(const std::filesystem::path& path, const Site& site) {
  nlohmann::json j;
  j["lat"] = site.lat_deg;
  j["lon"] = site.lon_deg;
  if (site.north_offset_deg) j["north_offset_deg"] = *site.north_offset_deg;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Nowcast nowcast(const Raster& prev_frame, UtcTime prev_time, const Raster& frame, UtcTime time,
                const imaging::FisheyeCamera& camera, const Site& site,
                const solar::ClearSkyModel& clear_sky, const NowcastConfig& config) {
  const double frame_dt = seconds_between(prev_time, time);
  if (!(frame_dt > 0.0)) throw OrderingError("nowcast: frames must be in increasing time order");

  imaging::FisheyeCamera cam = camera;
  if (site.north_offset_deg) {
    auto p = camera.params();
    p.north_offset_deg = *site.north_offset_deg;
    cam = imaging::FisheyeCamera::create(std::move(p));
  }

  Nowcast out;
  out.reference = time;
  out.sun = solar::sun_position(time, site.lat_deg, site.lon_deg);
  const auto sun_px = solar::sun_pixel(cam, out.sun);
  if (!sun_px) throw NoSunError("sun below horizon at " + format_utc(time));
  out.sun_px = *sun_px;

  const Raster field = cam.field_mask();
  const Raster prob_prev = clouds::restrict_to_field(clouds::cloud_probability(prev_frame, config.cloud), field);
  const Raster prob = clouds::restrict_to_field(clouds::cloud_probability(frame, config.cloud), field);

  const auto fwd = motion::lucas_kanade_flow(prev_frame, frame, config.lk);
  const auto bwd = motion::lucas_kanade_flow(frame, prev_frame, config.lk);
  auto flow = motion::consistency_check(fwd, bwd, config.consistency_tol);
  flow = motion::exclude_disc(flow, out.sun_px, config.glare_radius_px);

  const auto weights = config.weights.value_or(motion::MotionWeights::for_width(frame.width()));
  out.motion = motion::global_motion(flow, prob_prev, out.sun_px, weights);

  const double width = config.zone_width_px.value_or(0.15 * frame.width());
  out.zone = build_prediction_zone(out.sun_px, out.motion, config.horizon_s, frame_dt, width);

  const int steps = std::max(1, static_cast<int>(std::lround(config.horizon_s / config.step_s)));
  out.profile = occlusion_profile(prob, out.zone, out.motion, steps, &field);

  std::vector<UtcTime> times;
  std::vector<double> clear;
  for (int k = 1; k <= steps; ++k) {
    const double h = config.horizon_s * k / steps;
    out.horizons_s.push_back(h);
    const UtcTime t = add_seconds(time, h);
    times.push_back(t);
    clear.push_back(solar::clear_sky_irradiance(clear_sky, solar::sun_position(t, site.lat_deg, site.lon_deg)));
  }
  out.clear_sky = IrradianceSeries(std::move(times), std::move(clear));
  out.irradiance = forecast_irradiance(out.profile, out.clear_sky, config.alpha);
  return out;
}

}  // namespace bogwatch::forecast
