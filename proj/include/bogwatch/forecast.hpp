#pragma once

#include <optional>
#include <vector>

#include "bogwatch/camera.hpp"
#include "bogwatch/cloud.hpp"
#include "bogwatch/motion.hpp"
#include "bogwatch/series.hpp"
#include "bogwatch/solar.hpp"

namespace bogwatch::forecast {

using imaging::Pixel;
using imaging::Raster;
using imaging::Vec2;
using motion::GlobalMotion;

/// Band anchored at the sun pixel and extending against the global motion.
/// Below kStaticSpeed px/frame the zone degenerates to a disc of radius
/// width / 2 centred on the sun.
struct PredictionZone {
  static constexpr double kStaticSpeed = 0.05;

  Pixel origin;
  Vec2 axis;               // unit, opposite to V; (0, 0) for a disc
  double length = 0.0;     // pixels
  double width = 0.0;      // pixels
  double speed = 0.0;      // |V|, pixels per frame
  bool is_disc = false;
};

/// Throws NoSunError when `sun_px` is empty (sun below the horizon).
PredictionZone build_prediction_zone(std::optional<Pixel> sun_px, const GlobalMotion& gm,
                                     double horizon_s, double frame_dt_s, double width_px);

struct OcclusionProfile {
  std::vector<double> occlusion;   // per step, [0, 1]
  std::vector<double> confidence;  // per step, [0, 1]

  std::size_t steps() const noexcept { return occlusion.size(); }
};

/// Mean cloud probability over the zone slice for each step k = 1..steps.
/// Slice k is centred length * k / steps along the axis, spans the zone
/// width across it and max(1, length / steps) pixels along it. Only
/// in-image (and, when `field` is given, in-field) samples count; a slice
/// with none repeats the previous reading at zero confidence.
OcclusionProfile occlusion_profile(const Raster& prob, const PredictionZone& zone,
                                   const GlobalMotion& gm, int steps,
                                   const Raster* field = nullptr);

/// I(k) = clear_sky(k) * (1 - alpha * occlusion(k)); timestamps from `clear_sky`.
IrradianceSeries forecast_irradiance(const OcclusionProfile& profile,
                                     const IrradianceSeries& clear_sky, double alpha = 0.75);

struct Site {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  std::optional<double> north_offset_deg;  // overrides the camera value when set
};

Site load_site(const std::filesystem::path& path);
void save_site(const std::filesystem::path& path, const Site& site);

struct NowcastConfig {
  clouds::CloudParams cloud;
  motion::LkParams lk;
  double consistency_tol = 1.0;
  double glare_radius_px = 0.0;
  std::optional<motion::MotionWeights> weights;  // default: sigma_d = width / 2
  double horizon_s = 1200.0;
  double step_s = 30.0;
  std::optional<double> zone_width_px;  // default: 15% of the image width
  double alpha = 0.75;
};

struct Nowcast {
  UtcTime reference{};
  solar::SunPosition sun;
  Pixel sun_px;
  GlobalMotion motion;
  PredictionZone zone;
  OcclusionProfile profile;
  IrradianceSeries clear_sky;
  IrradianceSeries irradiance;
  std::vector<double> horizons_s;
};

/// Forecast from the two most recent frames: cloud maps, LK flow with
/// forward/backward validation, global motion, zone, occlusion and
/// irradiance. The sun pixel is frozen at the reference (latest) frame.
Nowcast nowcast(const Raster& prev_frame, UtcTime prev_time, const Raster& frame, UtcTime time,
                const imaging::FisheyeCamera& camera, const Site& site,
                const solar::ClearSkyModel& clear_sky, const NowcastConfig& config);

}  // namespace bogwatch::forecast
