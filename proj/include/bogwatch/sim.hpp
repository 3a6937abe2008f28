#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "bogwatch/berry.hpp"
#include "bogwatch/camera.hpp"
#include "bogwatch/forecast.hpp"
#include "bogwatch/series.hpp"
#include "bogwatch/solar.hpp"
#include "bogwatch/weather.hpp"

namespace bogwatch::sim {

using imaging::Raster;
using imaging::Vec2;

/// Cloud disc advected rigidly in the image plane. Positions are pixels at
/// the scene start; velocity is pixels per second.
struct CloudDisc {
  Vec2 center;
  double radius = 30.0;
  Vec2 velocity;
  double opacity = 1.0;         // [0, 1]
  double brightness = 0.8;      // mean relative brightness
  double texture = 0.3;         // relative brightness modulation
  double appear_s = -std::numeric_limits<double>::infinity();  // fade-in start, seconds after start
  double fade_s = 0.0;
};

struct SkySpec {
  int width = 256;
  int height = 256;
  double focal_px = 100.0;     // equidistant lens
  double theta_max_rad = 1.85; // image circle covers the whole frame
  double lat_deg = 40.0;
  double lon_deg = -74.5;
  UtcTime start{};
  std::vector<CloudDisc> clouds;
  double sky_ratio = 0.5;       // (B - R) / (B + R) of clear sky
  double sky_brightness = 0.55;
  double sun_radius_px = 3.0;
  double glow = 0.35;
  double alpha = 0.75;
  double clear_scale = solar::ClearSkyModel::kDefaultScale;
  double clear_extinction = solar::ClearSkyModel::kDefaultExtinction;
  clouds::CloudParams cloud_params;  // colour model is the inverse of this map
};

struct BerryDisc {
  double x = 0.0;
  double y = 0.0;
  double radius = 8.0;
};

struct FieldTile {
  std::string name;
  double easting_m = 0.0;
  double northing_m = 0.0;
  std::vector<BerryDisc> berries;
  int true_count = 0;
};

struct FieldSpec {
  int tile_size = 160;
  std::vector<FieldTile> tiles;
};

/// y = intercept + a * irradiance + b * humidity + c * dew_point + N(0, noise_sd).
struct WeatherSpec {
  double intercept = 35.0;
  double a = 0.05;
  double b = -0.15;
  double c = 0.7;
  double noise_sd = 1.0;
  int samples = 2016;        // one week at 5 minutes
  double step_s = 300.0;
  UtcTime start{};
  double peak_irradiance = 950.0;
  double mean_temp_f = 80.0;
};

struct SimScenario {
  std::string name;
  std::uint64_t seed = 0;
  SkySpec sky;
  FieldSpec field;
  WeatherSpec weather;
};

// ------------------------------------------------------------------ sky

imaging::FisheyeCamera camera(const SkySpec& sky);
solar::ClearSkyModel clear_sky_model(const SkySpec& sky);
forecast::Site site(const SkySpec& sky);
solar::SunPosition sun_at(const SkySpec& sky, double t_s);
imaging::Pixel sun_pixel_at(const SkySpec& sky, double t_s);

/// Combined cloud opacity 1 - prod(1 - o_i) at a pixel, t seconds after start.
double opacity(const SkySpec& sky, double x, double y, double t_s);

/// 8-bit quantized RGB frame (values k / 255).
Raster render_frame(const SkySpec& sky, std::uint64_t seed, double t_s);

/// Mean opacity over the sun disc.
double sun_occlusion(const SkySpec& sky, double t_s);

/// clear_sky * (1 - alpha * sun_occlusion).
double exact_irradiance(const SkySpec& sky, double t_s);

struct SkySequence {
  std::vector<Raster> frames;
  std::vector<UtcTime> timestamps;
  IrradianceSeries exact;
};

/// Throws DataError for fewer than 2 frames.
SkySequence simulate_sky(const SimScenario& sc, int frames, double dt_s);

/// The six forecast scenarios: clear, thin, opaque_crossing, popup,
/// overcast, multi_cloud. Clouds travel at about 1 px per 10 s frame.
std::vector<SimScenario> forecast_suite(std::uint64_t seed);

/// One textured cloud moving at `v_px_per_frame` towards the sun.
SimScenario motion_scene(std::uint64_t seed, Vec2 v_px_per_frame, double frame_dt_s);

// ------------------------------------------------------------------ field

Raster render_tile(const FieldTile& tile, int size);

struct FieldData {
  std::vector<Raster> masks;
  std::vector<berry::ManifestEntry> manifest;
  std::vector<int> counts;
};

FieldData simulate_field(const SimScenario& sc);

/// `tiles` random tiles with up to `max_singles` well separated berries plus up
/// to `max_pairs` overlapping pairs at centre separations of 1.6-1.9 radii.
/// Tile k sits in grid cell (k % cols, k / cols).
FieldSpec random_field(std::uint64_t seed, int tiles, int tile_size = 160, double cell_m = 10.0, int cols = 5,
                       int max_singles = 9, int max_pairs = 2);

// ------------------------------------------------------------------ weather

struct WeatherData {
  std::vector<temp::WeatherRecord> records;
  std::vector<temp::TargetSample> targets;
};

WeatherData simulate_weather(const WeatherSpec& spec, std::uint64_t seed);

// ------------------------------------------------------------------ workspace

/// Writes a self-contained pipeline input directory: sky frames with
/// frames.csv, camera.json, site.json, clear_sky.json, weather.csv,
/// targets.csv, field tiles with manifest.csv and config.json.
void write_workspace(const std::filesystem::path& dir, std::uint64_t seed);

}  // namespace bogwatch::sim
