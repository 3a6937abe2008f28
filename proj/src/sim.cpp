#include "bogwatch/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "bogwatch/error.hpp"
#include "bogwatch/image_io.hpp"
#include "bogwatch/rng.hpp"

namespace bogwatch::sim {

namespace {

constexpr double kPi = std::numbers::pi;

// Smooth value noise in [-1, 1] on a lattice of `cell` pixels.
double lattice(std::uint64_t seed, long long i, long long j) {
  const std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(i) * 0x9E3779B1ULL +
                                                       static_cast<std::uint64_t>(j) * 0x85EBCA77ULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

double value_noise(std::uint64_t seed, double x, double y, double cell) {
  const double u = x / cell, v = y / cell;
  const double fu = std::floor(u), fv = std::floor(v);
  const auto i = static_cast<long long>(fu), j = static_cast<long long>(fv);
  auto fade = [](double t) { return t * t * (3.0 - 2.0 * t); };
  const double a = fade(u - fu), b = fade(v - fv);
  const double n00 = lattice(seed, i, j), n10 = lattice(seed, i + 1, j);
  const double n01 = lattice(seed, i, j + 1), n11 = lattice(seed, i + 1, j + 1);
  return (n00 * (1 - a) + n10 * a) * (1 - b) + (n01 * (1 - a) + n11 * a) * b;
}

double texture(std::uint64_t seed, double x, double y) {
  return 0.6 * value_noise(seed, x, y, 7.0) + 0.4 * value_noise(seed ^ 0x5bd1e995ULL, x, y, 3.0);
}

double fade_factor(const CloudDisc& c, double t) {
  if (t < c.appear_s) return 0.0;
  if (c.fade_s <= 0.0) return 1.0;
  return std::min(1.0, (t - c.appear_s) / c.fade_s);
}

// Disc coverage with a one-pixel linear edge.
double coverage(const CloudDisc& c, double dx, double dy) {
  const double d = std::hypot(dx, dy);
  return std::clamp(c.radius - d + 0.5, 0.0, 1.0);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

Vec2 as_vec(imaging::Pixel p) { return {p.x, p.y}; }

}  // namespace

imaging::FisheyeCamera camera(const SkySpec& sky) {
  return imaging::FisheyeCamera::equidistant(sky.width, sky.height, sky.focal_px, sky.theta_max_rad);
}

solar::ClearSkyModel clear_sky_model(const SkySpec& sky) {
  return solar::ClearSkyModel::analytic(sky.clear_scale, sky.clear_extinction);
}

forecast::Site site(const SkySpec& sky) { return {sky.lat_deg, sky.lon_deg, std::nullopt}; }

solar::SunPosition sun_at(const SkySpec& sky, double t_s) {
  return solar::sun_position(add_seconds(sky.start, t_s), sky.lat_deg, sky.lon_deg);
}

imaging::Pixel sun_pixel_at(const SkySpec& sky, double t_s) {
  const auto px = solar::sun_pixel(camera(sky), sun_at(sky, t_s));
  if (!px) throw NoSunError("simulated sun is below the horizon");
  return *px;
}

double opacity(const SkySpec& sky, double x, double y, double t_s) {
  double clear = 1.0;
  for (const auto& c : sky.clouds) {
    const double o = c.opacity * fade_factor(c, t_s) *
                     coverage(c, x - (c.center.x + c.velocity.x * t_s), y - (c.center.y + c.velocity.y * t_s));
    clear *= 1.0 - o;
  }
  return 1.0 - clear;
}

Raster render_frame(const SkySpec& sky, std::uint64_t seed, double t_s) {
  const auto sun = sun_pixel_at(sky, t_s);
  const double cx = (sky.width - 1) / 2.0, cy = (sky.height - 1) / 2.0;
  const double rmax = std::hypot(cx, cy);
  const auto& cp = sky.cloud_params;
  // Cloud chroma for opacity o is chosen so the segmentation logistic maps it back to o.
  const double rho_cloud_min = -0.15;
  Raster out(sky.width, sky.height, 3);
  std::vector<double> w(sky.clouds.size());
  for (int y = 0; y < sky.height; ++y) {
    for (int x = 0; x < sky.width; ++x) {
      double clear = 1.0, wsum = 0.0, bright = 0.0;
      for (std::size_t i = 0; i < sky.clouds.size(); ++i) {
        const auto& c = sky.clouds[i];
        const double lx = x - (c.center.x + c.velocity.x * t_s);
        const double ly = y - (c.center.y + c.velocity.y * t_s);
        const double o = c.opacity * fade_factor(c, t_s) * coverage(c, lx, ly);
        clear *= 1.0 - o;
        if (o > 0.0) {
          const double s = c.brightness * (1.0 + c.texture * texture(derive_seed(seed, i), lx, ly));
          bright += o * s;
          wsum += o;
        }
      }
      const double o = 1.0 - clear;
      const double r = std::hypot(x - cx, y - cy) / rmax;
      const double sky_s = sky.sky_brightness * (0.85 + 0.3 * r);
      const double ds = std::hypot(x - sun.x, y - sun.y);
      const double sun_s = ds <= sky.sun_radius_px ? 1.0 : sky.glow * std::exp(-ds * ds / (2.0 * 64.0));
      const double cloud_s = wsum > 0.0 ? bright / wsum : 0.0;
      const double s = std::clamp((1.0 - o) * (sky_s + sun_s) + o * cloud_s, 0.02, 1.9);

      double rho = sky.sky_ratio;
      if (o > 0.0) {
        const double p = std::clamp(o, 1e-9, 1.0 - 1e-9);
        rho = std::clamp(cp.threshold - logit(p) / cp.steepness, rho_cloud_min, sky.sky_ratio);
      }
      const double b = std::min(1.0, s * (1.0 + rho) / 2.0);
      const double red = std::min(1.0, s * (1.0 - rho) / 2.0);
      out.set(x, y, 0, static_cast<float>(red));
      out.set(x, y, 1, static_cast<float>(std::min(1.0, s / 2.0)));
      out.set(x, y, 2, static_cast<float>(b));
    }
  }
  return imaging::quantize8(out);
}

double sun_occlusion(const SkySpec& sky, double t_s) {
  const auto sun = sun_pixel_at(sky, t_s);
  constexpr int n = 15;
  double sum = 0.0;
  int count = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double dx = (2.0 * (i + 0.5) / n - 1.0) * sky.sun_radius_px;
      const double dy = (2.0 * (j + 0.5) / n - 1.0) * sky.sun_radius_px;
      if (dx * dx + dy * dy > sky.sun_radius_px * sky.sun_radius_px) continue;
      sum += opacity(sky, sun.x + dx, sun.y + dy, t_s);
      ++count;
    }
  }
  return sum / count;
}

double exact_irradiance(const SkySpec& sky, double t_s) {
  const double clear = solar::clear_sky_irradiance(clear_sky_model(sky), sun_at(sky, t_s));
  return clear * (1.0 - sky.alpha * sun_occlusion(sky, t_s));
}

SkySequence simulate_sky(const SimScenario& sc, int frames, double dt_s) {
  if (frames < 2) throw DataError("simulate_sky needs at least 2 frames");
  if (!(dt_s > 0.0)) throw DataError("frame interval must be positive");
  SkySequence seq{{}, {}, IrradianceSeries()};
  std::vector<double> exact;
  const auto seed = derive_seed(sc.seed, "simulator");
  for (int i = 0; i < frames; ++i) {
    const double t = i * dt_s;
    seq.frames.push_back(render_frame(sc.sky, seed, t));
    seq.timestamps.push_back(add_seconds(sc.sky.start, t));
    exact.push_back(exact_irradiance(sc.sky, t));
  }
  seq.exact = IrradianceSeries(seq.timestamps, std::move(exact));
  return seq;
}

namespace {

SimScenario base_scenario(std::string name, std::uint64_t seed) {
  SimScenario sc;
  sc.name = std::move(name);
  sc.seed = seed;
  sc.sky.start = parse_utc("2021-06-21T15:30:00Z");
  return sc;
}

CloudDisc disc(Vec2 center, double radius, Vec2 velocity, double opacity) {
  CloudDisc c;
  c.center = center;
  c.radius = radius;
  c.velocity = velocity;
  c.opacity = opacity;
  return c;
}

}  // namespace

std::vector<SimScenario> forecast_suite(std::uint64_t seed) {
  std::vector<SimScenario> out;
  const Vec2 v{0.1, 0.0};  // 1 px per 10 s frame
  auto add = [&](const std::string& name) -> SimScenario& {
    out.push_back(base_scenario(name, derive_seed(seed, name)));
    return out.back();
  };
  {
    add("clear");
  }
  {
    auto& sc = add("thin");
    const Vec2 s0 = as_vec(sun_pixel_at(sc.sky, 0.0));
    auto c = disc(s0 - Vec2{170.0, 0.0}, 45.0, v, 0.5);
    c.texture = 0.6;  // contrast is diluted by the sky showing through
    sc.sky.clouds.push_back(c);
  }
  {
    auto& sc = add("opaque_crossing");
    const Vec2 s0 = as_vec(sun_pixel_at(sc.sky, 0.0));
    sc.sky.clouds.push_back(disc(s0 - Vec2{150.0, 5.0}, 40.0, v, 1.0));
  }
  {
    auto& sc = add("popup");
    const Vec2 s0 = as_vec(sun_pixel_at(sc.sky, 0.0));
    auto c = disc(s0 - Vec2{140.0, 0.0}, 40.0, v, 0.9);
    c.appear_s = 600.0;
    c.fade_s = 120.0;
    sc.sky.clouds.push_back(c);
  }
  {
    auto& sc = add("overcast");
    auto c = disc({(sc.sky.width - 1) / 2.0, (sc.sky.height - 1) / 2.0}, 2000.0, {0.0, 0.0}, 0.8);
    sc.sky.clouds.push_back(c);
  }
  {
    auto& sc = add("multi_cloud");
    const Vec2 s0 = as_vec(sun_pixel_at(sc.sky, 0.0));
    const Vec2 vm{0.1, 0.01};
    sc.sky.clouds.push_back(disc(s0 - Vec2{110.0, 10.0}, 30.0, vm, 1.0));
    sc.sky.clouds.push_back(disc(s0 - Vec2{200.0, 25.0}, 28.0, vm, 0.6));
    sc.sky.clouds.push_back(disc(s0 - Vec2{70.0, 70.0}, 35.0, vm, 0.8));
  }
  return out;
}

SimScenario motion_scene(std::uint64_t seed, Vec2 v_px_per_frame, double frame_dt_s) {
  auto sc = base_scenario("motion", seed);
  const Vec2 s0 = as_vec(sun_pixel_at(sc.sky, 0.0));
  const double speed = v_px_per_frame.norm();
  const Vec2 dir = speed > 0.0 ? v_px_per_frame * (1.0 / speed) : Vec2{1.0, 0.0};
  sc.sky.clouds.push_back(disc(s0 - dir * 80.0, 35.0, v_px_per_frame * (1.0 / frame_dt_s), 1.0));
  return sc;
}

// ------------------------------------------------------------------ field

Raster render_tile(const FieldTile& tile, int size) {
  Raster m(size, size, 1);
  for (const auto& b : tile.berries) {
    const int x0 = std::max(0, static_cast<int>(std::floor(b.x - b.radius)));
    const int x1 = std::min(size - 1, static_cast<int>(std::ceil(b.x + b.radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(b.y - b.radius)));
    const int y1 = std::min(size - 1, static_cast<int>(std::ceil(b.y + b.radius)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (std::hypot(x - b.x, y - b.y) <= b.radius) m.set(x, y, 1.0f);
      }
    }
  }
  return m;
}

FieldData simulate_field(const SimScenario& sc) {
  FieldData out;
  for (const auto& t : sc.field.tiles) {
    out.masks.push_back(render_tile(t, sc.field.tile_size));
    out.manifest.push_back({t.name, t.easting_m, t.northing_m});
    out.counts.push_back(t.true_count);
  }
  return out;
}

FieldSpec random_field(std::uint64_t seed, int tiles, int tile_size, double cell_m, int cols, int max_singles,
                       int max_pairs) {
  std::mt19937_64 rng(derive_seed(seed, "field"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  FieldSpec spec;
  spec.tile_size = tile_size;
  constexpr double kGap = 3.0;  // pixels between distinct objects
  for (int k = 0; k < tiles; ++k) {
    FieldTile tile;
    char name[32];
    std::snprintf(name, sizeof name, "tile_%03d.png", k);
    tile.name = name;
    tile.easting_m = (k % cols + unit(rng) * 0.8 + 0.1) * cell_m;
    tile.northing_m = (k / cols + unit(rng) * 0.8 + 0.1) * cell_m;

    // Objects are groups of one or two discs with a bounding circle.
    struct Group {
      double x, y, reach;
    };
    std::vector<Group> groups;
    auto fits = [&](double x, double y, double reach) {
      if (x - reach < 1 || y - reach < 1 || x + reach > tile_size - 2 || y + reach > tile_size - 2) return false;
      for (const auto& g : groups) {
        if (std::hypot(x - g.x, y - g.y) < reach + g.reach + kGap) return false;
      }
      return true;
    };
    const int singles = static_cast<int>(unit(rng) * (max_singles + 1));
    const int pairs = static_cast<int>(unit(rng) * (max_pairs + 1));
    for (int p = 0; p < pairs; ++p) {
      const double r = 7.0 + 3.0 * unit(rng);
      const double sep = (1.6 + 0.3 * unit(rng)) * r;
      const double ang = 2.0 * kPi * unit(rng);
      const double reach = sep / 2.0 + r;
      for (int attempt = 0; attempt < 200; ++attempt) {
        const double x = tile_size * unit(rng), y = tile_size * unit(rng);
        if (!fits(x, y, reach)) continue;
        groups.push_back({x, y, reach});
        const double dx = std::cos(ang) * sep / 2.0, dy = std::sin(ang) * sep / 2.0;
        tile.berries.push_back({x - dx, y - dy, r});
        tile.berries.push_back({x + dx, y + dy, r});
        tile.true_count += 2;
        break;
      }
    }
    for (int s = 0; s < singles; ++s) {
      const double r = 5.0 + 5.0 * unit(rng);
      for (int attempt = 0; attempt < 200; ++attempt) {
        const double x = tile_size * unit(rng), y = tile_size * unit(rng);
        if (!fits(x, y, r)) continue;
        groups.push_back({x, y, r});
        tile.berries.push_back({x, y, r});
        tile.true_count += 1;
        break;
      }
    }
    spec.tiles.push_back(std::move(tile));
  }
  return spec;
}

// ------------------------------------------------------------------ weather

WeatherData simulate_weather(const WeatherSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, "weather"));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto clear = solar::ClearSkyModel::analytic();
  constexpr double kLat = 40.0, kLon = -74.5;

  WeatherData out;
  double cloud = 0.0, temp_dev = 0.0, wind_dir = 220.0, wet = 0.0, day_temp = 0.0;
  int day = -1;
  for (int k = 0; k < spec.samples; ++k) {
    const UtcTime t = add_seconds(spec.start, k * spec.step_s);
    const auto sun = solar::sun_position(t, kLat, kLon);
    const double secs = static_cast<double>(t.time_since_epoch().count());
    const double local_h = std::fmod(secs / 3600.0 + kLon / 15.0 + 48.0, 24.0);
    const int d = static_cast<int>(std::floor((secs / 3600.0 + kLon / 15.0) / 24.0));
    if (d != day) {
      day = d;
      day_temp = 4.0 * gauss(rng);
    }

    cloud = 0.97 * cloud + 0.25 * gauss(rng);
    const double transmit = std::clamp(0.85 - 0.25 * cloud, 0.2, 1.0);
    temp::WeatherRecord r;
    r.timestamp = t;
    r.irradiance_wm2 = solar::clear_sky_irradiance(clear, sun) * transmit * spec.peak_irradiance /
                       solar::ClearSkyModel::kDefaultScale;
    temp_dev = 0.95 * temp_dev + 0.4 * gauss(rng);
    r.ambient_temp_f = spec.mean_temp_f + day_temp + 11.0 * std::sin(2.0 * kPi * (local_h - 9.0) / 24.0) + temp_dev;
    r.rel_humidity_pct = std::clamp(62.0 - 1.6 * (r.ambient_temp_f - spec.mean_temp_f) + 6.0 * gauss(rng), 12.0, 99.0);
    const double tc = (r.ambient_temp_f - 32.0) * 5.0 / 9.0;
    const double g = std::log(r.rel_humidity_pct / 100.0) + 17.62 * tc / (243.12 + tc);
    r.dew_point_f = 243.12 * g / (17.62 - g) * 9.0 / 5.0 + 32.0;
    r.wind_speed_mph = std::abs(5.0 + 2.5 * gauss(rng));
    r.gust_speed_mph = r.wind_speed_mph + std::abs(3.0 * gauss(rng));
    wind_dir = std::fmod(wind_dir + 12.0 * gauss(rng) + 720.0, 360.0);
    r.wind_dir_deg = std::clamp(wind_dir, 0.0, std::nextafter(360.0, 0.0));
    r.rain_in = unit(rng) < 0.02 ? 0.01 + 0.1 * unit(rng) : 0.0;
    wet = r.rain_in > 0.0 ? 100.0 : 0.85 * wet;
    r.wetness_pct = std::clamp(std::max(wet, 2.5 * (r.rel_humidity_pct - 70.0)), 0.0, 100.0);
    out.records.push_back(r);

    temp::TargetSample y;
    y.timestamp = t;
    y.berry_temp_f = spec.intercept + spec.a * r.irradiance_wm2 + spec.b * r.rel_humidity_pct +
                     spec.c * r.dew_point_f + spec.noise_sd * gauss(rng);
    out.targets.push_back(y);
  }
  return out;
}

// ------------------------------------------------------------------ workspace

void write_workspace(const std::filesystem::path& dir, std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "sky");
  fs::create_directories(dir / "field");

  // Sky: the opaque crossing scene, ending 16 minutes in.
  auto suite = forecast_suite(derive_seed(seed, "simulator"));
  auto sc = suite.at(2);
  constexpr int kFrames = 4;
  constexpr double kDt = 10.0, kEnd = 960.0;
  const auto seq_seed = derive_seed(sc.seed, "simulator");
  std::ofstream frames(dir / "sky" / "frames.csv");
  frames << "filename,timestamp_utc\n";
  for (int i = 0; i < kFrames; ++i) {
    const double t = kEnd - (kFrames - 1 - i) * kDt;
    char name[32];
    std::snprintf(name, sizeof name, "frame_%02d.png", i);
    imaging::write_png(dir / "sky" / name, render_frame(sc.sky, seq_seed, t));
    frames << name << ',' << format_utc(add_seconds(sc.sky.start, t)) << '\n';
  }
  frames.close();
  camera(sc.sky).save(dir / "camera.json");
  forecast::save_site(dir / "site.json", site(sc.sky));
  clear_sky_model(sc.sky).save(dir / "clear_sky.json");

  // Weather: a week of history ending at the reference frame.
  WeatherSpec ws;
  ws.mean_temp_f = 86.0;  // a hot spell
  const UtcTime ref = add_seconds(sc.sky.start, kEnd);
  ws.start = add_seconds(ref, -(ws.samples - 1) * ws.step_s);
  const auto weather = simulate_weather(ws, seed);
  temp::write_weather(dir / "weather.csv", weather.records);
  temp::write_targets(dir / "targets.csv", weather.targets);

  // Field: 3 x 4 cells with one tile each; cell (1, 0) is dense with exposed fruit.
  constexpr double kCell = 10.0;
  auto field = random_field(seed, 12, 160, kCell, 3, 2, 0);
  const auto dense = random_field(derive_seed(seed, "dense"), 1, 160, kCell, 1, 12, 2);
  field.tiles[1].berries = dense.tiles[0].berries;
  field.tiles[1].true_count = dense.tiles[0].true_count;
  sc.field = field;
  const auto data = simulate_field(sc);
  for (std::size_t i = 0; i < data.masks.size(); ++i) {
    imaging::write_png(dir / "field" / data.manifest[i].filename, data.masks[i]);
  }
  berry::write_manifest(dir / "field" / "manifest.csv", data.manifest);

  nlohmann::json cfg;
  cfg["sky_dir"] = "sky";
  cfg["camera"] = "camera.json";
  cfg["site"] = "site.json";
  cfg["clear_sky"] = "clear_sky.json";
  cfg["weather"] = "weather.csv";
  cfg["training"] = {{"weather", "weather.csv"}, {"target", "targets.csv"}, {"model", "forest"}};
  cfg["field_dir"] = "field";
  cfg["horizon_s"] = 1200.0;
  cfg["step_s"] = 30.0;
  cfg["alpha"] = 0.75;
  cfg["grid"] = {{"origin_easting_m", 0.0}, {"origin_northing_m", 0.0}, {"cell_m", kCell}, {"cols", 3}, {"rows", 4}};
  cfg["count_threshold"] = 4.0;
  cfg["temp_threshold_f"] = 113.0;
  cfg["seed"] = seed;
  std::ofstream(dir / "config.json") << cfg.dump(2) << '\n';
}

}  // namespace bogwatch::sim
