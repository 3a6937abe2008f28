#include "bogwatch/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bogwatch/csv.hpp"
#include "bogwatch/error.hpp"
#include "bogwatch/image_io.hpp"
#include "bogwatch/rng.hpp"
#include "bogwatch/weather.hpp"

namespace bogwatch::pipeline {

using nlohmann::json;

std::vector<SkyFrame> read_sky_frames(const fs::path& dir) {
  const fs::path index = dir / "frames.csv";
  if (!fs::exists(index)) throw MissingInputError(index.string());
  const auto table = csv::read(index);
  const auto cf = table.column("filename");
  const auto ct = table.column("timestamp_utc");
  std::vector<SkyFrame> frames;
  for (const auto& row : table.rows) {
    SkyFrame f;
    f.path = dir / row.fields[cf];
    try {
      f.timestamp = parse_utc(row.fields[ct]);
    } catch (const DataError& e) {
      throw ParseError(row.line, e.what());
    }
    if (!fs::exists(f.path)) throw MissingInputError(f.path.string());
    frames.push_back(std::move(f));
  }
  std::stable_sort(frames.begin(), frames.end(),
                   [](const SkyFrame& a, const SkyFrame& b) { return a.timestamp < b.timestamp; });
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].timestamp == frames[i - 1].timestamp) {
      throw OrderingError("duplicate frame timestamp " + format_utc(frames[i].timestamp));
    }
  }
  return frames;
}

// ------------------------------------------------------------------ config

namespace {

fs::path required_path(const json& j, const char* key, const fs::path& base) {
  if (!j.contains(key) || !j[key].is_string()) throw ConfigError(std::string("config: missing path '") + key + "'");
  return base / j[key].get<std::string>();
}

double threshold_value(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("config: '") + key + "' is required");
  const auto& v = j[key];
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  }
  throw ConfigError(std::string("config: '") + key + "' must be a number or \"inf\"");
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j[key].get<T>();
}

}  // namespace

Config load_config(const fs::path& path) {
  if (!fs::exists(path)) throw MissingInputError(path.string());
  json j;
  try {
    std::ifstream in(path);
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  const fs::path base = path.parent_path();
  Config c;
  try {
    c.sky_dir = required_path(j, "sky_dir", base);
    c.camera = required_path(j, "camera", base);
    c.site = required_path(j, "site", base);
    if (j.contains("clear_sky")) c.clear_sky = required_path(j, "clear_sky", base);
    c.weather = required_path(j, "weather", base);
    c.field_dir = required_path(j, "field_dir", base);
    if (j.contains("temp_model")) c.temp_model = required_path(j, "temp_model", base);
    if (j.contains("training")) {
      const auto& t = j["training"];
      TrainingSpec s;
      s.weather = required_path(t, "weather", base);
      s.target = required_path(t, "target", base);
      const auto kind = t.value("model", std::string("forest"));
      if (kind == "forest") {
        s.model = ModelKind::forest;
      } else if (kind == "mlp") {
        s.model = ModelKind::mlp;
      } else {
        throw ConfigError("config: training.model must be 'forest' or 'mlp'");
      }
      c.training = s;
    }
    if (!c.temp_model && !c.training) throw ConfigError("config: need 'temp_model' or 'training'");

    maybe(j, "horizon_s", c.nowcast.horizon_s);
    maybe(j, "step_s", c.nowcast.step_s);
    maybe(j, "alpha", c.nowcast.alpha);
    maybe(j, "consistency_tol", c.nowcast.consistency_tol);
    maybe(j, "glare_radius_px", c.nowcast.glare_radius_px);
    if (j.contains("zone_width_px")) c.nowcast.zone_width_px = j["zone_width_px"].get<double>();
    if (j.contains("cloud")) {
      maybe(j["cloud"], "threshold", c.nowcast.cloud.threshold);
      maybe(j["cloud"], "steepness", c.nowcast.cloud.steepness);
    }
    if (j.contains("lk")) {
      maybe(j["lk"], "levels", c.nowcast.lk.levels);
      maybe(j["lk"], "window", c.nowcast.lk.window);
      maybe(j["lk"], "iterations", c.nowcast.lk.iterations);
      maybe(j["lk"], "min_eigenvalue", c.nowcast.lk.min_eigenvalue);
      maybe(j["lk"], "max_residual", c.nowcast.lk.max_residual);
    }
    if (j.contains("watershed")) {
      maybe(j["watershed"], "min_split_area", c.watershed.min_split_area);
      maybe(j["watershed"], "min_marker_sep", c.watershed.min_marker_sep);
      maybe(j["watershed"], "min_dynamic", c.watershed.min_dynamic);
    }
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      maybe(g, "cell_m", c.cell_m);
      if (g.contains("cols") || g.contains("rows")) {
        berry::GridSpec s;
        s.cell_m = c.cell_m;
        maybe(g, "origin_easting_m", s.origin_easting_m);
        maybe(g, "origin_northing_m", s.origin_northing_m);
        s.cols = g.at("cols").get<int>();
        s.rows = g.at("rows").get<int>();
        c.grid = s;
      }
    }
    if (j.contains("forest")) {
      const auto& f = j["forest"];
      maybe(f, "n_trees", c.forest.n_trees);
      maybe(f, "max_depth", c.forest.max_depth);
      maybe(f, "min_leaf", c.forest.min_leaf);
      maybe(f, "features_per_split", c.forest.features_per_split);
    }
    if (j.contains("mlp")) {
      const auto& m = j["mlp"];
      maybe(m, "hidden", c.mlp.hidden);
      maybe(m, "learning_rate", c.mlp.learning_rate);
      maybe(m, "epochs", c.mlp.epochs);
      maybe(m, "batch", c.mlp.batch);
    }
    c.count_threshold = threshold_value(j, "count_threshold");
    c.temp_threshold_f = threshold_value(j, "temp_threshold_f");
    maybe(j, "stale_after_s", c.stale_after_s);
    maybe(j, "seed", c.seed);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!(c.nowcast.horizon_s > 0.0 && c.nowcast.step_s > 0.0)) throw ConfigError("config: horizon and step must be positive");
  if (!(c.nowcast.alpha >= 0.0 && c.nowcast.alpha <= 1.0)) throw ConfigError("config: alpha must lie in [0, 1]");
  if (!(c.cell_m > 0.0)) throw ConfigError("config: grid cell size must be positive");
  return c;
}

// ------------------------------------------------------------------ run

std::vector<CellRisk> flag_cells(const berry::CountDensityMap& density, double temp_f, double count_threshold,
                                 double temp_threshold_f) {
  std::vector<CellRisk> out;
  const auto& g = density.grid();
  for (int row = 0; row < g.rows; ++row) {
    for (int col = 0; col < g.cols; ++col) {
      if (density.images(col, row) == 0) continue;
      const double m = density.mean(col, row);
      if (is_high_risk(m, temp_f, count_threshold, temp_threshold_f)) out.push_back({col, row, m, temp_f});
    }
  }
  return out;
}

namespace {

temp::TempModel obtain_model(const Config& c) {
  if (c.temp_model) return temp::load_model(*c.temp_model);
  const auto& t = *c.training;
  const auto weather = temp::ingest_weather(t.weather);
  const auto targets = temp::read_targets(t.target);
  std::map<UtcTime, double> by_time;
  for (const auto& s : targets) by_time[s.timestamp] = s.berry_temp_f;
  temp::FeatureMatrix X;
  std::vector<double> y;
  for (const auto& r : weather.records) {
    const auto it = by_time.find(r.timestamp);
    if (it == by_time.end()) continue;
    const auto f = temp::features(r);
    X.emplace_back(f.begin(), f.end());
    y.push_back(it->second);
  }
  if (X.size() < 2) throw DataError("fewer than 2 weather rows have a matching target");
  if (t.model == ModelKind::forest) {
    auto cfg = c.forest;
    cfg.seed = derive_seed(c.seed, "forest");
    return temp::train_random_forest(X, y, cfg);
  }
  auto cfg = c.mlp;
  cfg.seed = derive_seed(c.seed, "mlp");
  return temp::train_mlp(X, y, cfg);
}

}  // namespace

RiskReport run_pipeline(const Config& c) {
  for (const auto* p : {&c.sky_dir, &c.camera, &c.site, &c.weather, &c.field_dir}) {
    if (!fs::exists(*p)) throw MissingInputError(p->string());
  }
  RiskReport report;
  report.count_threshold = c.count_threshold;
  report.temp_threshold_f = c.temp_threshold_f;

  // Sky
  const auto frames = read_sky_frames(c.sky_dir);
  if (frames.size() < 2) throw DataError("need at least 2 sky frames in " + c.sky_dir.string());
  const auto& f0 = frames[frames.size() - 2];
  const auto& f1 = frames.back();
  const auto camera = imaging::FisheyeCamera::load(c.camera);
  const auto site = forecast::load_site(c.site);
  const auto clear = c.clear_sky ? solar::ClearSkyModel::load(*c.clear_sky) : solar::ClearSkyModel::analytic();
  const auto nc = forecast::nowcast(imaging::read_image(f0.path), f0.timestamp, imaging::read_image(f1.path),
                                    f1.timestamp, camera, site, clear, c.nowcast);
  report.reference = nc.reference;
  report.motion = nc.motion;

  // Temperature
  const auto model = obtain_model(c);
  const auto now = temp::ingest_weather(c.weather);
  report.warnings.insert(report.warnings.end(), now.warnings.begin(), now.warnings.end());
  const temp::WeatherRecord* latest = nullptr;
  for (const auto& r : now.records) {
    if (r.timestamp <= nc.reference) latest = &r;
  }
  if (!latest) throw DataError("no weather record at or before " + format_utc(nc.reference));
  const double age = seconds_between(latest->timestamp, nc.reference);
  if (age > c.stale_after_s) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "weather is stale: latest record %s is %.0f s older than the reference frame",
                  format_utc(latest->timestamp).c_str(), age);
    report.warnings.emplace_back(buf);
  }
  report.max_temp_f = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < nc.horizons_s.size(); ++k) {
    HorizonForecast h;
    h.horizon_s = nc.horizons_s[k];
    h.valid_time = nc.irradiance.timestamps()[k];
    h.occlusion = nc.profile.occlusion[k];
    h.confidence = nc.profile.confidence[k];
    h.irradiance_wm2 = nc.irradiance.values()[k];
    auto rec = *latest;
    rec.irradiance_wm2 = h.irradiance_wm2;
    const auto x = temp::features(rec);
    h.berry_temp_f = temp::predict(model, x);
    h.at_risk = h.berry_temp_f >= c.temp_threshold_f;
    report.max_temp_f = std::max(report.max_temp_f, h.berry_temp_f);
    report.horizons.push_back(h);
  }

  // Field
  const auto manifest = berry::read_manifest(c.field_dir / "manifest.csv");
  std::vector<berry::TileCount> tiles;
  for (const auto& e : manifest) {
    const fs::path p = c.field_dir / e.filename;
    if (!fs::exists(p)) throw MissingInputError(p.string());
    const int n = berry::count(imaging::read_image(p), c.watershed);
    tiles.push_back({e.easting_m, e.northing_m, n});
    report.total_count += n;
  }
  report.tiles = static_cast<int>(tiles.size());
  const auto grid = c.grid ? *c.grid : berry::grid_covering(tiles, c.cell_m);
  report.density = berry::density_map(tiles, grid);
  report.flagged = flag_cells(report.density, report.max_temp_f, c.count_threshold, c.temp_threshold_f);
  return report;
}

// ------------------------------------------------------------------ output

namespace {

std::string fixed(double v, int digits) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Numbers in the structured report are rounded so output does not depend on
// last-bit differences between platforms.
json rounded(double v, int digits) {
  if (!std::isfinite(v)) return fixed(v, digits);
  return json::parse(fixed(v, digits));
}

}  // namespace

void write_forecast_csv(const fs::path& path, const std::vector<HorizonForecast>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "timestamp_utc,horizon_s,occlusion,confidence,irradiance_wm2\n";
  for (const auto& r : rows) {
    out << format_utc(r.valid_time) << ',' << fixed(r.horizon_s, 0) << ',' << fixed(r.occlusion, 4) << ','
        << fixed(r.confidence, 4) << ',' << fixed(r.irradiance_wm2, 2) << '\n';
  }
}

std::string format_report_text(const RiskReport& r) {
  std::ostringstream o;
  o << "bogwatch risk report\n";
  o << "reference time      " << format_utc(r.reference) << '\n';
  o << "cloud motion        (" << fixed(r.motion.v.x, 3) << ", " << fixed(r.motion.v.y, 3)
    << ") px/frame, confidence " << fixed(r.motion.confidence, 3) << '\n';
  o << "temp threshold      " << fixed(r.temp_threshold_f, 1) << " F\n";
  o << "count threshold     " << fixed(r.count_threshold, 2) << " per image\n";
  o << "max predicted temp  " << fixed(r.max_temp_f, 2) << " F\n";
  o << "tiles counted       " << r.tiles << " (" << r.total_count << " exposed berries)\n";
  o << "\nhorizon_s  valid_time            irradiance  berry_temp_f  risk\n";
  for (const auto& h : r.horizons) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%9.0f  %s  %10.2f  %12.2f  %s\n", h.horizon_s, format_utc(h.valid_time).c_str(),
                  h.irradiance_wm2, h.berry_temp_f, h.at_risk ? "HIGH" : "-");
    o << buf;
  }
  o << "\nflagged cells: " << r.flagged.size() << '\n';
  for (const auto& f : r.flagged) {
    o << "  cell (" << f.col << ", " << f.row << ")  count " << fixed(f.count_mean, 2) << "  temp "
      << fixed(f.temp_f, 2) << " F\n";
  }
  if (!r.warnings.empty()) {
    o << "\nwarnings:\n";
    for (const auto& w : r.warnings) o << "  " << w << '\n';
  }
  return o.str();
}

std::string format_report_json(const RiskReport& r) {
  json j;
  j["reference_utc"] = format_utc(r.reference);
  j["motion"] = {{"vx", rounded(r.motion.v.x, 4)},
                 {"vy", rounded(r.motion.v.y, 4)},
                 {"confidence", rounded(r.motion.confidence, 4)}};
  j["temp_threshold_f"] = rounded(r.temp_threshold_f, 2);
  j["count_threshold"] = rounded(r.count_threshold, 3);
  j["max_temp_f"] = rounded(r.max_temp_f, 3);
  json hs = json::array();
  for (const auto& h : r.horizons) {
    hs.push_back({{"horizon_s", rounded(h.horizon_s, 0)},
                  {"valid_utc", format_utc(h.valid_time)},
                  {"occlusion", rounded(h.occlusion, 4)},
                  {"confidence", rounded(h.confidence, 4)},
                  {"irradiance_wm2", rounded(h.irradiance_wm2, 2)},
                  {"berry_temp_f", rounded(h.berry_temp_f, 3)},
                  {"at_risk", h.at_risk}});
  }
  j["horizons"] = std::move(hs);
  const auto& g = r.density.grid();
  json cells = json::array();
  for (int row = 0; row < g.rows; ++row) {
    for (int col = 0; col < g.cols; ++col) {
      cells.push_back({{"col", col},
                       {"row", row},
                       {"images", r.density.images(col, row)},
                       {"count_mean", rounded(r.density.mean(col, row), 3)}});
    }
  }
  j["density"] = {{"origin_easting_m", rounded(g.origin_easting_m, 3)},
                  {"origin_northing_m", rounded(g.origin_northing_m, 3)},
                  {"cell_m", rounded(g.cell_m, 3)},
                  {"cols", g.cols},
                  {"rows", g.rows},
                  {"cells", std::move(cells)}};
  json flagged = json::array();
  for (const auto& f : r.flagged) {
    flagged.push_back(
        {{"col", f.col}, {"row", f.row}, {"count_mean", rounded(f.count_mean, 3)}, {"temp_f", rounded(f.temp_f, 3)}});
  }
  j["flagged"] = std::move(flagged);
  j["warnings"] = r.warnings;
  j["tiles"] = r.tiles;
  j["total_count"] = r.total_count;
  return j.dump(2) + "\n";
}

void write_outputs(const fs::path& out_dir, const RiskReport& report) {
  fs::create_directories(out_dir);
  write_forecast_csv(out_dir / "forecast.csv", report.horizons);
  std::ofstream(out_dir / "report.txt") << format_report_text(report);
  std::ofstream(out_dir / "report.json") << format_report_json(report);
  berry::write_density_csv(out_dir / "density.csv", report.density);
}

}  // namespace bogwatch::pipeline
