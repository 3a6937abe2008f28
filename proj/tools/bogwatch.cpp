// bogwatch command-line front end.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bogwatch/berry.hpp"
#include "bogwatch/cloud.hpp"
#include "bogwatch/csv.hpp"
#include "bogwatch/error.hpp"
#include "bogwatch/forecast.hpp"
#include "bogwatch/image_io.hpp"
#include "bogwatch/metrics.hpp"
#include "bogwatch/motion.hpp"
#include "bogwatch/pipeline.hpp"
#include "bogwatch/rng.hpp"
#include "bogwatch/sim.hpp"
#include "bogwatch/temp_model.hpp"
#include "bogwatch/weather.hpp"

namespace fs = std::filesystem;
using namespace bogwatch;

namespace {

struct Globals {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
};

fs::path need_out(const Globals& g, const std::string& local) {
  const std::string& o = local.empty() ? g.out : local;
  if (o.empty()) throw ConfigError("--out is required");
  return o;
}

std::vector<pipeline::SkyFrame> frames_in(const fs::path& dir) {
  if (fs::exists(dir / "frames.csv")) return pipeline::read_sky_frames(dir);
  std::vector<pipeline::SkyFrame> out;
  for (const auto& p : imaging::list_images(dir)) out.push_back({p, {}});
  return out;
}

temp::FeatureMatrix feature_rows(const std::vector<temp::WeatherRecord>& records) {
  temp::FeatureMatrix X;
  for (const auto& r : records) {
    const auto f = temp::features(r);
    X.emplace_back(f.begin(), f.end());
  }
  return X;
}

std::vector<double> numeric_column(const fs::path& path, const std::string& name) {
  const auto t = csv::read(path);
  std::size_t col = t.header.size() - 1;
  if (!name.empty()) {
    col = t.column(name);
  } else if (auto c = t.find_column("irradiance_wm2")) {
    col = *c;
  }
  std::vector<double> v;
  for (const auto& row : t.rows) v.push_back(csv::parse_double(row.fields[col], row.line));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bogwatch: sky-image irradiance nowcasting and cranberry heat-risk mapping"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Pipeline config file (JSON)");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out", g.out, "Output file or directory");

  // segment-clouds
  auto* seg = app.add_subcommand("segment-clouds", "Cloud probability maps from RGB sky frames");
  std::string seg_in;
  clouds::CloudParams seg_params;
  seg->add_option("--in", seg_in, "Directory of frames")->required();
  seg->add_option("--t", seg_params.threshold, "Ratio threshold");
  seg->add_option("--k", seg_params.steepness, "Logistic steepness");
  seg->callback([&] {
    const fs::path out = need_out(g, "");
    fs::create_directories(out);
    for (const auto& f : frames_in(seg_in)) {
      const auto prob = clouds::cloud_probability(imaging::read_image(f.path), seg_params);
      imaging::write_png(out / (f.path.stem().string() + ".png"), prob);
    }
  });

  // flow
  auto* flow = app.add_subcommand("flow", "Lucas-Kanade flow between consecutive frames");
  std::string flow_in;
  motion::LkParams lk;
  double flow_tol = 1.0;
  bool flow_nocheck = false;
  flow->add_option("--in", flow_in, "Directory of frames")->required();
  flow->add_option("--levels", lk.levels);
  flow->add_option("--window", lk.window);
  flow->add_option("--iterations", lk.iterations);
  flow->add_option("--max-residual", lk.max_residual, "Photometric residual gate (0 disables)");
  flow->add_option("--tol", flow_tol, "Forward/backward consistency tolerance (px)");
  flow->add_flag("--no-check", flow_nocheck, "Skip the forward/backward check");
  flow->callback([&] {
    const fs::path out = need_out(g, "");
    fs::create_directories(out);
    const auto frames = frames_in(flow_in);
    for (std::size_t i = 1; i < frames.size(); ++i) {
      const auto a = imaging::read_image(frames[i - 1].path);
      const auto b = imaging::read_image(frames[i].path);
      auto f = motion::lucas_kanade_flow(a, b, lk);
      if (!flow_nocheck) f = motion::consistency_check(f, motion::lucas_kanade_flow(b, a, lk), flow_tol);
      const std::string stem = frames[i - 1].path.stem().string();
      motion::write_flow(out / ("flow_" + stem + ".png"), out / ("valid_" + stem + ".png"), f);
      std::printf("%s -> %s: %zu valid pixels\n", frames[i - 1].path.filename().c_str(),
                  frames[i].path.filename().c_str(), f.valid_count());
    }
  });

  // forecast
  auto* fc = app.add_subcommand("forecast", "Irradiance forecast from the two latest sky frames");
  std::string fc_sky, fc_camera, fc_site, fc_clear;
  forecast::NowcastConfig fc_cfg;
  fc->add_option("--sky", fc_sky, "Sky directory with frames.csv")->required();
  fc->add_option("--camera", fc_camera)->required();
  fc->add_option("--site", fc_site)->required();
  fc->add_option("--clear-sky", fc_clear, "Clear-sky model file (analytic default)");
  fc->add_option("--horizon", fc_cfg.horizon_s, "Seconds");
  fc->add_option("--step", fc_cfg.step_s, "Seconds");
  fc->add_option("--alpha", fc_cfg.alpha);
  fc->callback([&] {
    const auto frames = pipeline::read_sky_frames(fc_sky);
    if (frames.size() < 2) throw DataError("need at least 2 frames");
    const auto& a = frames[frames.size() - 2];
    const auto& b = frames.back();
    const auto clear = fc_clear.empty() ? solar::ClearSkyModel::analytic() : solar::ClearSkyModel::load(fc_clear);
    const auto nc = forecast::nowcast(imaging::read_image(a.path), a.timestamp, imaging::read_image(b.path),
                                      b.timestamp, imaging::FisheyeCamera::load(fc_camera),
                                      forecast::load_site(fc_site), clear, fc_cfg);
    std::vector<pipeline::HorizonForecast> rows;
    for (std::size_t k = 0; k < nc.horizons_s.size(); ++k) {
      rows.push_back({nc.horizons_s[k], nc.irradiance.timestamps()[k], nc.profile.occlusion[k],
                      nc.profile.confidence[k], nc.irradiance.values()[k], 0.0, false});
    }
    pipeline::write_forecast_csv(need_out(g, ""), rows);
  });

  // clearsky-fit
  auto* csf = app.add_subcommand("clearsky-fit", "Fit a clear-sky envelope to irradiance history");
  std::string csf_weather, csf_site;
  double csf_q = 0.95;
  csf->add_option("--weather", csf_weather)->required();
  csf->add_option("--site", csf_site)->required();
  csf->add_option("--quantile", csf_q);
  csf->callback([&] {
    const auto log = temp::ingest_weather(csf_weather);
    const auto site = forecast::load_site(csf_site);
    std::vector<UtcTime> t;
    std::vector<double> v;
    std::vector<solar::SunPosition> sun;
    for (const auto& r : log.records) {
      t.push_back(r.timestamp);
      v.push_back(r.irradiance_wm2);
      sun.push_back(solar::sun_position(r.timestamp, site.lat_deg, site.lon_deg));
    }
    solar::fit_clear_sky(IrradianceSeries(t, v), sun, csf_q).save(need_out(g, ""));
  });

  // train-temp
  auto* tt = app.add_subcommand("train-temp", "Train a berry temperature model");
  std::string tt_weather, tt_target, tt_model = "forest";
  bool tt_cv = false;
  tt->add_option("--weather", tt_weather)->required();
  tt->add_option("--target", tt_target)->required();
  tt->add_option("--model", tt_model)->check(CLI::IsMember({"forest", "mlp"}));
  tt->add_flag("--cv", tt_cv, "Report 5-fold temporal cross-validation");
  tt->callback([&] {
    const auto log = temp::ingest_weather(tt_weather);
    for (const auto& w : log.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::map<UtcTime, double> target;
    for (const auto& s : temp::read_targets(tt_target)) target[s.timestamp] = s.berry_temp_f;
    std::vector<temp::WeatherRecord> rows;
    std::vector<double> y;
    for (const auto& r : log.records) {
      if (auto it = target.find(r.timestamp); it != target.end()) {
        rows.push_back(r);
        y.push_back(it->second);
      }
    }
    const auto X = feature_rows(rows);
    const temp::Trainer train = [&](const temp::FeatureMatrix& a, std::span<const double> b) -> temp::TempModel {
      if (tt_model == "forest") {
        temp::ForestConfig c;
        c.seed = derive_seed(g.seed, "forest");
        return temp::train_random_forest(a, b, c);
      }
      temp::MlpConfig c;
      c.seed = derive_seed(g.seed, "mlp");
      return temp::train_mlp(a, b, c);
    };
    if (tt_cv) {
      const auto cv = temp::cross_validate(X, y, train);
      std::printf("cv r2 %.4f mae %.3f F\n", cv.mean_r2, cv.mean_mae);
    }
    const auto model = train(X, y);
    const auto& names = temp::feature_names();
    if (const auto* f = std::get_if<temp::ForestModel>(&model)) {
      std::printf("feature ranking:");
      for (const auto& n : temp::rank_features(*f, names)) std::printf(" %s", n.c_str());
      std::printf("\n");
    }
    temp::save_model(need_out(g, ""), model, names);
  });

  // predict-temp
  auto* pt = app.add_subcommand("predict-temp", "Predict berry temperature for weather rows");
  std::string pt_model, pt_weather;
  pt->add_option("--model", pt_model)->required();
  pt->add_option("--weather", pt_weather)->required();
  pt->callback([&] {
    const auto model = temp::load_model(pt_model);
    const auto log = temp::ingest_weather(pt_weather);
    std::vector<temp::TargetSample> out;
    for (const auto& r : log.records) {
      const auto f = temp::features(r);
      out.push_back({r.timestamp, temp::predict(model, f)});
    }
    if (g.out.empty()) {
      for (const auto& s : out) std::printf("%s,%.2f\n", format_utc(s.timestamp).c_str(), s.berry_temp_f);
    } else {
      temp::write_targets(g.out, out);
    }
  });

  // count-berries
  auto* cb = app.add_subcommand("count-berries", "Count exposed berries in segmentation masks");
  std::string cb_in, cb_truth;
  berry::WatershedParams ws;
  cb->add_option("--in", cb_in, "Directory of masks")->required();
  cb->add_option("--min-split-area", ws.min_split_area);
  cb->add_option("--min-marker-sep", ws.min_marker_sep);
  cb->add_option("--min-dynamic", ws.min_dynamic);
  cb->add_option("--truth", cb_truth, "CSV filename,count for the error report");
  cb->callback([&] {
    std::map<std::string, int> counts;
    for (const auto& p : imaging::list_images(cb_in)) {
      counts[p.filename().string()] = berry::count(imaging::read_image(p), ws);
    }
    std::ostringstream o;
    o << "filename,count\n";
    for (const auto& [name, n] : counts) o << name << ',' << n << '\n';
    if (g.out.empty()) {
      std::cout << o.str();
    } else {
      std::ofstream(g.out) << o.str();
    }
    if (!cb_truth.empty()) {
      const auto t = csv::read(cb_truth);
      const auto cf = t.column("filename"), cc = t.column("count");
      std::vector<int> pred, truth;
      for (const auto& row : t.rows) {
        const auto it = counts.find(row.fields[cf]);
        if (it == counts.end()) throw MissingInputError(row.fields[cf]);
        pred.push_back(it->second);
        truth.push_back(static_cast<int>(csv::parse_int(row.fields[cc], row.line)));
      }
      std::printf("count MAE %.4f over %zu masks\n", berry::count_error(pred, truth), pred.size());
    }
  });

  // density-map
  auto* dm = app.add_subcommand("density-map", "Per-cell exposed berry density from geo-tagged masks");
  std::string dm_field, dm_heat;
  double dm_cell = 10.0;
  dm->add_option("--field", dm_field, "Directory with masks and manifest.csv")->required();
  dm->add_option("--cell", dm_cell, "Cell size in metres");
  dm->add_option("--heat", dm_heat, "Optional heat image (PNG)");
  dm->callback([&] {
    std::vector<berry::TileCount> tiles;
    for (const auto& e : berry::read_manifest(fs::path(dm_field) / "manifest.csv")) {
      const fs::path p = fs::path(dm_field) / e.filename;
      if (!fs::exists(p)) throw MissingInputError(p.string());
      tiles.push_back({e.easting_m, e.northing_m, berry::count(imaging::read_image(p))});
    }
    const auto map = berry::density_map(tiles, berry::grid_covering(tiles, dm_cell));
    berry::write_density_csv(need_out(g, ""), map);
    if (!dm_heat.empty()) imaging::write_png(dm_heat, berry::density_heat_image(map));
  });

  // simulate
  auto* sm = app.add_subcommand("simulate", "Write a synthetic pipeline workspace");
  sm->callback([&] {
    const fs::path out = need_out(g, "");
    sim::write_workspace(out, g.seed);
    std::printf("workspace written to %s (run with --config %s)\n", out.c_str(), (out / "config.json").c_str());
  });

  // run
  auto* run = app.add_subcommand("run", "Full pipeline: forecast, temperature, counts, risk report");
  run->callback([&] {
    if (g.config.empty()) throw ConfigError("--config is required");
    auto cfg = pipeline::load_config(g.config);
    if (app.get_option("--seed")->count() > 0) cfg.seed = g.seed;
    const auto report = pipeline::run_pipeline(cfg);
    pipeline::write_outputs(need_out(g, ""), report);
    std::cout << pipeline::format_report_text(report);
  });

  // eval
  auto* ev = app.add_subcommand("eval", "Compare predicted and true series");
  std::string ev_pred, ev_truth, ev_metrics = "mape,r2,frechet", ev_column;
  bool ev_normalized = false, ev_norm_ratio = false;
  ev->add_option("--pred", ev_pred)->required();
  ev->add_option("--truth", ev_truth)->required();
  ev->add_option("--metrics", ev_metrics, "Comma list of mape, r2, frechet, mae");
  ev->add_option("--column", ev_column, "Column to compare (irradiance_wm2 or last column by default)");
  ev->add_flag("--normalized", ev_normalized, "Min-max normalise before MAPE");
  ev->add_flag("--r2-norm-ratio", ev_norm_ratio, "Ratio-of-norms R2 variant");
  ev->callback([&] {
    const auto pred = numeric_column(ev_pred, ev_column);
    const auto truth = numeric_column(ev_truth, ev_column);
    if (pred.size() != truth.size()) throw ShapeError("prediction and truth lengths differ");
    nlohmann::json out;
    std::stringstream list(ev_metrics);
    std::string m;
    std::printf("%-10s %s\n", "metric", "value");
    while (std::getline(list, m, ',')) {
      double v = 0.0;
      if (m == "mape") {
        v = metrics::mape(truth, pred, ev_normalized ? metrics::MapeMode::normalized : metrics::MapeMode::raw);
      } else if (m == "r2") {
        v = metrics::r_squared(truth, pred, ev_norm_ratio ? metrics::R2Mode::norm_ratio : metrics::R2Mode::squared);
      } else if (m == "frechet") {
        const auto a = metrics::normalize_minmax(truth), b = metrics::normalize_minmax(pred);
        v = metrics::frechet(metrics::series_curve(a), metrics::series_curve(b));
      } else if (m == "mae") {
        v = metrics::mean_absolute_error(truth, pred);
      } else {
        throw ConfigError("unknown metric '" + m + "'");
      }
      std::printf("%-10s %.6f\n", m.c_str(), v);
      out[m] = v;
    }
    if (!g.out.empty()) std::ofstream(g.out) << out.dump(2) << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const MissingInputError& e) {
    std::fprintf(stderr, "bogwatch: %s\n", e.what());
    return 3;
  } catch (const Error& e) {
    std::fprintf(stderr, "bogwatch: %s\n", e.what());
    return 2;
  }
  return 0;
}
