#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bogwatch/berry.hpp"
#include "bogwatch/forecast.hpp"
#include "bogwatch/temp_model.hpp"

namespace bogwatch::pipeline {

namespace fs = std::filesystem;

struct SkyFrame {
  fs::path path;
  UtcTime timestamp{};
};

/// Frames listed in <dir>/frames.csv (filename, timestamp_utc), in time order.
/// Throws MissingInputError for the index or any listed file, OrderingError
/// for repeated timestamps.
std::vector<SkyFrame> read_sky_frames(const fs::path& dir);

enum class ModelKind { forest, mlp };

struct TrainingSpec {
  fs::path weather;
  fs::path target;
  ModelKind model = ModelKind::forest;
};

struct Config {
  fs::path sky_dir;
  fs::path camera;
  fs::path site;
  std::optional<fs::path> clear_sky;   // analytic default when absent
  fs::path weather;                    // current conditions
  std::optional<fs::path> temp_model;  // either a saved model ...
  std::optional<TrainingSpec> training; // ... or data to train one
  fs::path field_dir;                  // masks + manifest.csv

  forecast::NowcastConfig nowcast;
  berry::WatershedParams watershed;
  std::optional<berry::GridSpec> grid;  // covering grid when absent
  double cell_m = 10.0;
  temp::ForestConfig forest;
  temp::MlpConfig mlp;

  double count_threshold = 0.0;   // mean exposed count per image; may be +inf
  double temp_threshold_f = 0.0;  // required, no default
  double stale_after_s = 1800.0;
  std::uint64_t seed = 0;
};

/// Reads a JSON config; relative paths resolve against the file's directory.
/// Throws ConfigError for missing required keys (temp_threshold_f,
/// count_threshold, input paths) or malformed values.
Config load_config(const fs::path& path);

struct HorizonForecast {
  double horizon_s = 0.0;
  UtcTime valid_time{};
  double occlusion = 0.0;
  double confidence = 0.0;
  double irradiance_wm2 = 0.0;
  double berry_temp_f = 0.0;
  bool at_risk = false;
};

struct CellRisk {
  int col = 0;
  int row = 0;
  double count_mean = 0.0;
  double temp_f = 0.0;
};

/// The flag predicate: count >= count_threshold and temp >= temp_threshold.
inline bool is_high_risk(double count, double temp_f, double count_threshold, double temp_threshold_f) {
  return count >= count_threshold && temp_f >= temp_threshold_f;
}

/// Cells with at least one image whose mean count and `temp_f` satisfy the
/// flag predicate, in (row, col) order.
std::vector<CellRisk> flag_cells(const berry::CountDensityMap& density, double temp_f, double count_threshold,
                                 double temp_threshold_f);

struct RiskReport {
  UtcTime reference{};
  std::vector<HorizonForecast> horizons;
  berry::CountDensityMap density{berry::GridSpec{}};
  std::vector<CellRisk> flagged;
  std::vector<std::string> warnings;
  motion::GlobalMotion motion;
  double max_temp_f = 0.0;
  double count_threshold = 0.0;
  double temp_threshold_f = 0.0;
  int tiles = 0;
  int total_count = 0;
};

/// Full chain: nowcast from the two latest sky frames, berry temperature per
/// horizon (forecast irradiance substituted, other weather held at its latest
/// value), berry counts and density, and cell flags.
RiskReport run_pipeline(const Config& config);

std::string format_report_text(const RiskReport& report);
std::string format_report_json(const RiskReport& report);
void write_forecast_csv(const fs::path& path, const std::vector<HorizonForecast>& rows);

/// forecast.csv, report.txt, report.json and density.csv in `out_dir`.
void write_outputs(const fs::path& out_dir, const RiskReport& report);

}  // namespace bogwatch::pipeline
