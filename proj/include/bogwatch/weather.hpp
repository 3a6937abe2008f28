#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bogwatch/time.hpp"

namespace bogwatch::temp {

struct WeatherRecord {
  UtcTime timestamp{};
  double ambient_temp_f = 0.0;
  double wind_speed_mph = 0.0;
  double gust_speed_mph = 0.0;
  double wind_dir_deg = 0.0;     // [0, 360)
  double rel_humidity_pct = 0.0; // [0, 100]
  double dew_point_f = 0.0;
  double rain_in = 0.0;
  double wetness_pct = 0.0;      // [0, 100]
  double irradiance_wm2 = 0.0;   // >= 0
};

/// Reason the record violates an invariant, or nullopt when it is valid.
std::optional<std::string> validate(const WeatherRecord& r);

/// Weather CSV header, in file order.
inline constexpr std::array<const char*, 10> kWeatherColumns = {
    "timestamp_utc",    "ambient_temp_f", "wind_speed_mph", "gust_speed_mph", "wind_dir_deg",
    "rel_humidity_pct", "dew_point_f",    "rain_in",        "wetness_pct",    "irradiance_wm2"};

// Wind direction is circular and enters as a (sin, cos) pair.
inline constexpr std::size_t kFeatureCount = 10;
inline constexpr std::size_t kIrradianceFeature = 9;

const std::array<std::string, kFeatureCount>& feature_names();
std::array<double, kFeatureCount> features(const WeatherRecord& r);

struct WeatherLog {
  std::vector<WeatherRecord> records;  // strictly increasing timestamps
  std::vector<std::string> warnings;
};

/// Reads and validates a weather CSV. Malformed rows raise ParseError with the
/// line; rows breaking record invariants raise RowValidationError listing
/// every offending line. Unsorted input is sorted (with a warning) when
/// timestamps are distinct; duplicates raise OrderingError.
WeatherLog ingest_weather(const std::filesystem::path& path);
void write_weather(const std::filesystem::path& path, std::span<const WeatherRecord> records);

struct TargetSample {
  UtcTime timestamp{};
  double berry_temp_f = 0.0;
};

/// CSV with columns timestamp_utc, berry_temp_f.
std::vector<TargetSample> read_targets(const std::filesystem::path& path);
void write_targets(const std::filesystem::path& path, std::span<const TargetSample> targets);

}  // namespace bogwatch::temp
