#include "bogwatch/weather.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "bogwatch/csv.hpp"
#include "bogwatch/error.hpp"

namespace bogwatch::temp {

std::optional<std::string> validate(const WeatherRecord& r) {
  if (!(r.rel_humidity_pct >= 0.0 && r.rel_humidity_pct <= 100.0)) return "rel_humidity_pct outside [0, 100]";
  if (!(r.wetness_pct >= 0.0 && r.wetness_pct <= 100.0)) return "wetness_pct outside [0, 100]";
  if (!(r.irradiance_wm2 >= 0.0)) return "irradiance_wm2 negative";
  if (!(r.wind_dir_deg >= 0.0 && r.wind_dir_deg < 360.0)) return "wind_dir_deg outside [0, 360)";
  if (!(r.wind_speed_mph >= 0.0 && r.gust_speed_mph >= 0.0)) return "negative wind speed";
  if (!(r.rain_in >= 0.0)) return "negative rain";
  return std::nullopt;
}

const std::array<std::string, kFeatureCount>& feature_names() {
  static const std::array<std::string, kFeatureCount> names = {
      "ambient_temp_f", "wind_speed_mph",   "gust_speed_mph", "wind_dir_sin", "wind_dir_cos",
      "rel_humidity_pct", "dew_point_f",    "rain_in",        "wetness_pct",  "irradiance_wm2"};
  return names;
}

std::array<double, kFeatureCount> features(const WeatherRecord& r) {
  const double dir = r.wind_dir_deg * std::numbers::pi / 180.0;
  return {r.ambient_temp_f, r.wind_speed_mph,   r.gust_speed_mph, std::sin(dir), std::cos(dir),
          r.rel_humidity_pct, r.dew_point_f,    r.rain_in,        r.wetness_pct, r.irradiance_wm2};
}

WeatherLog ingest_weather(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  std::array<std::size_t, kWeatherColumns.size()> col{};
  for (std::size_t i = 0; i < kWeatherColumns.size(); ++i) col[i] = table.column(kWeatherColumns[i]);

  WeatherLog log;
  std::vector<std::size_t> bad_lines;
  std::string first_reason;
  std::vector<std::size_t> lines;
  for (const auto& row : table.rows) {
    WeatherRecord r;
    try {
      r.timestamp = parse_utc(row.fields[col[0]]);
    } catch (const DataError& e) {
      throw ParseError(row.line, e.what());
    }
    auto num = [&](std::size_t c) { return csv::parse_double(row.fields[col[c]], row.line); };
    r.ambient_temp_f = num(1);
    r.wind_speed_mph = num(2);
    r.gust_speed_mph = num(3);
    r.wind_dir_deg = num(4);
    r.rel_humidity_pct = num(5);
    r.dew_point_f = num(6);
    r.rain_in = num(7);
    r.wetness_pct = num(8);
    r.irradiance_wm2 = num(9);
    if (auto reason = validate(r)) {
      if (bad_lines.empty()) first_reason = *reason;
      bad_lines.push_back(row.line);
      continue;
    }
    log.records.push_back(r);
    lines.push_back(row.line);
  }
  if (!bad_lines.empty()) {
    throw RowValidationError(std::move(bad_lines), "weather rows rejected: " + first_reason);
  }

  const bool sorted = std::is_sorted(log.records.begin(), log.records.end(),
                                     [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  if (!sorted) {
    std::vector<std::size_t> order(log.records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return log.records[a].timestamp < log.records[b].timestamp;
    });
    std::vector<WeatherRecord> sorted_records;
    for (auto i : order) sorted_records.push_back(log.records[i]);
    log.records = std::move(sorted_records);
    log.warnings.push_back("weather rows were not in time order and have been sorted");
  }
  for (std::size_t i = 1; i < log.records.size(); ++i) {
    if (log.records[i].timestamp == log.records[i - 1].timestamp) {
      throw OrderingError("duplicate weather timestamp " + format_utc(log.records[i].timestamp));
    }
  }
  return log;
}

void write_weather(const std::filesystem::path& path, std::span<const WeatherRecord> records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (std::size_t i = 0; i < kWeatherColumns.size(); ++i) out << (i ? "," : "") << kWeatherColumns[i];
  out << '\n';
  char buf[256];
  for (const auto& r : records) {
    // 359.96 would print as 360.0, which is outside the valid range.
    double dir = std::round(r.wind_dir_deg * 10.0) / 10.0;
    if (dir >= 360.0) dir -= 360.0;
    std::snprintf(buf, sizeof buf, ",%.2f,%.2f,%.2f,%.1f,%.2f,%.2f,%.3f,%.2f,%.2f\n", r.ambient_temp_f,
                  r.wind_speed_mph, r.gust_speed_mph, dir, r.rel_humidity_pct, r.dew_point_f,
                  r.rain_in, r.wetness_pct, r.irradiance_wm2);
    out << format_utc(r.timestamp) << buf;
  }
}

std::vector<TargetSample> read_targets(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  const auto ct = table.column("timestamp_utc");
  const auto cv = table.column("berry_temp_f");
  std::vector<TargetSample> out;
  for (const auto& row : table.rows) {
    TargetSample s;
    try {
      s.timestamp = parse_utc(row.fields[ct]);
    } catch (const DataError& e) {
      throw ParseError(row.line, e.what());
    }
    s.berry_temp_f = csv::parse_double(row.fields[cv], row.line);
    out.push_back(s);
  }
  return out;
}

void write_targets(const std::filesystem::path& path, std::span<const TargetSample> targets) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "timestamp_utc,berry_temp_f\n";
  char buf[64];
  for (const auto& t : targets) {
    std::snprintf(buf, sizeof buf, ",%.2f\n", t.berry_temp_f);
    out << format_utc(t.timestamp) << buf;
  }
}

}  // namespace bogwatch::temp
