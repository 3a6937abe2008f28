#include "bogwatch/solar.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>

#include <nlohmann/json.hpp>

#include "bogwatch/error.hpp"

namespace bogwatch::solar {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double wrap360(double deg) {
  deg = std::fmod(deg, 360.0);
  if (deg < 0.0) deg += 360.0;
  return deg >= 360.0 ? 0.0 : deg;
}

}  // namespace

SunPosition sun_position(UtcTime t, double lat_deg, double lon_deg) {
  const double n = julian_date(t) - 2451545.0;

  const double mean_lon = wrap360(280.460 + 0.9856474 * n);
  const double mean_anom = wrap360(357.528 + 0.9856003 * n) * kDeg;
  const double ecl_lon =
      (mean_lon + 1.915 * std::sin(mean_anom) + 0.020 * std::sin(2.0 * mean_anom)) * kDeg;
  const double obliquity = (23.439 - 0.0000004 * n) * kDeg;

  const double ra = std::atan2(std::cos(obliquity) * std::sin(ecl_lon), std::cos(ecl_lon));
  const double dec = std::asin(std::sin(obliquity) * std::sin(ecl_lon));

  const double gmst_hours = std::fmod(18.697374558 + 24.06570982441908 * n, 24.0);
  const double lmst_deg = gmst_hours * 15.0 + lon_deg;
  const double hour_angle = (lmst_deg * kDeg) - ra;

  const double lat = lat_deg * kDeg;
  const double sin_el =
      std::sin(lat) * std::sin(dec) + std::cos(lat) * std::cos(dec) * std::cos(hour_angle);
  const double el = std::asin(std::clamp(sin_el, -1.0, 1.0));
  const double az = std::atan2(-std::cos(dec) * std::sin(hour_angle),
                               std::sin(dec) * std::cos(lat) -
                                   std::cos(dec) * std::cos(hour_angle) * std::sin(lat));
  return {wrap360(az / kDeg), el / kDeg, t};
}

std::optional<imaging::Pixel> sun_pixel(const imaging::FisheyeCamera& cam, const SunPosition& s) {
  if (s.elevation_deg <= 0.0) return std::nullopt;
  return cam.ray_to_pixel(imaging::direction_from_angles(s.azimuth_deg, s.elevation_deg));
}

ClearSkyModel ClearSkyModel::analytic(double scale, double extinction) {
  if (!(scale > 0.0)) throw ModelError("clear-sky scale must be positive");
  if (!(extinction >= 0.0)) throw ModelError("clear-sky extinction must be non-negative");
  ClearSkyModel m;
  m.scale_ = scale;
  m.extinction_ = extinction;
  return m;
}

ClearSkyModel ClearSkyModel::fitted(std::vector<ClearSkyKnot> table) {
  if (table.empty()) throw ModelError("fitted clear-sky model has an empty table");
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (table[i].elevation_deg < table[i - 1].elevation_deg ||
        table[i].irradiance < table[i - 1].irradiance) {
      throw ModelError("fitted clear-sky table must be non-decreasing");
    }
  }
  ClearSkyModel m;
  m.fitted_ = true;
  m.table_ = std::move(table);
  return m;
}

double ClearSkyModel::irradiance(double elevation_deg) const {
  if (elevation_deg <= 0.0) return 0.0;
  if (!fitted_) {
    const double s = std::sin(elevation_deg * kDeg);
    return scale_ * s * std::exp(-extinction_ / s);
  }
  if (table_.empty()) throw ModelError("fitted clear-sky model has an empty table");
  if (elevation_deg <= table_.front().elevation_deg) return table_.front().irradiance;
  if (elevation_deg >= table_.back().elevation_deg) return table_.back().irradiance;
  const auto hi = std::upper_bound(
      table_.begin(), table_.end(), elevation_deg,
      [](double e, const ClearSkyKnot& k) { return e < k.elevation_deg; });
  const auto lo = hi - 1;
  const double span = hi->elevation_deg - lo->elevation_deg;
  if (span <= 0.0) return hi->irradiance;
  const double w = (elevation_deg - lo->elevation_deg) / span;
  return (1.0 - w) * lo->irradiance + w * hi->irradiance;
}

ClearSkyModel ClearSkyModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError(path.string());
  try {
    nlohmann::json j;
    in >> j;
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "analytic") {
      return analytic(j.value("scale_wm2", kDefaultScale), j.value("extinction", kDefaultExtinction));
    }
    if (mode != "fitted") throw ModelError("unknown clear-sky mode '" + mode + "'");
    std::vector<ClearSkyKnot> table;
    for (const auto& row : j.at("table")) {
      table.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
    }
    return fitted(std::move(table));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void ClearSkyModel::save(const std::filesystem::path& path) const {
  nlohmann::json j;
  if (fitted_) {
    j["mode"] = "fitted";
    j["table"] = nlohmann::json::array();
    for (const auto& k : table_) j["table"].push_back({k.elevation_deg, k.irradiance});
  } else {
    j["mode"] = "analytic";
    j["scale_wm2"] = scale_;
    j["extinction"] = extinction_;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

double clear_sky_irradiance(const ClearSkyModel& model, const SunPosition& s) {
  return model.irradiance(s.elevation_deg);
}

ClearSkyModel fit_clear_sky(const IrradianceSeries& history, std::span<const SunPosition> sun,
                            double quantile) {
  if (sun.size() != history.size()) throw ShapeError("fit_clear_sky: sun positions != samples");
  if (!(quantile > 0.0 && quantile <= 1.0)) throw ModelError("quantile must lie in (0, 1]");

  std::map<int, std::vector<ClearSkyKnot>> bins;
  std::size_t usable = 0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const double el = sun[i].elevation_deg;
    if (!(el > 0.0)) continue;
    ++usable;
    bins[static_cast<int>(std::floor(el / 2.0))].push_back({el, history.value(i)});
  }
  if (usable < 50) {
    throw ModelError("fit_clear_sky needs at least 50 daylight samples, got " + std::to_string(usable));
  }

  std::vector<ClearSkyKnot> table;
  for (auto& [bin, samples] : bins) {
    std::sort(samples.begin(), samples.end(), [](const ClearSkyKnot& a, const ClearSkyKnot& b) {
      return a.irradiance < b.irradiance ||
             (a.irradiance == b.irradiance && a.elevation_deg < b.elevation_deg);
    });
    const auto n = static_cast<double>(samples.size());
    const auto rank = static_cast<std::size_t>(std::clamp(std::ceil(quantile * n) - 1.0, 0.0, n - 1.0));
    table.push_back(samples[rank]);
  }
  // Knot elevations ascend bin by bin; enforce monotone irradiance.
  for (std::size_t i = 1; i < table.size(); ++i) {
    table[i].irradiance = std::max(table[i].irradiance, table[i - 1].irradiance);
  }
  return ClearSkyModel::fitted(std::move(table));
}

}  // namespace bogwatch::solar
