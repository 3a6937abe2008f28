#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "bogwatch/camera.hpp"
#include "bogwatch/series.hpp"
#include "bogwatch/time.hpp"

namespace bogwatch::solar {

struct SunPosition {
  double azimuth_deg = 0.0;    // clockwise from north, [0, 360)
  double elevation_deg = 0.0;  // above the horizon, [-90, 90]
  UtcTime timestamp{};
};

/// Low-precision almanac ephemeris (mean longitude/anomaly, obliquity,
/// sidereal time, hour angle). No Delta-T and no refraction; about 0.01 deg
/// over 1950-2050.
SunPosition sun_position(UtcTime t, double lat_deg, double lon_deg);

/// Image position of the sun, or nullopt when it is at or below the
/// horizon (or outside the lens field).
std::optional<imaging::Pixel> sun_pixel(const imaging::FisheyeCamera& cam, const SunPosition& s);

struct ClearSkyKnot {
  double elevation_deg;
  double irradiance;
};

/// Clear-sky irradiance as a function of sun elevation.
///
/// Analytic mode uses the Haurwitz form A sin(el) exp(-b / sin(el)).
/// Fitted mode linearly interpolates a monotone elevation table with
/// constant extrapolation beyond its ends. Both return 0 for el <= 0.
class ClearSkyModel {
 public:
  static constexpr double kDefaultScale = 1098.0;
  static constexpr double kDefaultExtinction = 0.057;

  static ClearSkyModel analytic(double scale = kDefaultScale, double extinction = kDefaultExtinction);
  /// Throws ModelError for an empty or non-monotone table.
  static ClearSkyModel fitted(std::vector<ClearSkyKnot> table);

  bool is_fitted() const noexcept { return fitted_; }
  double scale() const noexcept { return scale_; }
  double extinction() const noexcept { return extinction_; }
  std::span<const ClearSkyKnot> table() const noexcept { return table_; }

  double irradiance(double elevation_deg) const;

  static ClearSkyModel load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  ClearSkyModel() = default;

  bool fitted_ = false;
  double scale_ = kDefaultScale;
  double extinction_ = kDefaultExtinction;
  std::vector<ClearSkyKnot> table_;
};

double clear_sky_irradiance(const ClearSkyModel& model, const SunPosition& s);

/// Upper-envelope fit of observed irradiance: within each 2-degree elevation
/// bin the sample at the requested quantile rank becomes a knot (at that
/// sample's own elevation); knots are then made monotone by a cumulative
/// max in ascending elevation. Needs >= 50 samples with elevation > 0.
ClearSkyModel fit_clear_sky(const IrradianceSeries& history, std::span<const SunPosition> sun,
                            double quantile = 0.95);

}  // namespace bogwatch::solar
