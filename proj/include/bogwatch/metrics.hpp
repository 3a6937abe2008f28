#pragma once

#include <span>
#include <vector>

#include "bogwatch/raster.hpp"

namespace bogwatch::metrics {

/// (s - min) / (max - min); a constant series maps to all zeros.
std::vector<double> normalize_minmax(std::span<const double> s);

inline constexpr double kNormalizedMapeGuard = 1e-6;

enum class MapeMode {
  raw,         // divide by the ground truth; zero entries are an error
  normalized,  // min-max normalise both series, divide by max(|truth|, 1e-6)
};

/// Mean absolute percentage error, in percent.
/// Throws DivisionGuardError listing the zero ground-truth indices (raw mode).
double mape(std::span<const double> truth, std::span<const double> pred, MapeMode mode = MapeMode::raw);

enum class R2Mode {
  squared,     // 1 - SS_res / SS_tot
  norm_ratio,  // 1 - ||truth - pred|| / ||truth - mean||
};

/// Coefficient of determination. Needs >= 2 points and non-constant truth
/// (UndefinedVarianceError otherwise).
double r_squared(std::span<const double> truth, std::span<const double> pred,
                 R2Mode mode = R2Mode::squared);

double mean_absolute_error(std::span<const double> truth, std::span<const double> pred);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Discrete Frechet distance (Euclidean ground metric) by dynamic programming
/// over the coupling table.
double frechet(std::span<const Point2> a, std::span<const Point2> b);

/// Series as a curve: x = i / (n - 1) (0 for a single point), y = value.
std::vector<Point2> series_curve(std::span<const double> values);

/// Mean over {foreground, background} of |intersection| / |union|; a class
/// absent from both masks scores 1. Foreground is value >= 0.5.
double mean_iou(const imaging::Raster& pred, const imaging::Raster& truth);

}  // namespace bogwatch::metrics
