#pragma once

#include "bogwatch/raster.hpp"

namespace bogwatch::clouds {

using imaging::Raster;

/// Logistic softening of the blue/red ratio rho = (B - R) / (B + R + eps):
/// p = 1 / (1 + exp(-steepness * (threshold - rho))).
struct CloudParams {
  double threshold = 0.10;
  double steepness = 40.0;
};

inline constexpr double kRatioEpsilon = 1e-6;

double red_blue_ratio(double r, double b);
double cloud_probability(double r, double b, const CloudParams& params = {});

/// Per-pixel cloud probability map (1 channel) from an RGB frame.
/// Throws ChannelError for non-RGB input.
Raster cloud_probability(const Raster& frame, const CloudParams& params = {});

/// mask(q) = 1 iff prob(q) >= tau.
Raster binarize(const Raster& prob, double tau);

/// Zeroes probabilities outside `field` (1 = in field).
Raster restrict_to_field(const Raster& prob, const Raster& field);

}  // namespace bogwatch::clouds
