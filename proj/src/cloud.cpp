#include "bogwatch/cloud.hpp"

#include <cmath>

#include "bogwatch/error.hpp"

namespace bogwatch::clouds {

double red_blue_ratio(double r, double b) { return (b - r) / (b + r + kRatioEpsilon); }

double cloud_probability(double r, double b, const CloudParams& params) {
  const double z = params.steepness * (params.threshold - red_blue_ratio(r, b));
  return 1.0 / (1.0 + std::exp(-z));
}

Raster cloud_probability(const Raster& frame, const CloudParams& params) {
  if (frame.channels() != 3) throw ChannelError("cloud_probability needs a 3-channel RGB frame");
  Raster out(frame.width(), frame.height(), 1);
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      out.set(x, y, static_cast<float>(cloud_probability(frame.at(x, y, 0), frame.at(x, y, 2), params)));
    }
  }
  return out;
}

Raster binarize(const Raster& prob, double tau) {
  Raster out(prob.width(), prob.height(), 1);
  for (int y = 0; y < prob.height(); ++y) {
    for (int x = 0; x < prob.width(); ++x) out.set(x, y, prob.at(x, y) >= tau ? 1.0f : 0.0f);
  }
  return out;
}

Raster restrict_to_field(const Raster& prob, const Raster& field) {
  if (!prob.same_size(field)) throw ShapeError("restrict_to_field: dimension mismatch");
  Raster out = prob;
  for (int y = 0; y < prob.height(); ++y) {
    for (int x = 0; x < prob.width(); ++x) {
      if (field.at(x, y) < 0.5f) out.set(x, y, 0.0f);
    }
  }
  return out;
}

}  // namespace bogwatch::clouds
