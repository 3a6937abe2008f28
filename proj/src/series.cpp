#include "bogwatch/series.hpp"

#include <cmath>

#include "bogwatch/error.hpp"

namespace bogwatch {

IrradianceSeries::IrradianceSeries(std::vector<UtcTime> timestamps, std::vector<double> values)
    : timestamps_(std::move(timestamps)), values_(std::move(values)) {
  if (timestamps_.size() != values_.size()) throw ShapeError("irradiance series length mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
      throw RangeError("irradiance must be finite and >= 0 (index " + std::to_string(i) + ")");
    }
    if (i > 0 && !(timestamps_[i] > timestamps_[i - 1])) {
      throw OrderingError("irradiance timestamps must be strictly increasing (index " +
                          std::to_string(i) + ")");
    }
  }
}

}  // namespace bogwatch
