#pragma once

#include <span>
#include <vector>

#include "bogwatch/time.hpp"

namespace bogwatch {

/// Timestamped irradiance values (W/m^2): strictly increasing timestamps,
/// non-negative values.
class IrradianceSeries {
 public:
  IrradianceSeries() = default;
  /// Throws OrderingError / RangeError / ShapeError on invariant violations.
  IrradianceSeries(std::vector<UtcTime> timestamps, std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  std::span<const UtcTime> timestamps() const noexcept { return timestamps_; }
  std::span<const double> values() const noexcept { return values_; }
  UtcTime time(std::size_t i) const { return timestamps_.at(i); }
  double value(std::size_t i) const { return values_.at(i); }

 private:
  std::vector<UtcTime> timestamps_;
  std::vector<double> values_;
};

}  // namespace bogwatch
