#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bogwatch/raster.hpp"

namespace bogwatch::berry {

using imaging::Pixel;
using imaging::Raster;

/// Instance labelling of a binary mask: 0 = background, 1..N = blobs.
struct LabeledBlobs {
  int width = 0;
  int height = 0;
  std::vector<int> labels;  // row-major
  std::vector<int> areas;   // index i -> blob i + 1
  std::vector<Pixel> centroids;

  int count() const noexcept { return static_cast<int>(areas.size()); }
  int label(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

/// Positive (berry) and negative (non-berry) point annotations.
class AnnotationPoints {
 public:
  /// Throws RangeError for points outside the image and DataError when the
  /// two lists share a point.
  AnnotationPoints(int width, int height, std::vector<Pixel> positive, std::vector<Pixel> negative);

  std::span<const Pixel> positive() const noexcept { return positive_; }
  std::span<const Pixel> negative() const noexcept { return negative_; }
  int positive_count() const noexcept { return static_cast<int>(positive_.size()); }

 private:
  std::vector<Pixel> positive_;
  std::vector<Pixel> negative_;
};

/// Foreground test shared by all mask consumers (>= 0.5 after 1/255 scaling,
/// i.e. 8-bit value >= 128).
inline bool is_foreground(float v) noexcept { return v >= 0.5f; }

/// 8-connected labelling; labels follow raster-scan first encounter.
LabeledBlobs connected_components(const Raster& mask);

struct WatershedParams {
  int min_split_area = 120;      // pixels
  double min_marker_sep = 6.0;   // pixels
  double min_dynamic = 1.0;      // pixels a maximum must rise above its saddle
};

/// Exact Euclidean distance from each foreground pixel to the nearest
/// background pixel (outside the image counts as background).
std::vector<double> distance_transform(const Raster& mask);

/// Splits blobs that look like merged instances. A blob is split when its
/// area is at least min_split_area and its distance transform has two or
/// more maxima with dynamic >= min_dynamic, at least min_marker_sep apart: marker-seeded
/// watershed on the negated distance, then ridge pixels between different
/// basins are erased. Other blobs pass through unchanged.
Raster selective_watershed(const Raster& mask, const WatershedParams& params = {});

/// Number of blobs after selective watershed.
int count(const Raster& mask, const WatershedParams& params = {});

/// Mean absolute error between predicted and true per-image counts.
double count_error(std::span<const int> predictions, std::span<const int> truth);

struct GridSpec {
  double origin_easting_m = 0.0;
  double origin_northing_m = 0.0;
  double cell_m = 10.0;
  int cols = 1;
  int rows = 1;
};

struct TileCount {
  double easting_m = 0.0;
  double northing_m = 0.0;
  int count = 0;
};

class CountDensityMap {
 public:
  explicit CountDensityMap(GridSpec grid);

  const GridSpec& grid() const noexcept { return grid_; }
  double sum(int col, int row) const { return sums_.at(index(col, row)); }
  int images(int col, int row) const { return images_.at(index(col, row)); }
  /// Mean count per contributing image; 0 for cells without images.
  double mean(int col, int row) const;

  /// Throws RangeError for positions outside the grid extent.
  void add(const TileCount& tile);

 private:
  std::size_t index(int col, int row) const;

  GridSpec grid_;
  std::vector<double> sums_;
  std::vector<int> images_;
};

CountDensityMap density_map(std::span<const TileCount> tiles, const GridSpec& grid);

/// Smallest grid with the given cell size covering every tile position.
GridSpec grid_covering(std::span<const TileCount> tiles, double cell_m);

struct ManifestEntry {
  std::string filename;
  double easting_m = 0.0;
  double northing_m = 0.0;
};

/// CSV with columns filename, easting_m, northing_m.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries);

/// Columns: col, row, easting_min_m, northing_min_m, count_sum, images, count_mean.
void write_density_csv(const std::filesystem::path& path, const CountDensityMap& map);
/// Grayscale heat image of the per-cell mean, scaled by the maximum; row 0 is the
/// northernmost row.
Raster density_heat_image(const CountDensityMap& map);

}  // namespace bogwatch::berry
