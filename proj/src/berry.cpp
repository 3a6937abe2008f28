#include "bogwatch/berry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>

#include "bogwatch/csv.hpp"
#include "bogwatch/error.hpp"

namespace bogwatch::berry {

namespace {

constexpr int kDx[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
constexpr int kDy[8] = {-1, -1, -1, 0, 0, 1, 1, 1};

// 1D squared distance transform (lower envelope of parabolas).
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  int k = 0;
  v[0] = 0;
  z[0] = -inf;
  z[1] = inf;
  for (int q = 1; q < n; ++q) {
    double s = 0.0;
    for (;;) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * q - 2.0 * p);
      if (s > z[k] || k == 0) break;
      --k;
    }
    if (s <= z[k]) {  // only reachable with k == 0
      v[0] = q;
      z[1] = inf;
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double diff = q - v[k];
    d[q] = diff * diff + f[v[k]];
  }
}

}  // namespace

AnnotationPoints::AnnotationPoints(int width, int height, std::vector<Pixel> positive,
                                   std::vector<Pixel> negative)
    : positive_(std::move(positive)), negative_(std::move(negative)) {
  auto inside = [&](const Pixel& p) {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= width - 1 && p.y <= height - 1;
  };
  for (const auto* list : {&positive_, &negative_}) {
    for (const auto& p : *list) {
      if (!inside(p)) throw RangeError("annotation point outside the image");
    }
  }
  for (const auto& p : positive_) {
    for (const auto& n : negative_) {
      if (p.x == n.x && p.y == n.y) throw DataError("point annotated both positive and negative");
    }
  }
}

LabeledBlobs connected_components(const Raster& mask) {
  LabeledBlobs out;
  out.width = mask.width();
  out.height = mask.height();
  out.labels.assign(mask.pixel_count(), 0);
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!is_foreground(mask.at(x, y)) || out.label(x, y) != 0) continue;
      const int id = out.count() + 1;
      long long sx = 0, sy = 0;
      int area = 0;
      stack.assign(1, {x, y});
      out.labels[static_cast<std::size_t>(y) * out.width + x] = id;
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        ++area;
        sx += cx;
        sy += cy;
        for (int k = 0; k < 8; ++k) {
          const int nx = cx + kDx[k];
          const int ny = cy + kDy[k];
          if (!mask.contains(nx, ny) || !is_foreground(mask.at(nx, ny))) continue;
          auto& l = out.labels[static_cast<std::size_t>(ny) * out.width + nx];
          if (l != 0) continue;
          l = id;
          stack.emplace_back(nx, ny);
        }
      }
      out.areas.push_back(area);
      out.centroids.push_back({static_cast<double>(sx) / area, static_cast<double>(sy) / area});
    }
  }
  return out;
}

std::vector<double> distance_transform(const Raster& mask) {
  // Pad by one background pixel so the image border counts as background.
  const int w = mask.width() + 2;
  const int h = mask.height() + 2;
  // Finite sentinel: every padded line has background at both ends, and
  // any true squared distance is below w^2 + h^2.
  const double far = 2.0 * (double(w) * w + double(h) * h);
  std::vector<double> grid(static_cast<std::size_t>(w) * h, 0.0);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (is_foreground(mask.at(x, y))) grid[static_cast<std::size_t>(y + 1) * w + x + 1] = far;
    }
  }
  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);
  for (int x = 0; x < w; ++x) {
    f.resize(h), d.resize(h);
    for (int y = 0; y < h; ++y) f[y] = grid[static_cast<std::size_t>(y) * w + x];
    edt_1d(f, d, v, z);
    for (int y = 0; y < h; ++y) grid[static_cast<std::size_t>(y) * w + x] = d[y];
  }
  for (int y = 0; y < h; ++y) {
    f.resize(w), d.resize(w);
    for (int x = 0; x < w; ++x) f[x] = grid[static_cast<std::size_t>(y) * w + x];
    edt_1d(f, d, v, z);
    for (int x = 0; x < w; ++x) grid[static_cast<std::size_t>(y) * w + x] = d[x];
  }
  std::vector<double> out(mask.pixel_count());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      out[static_cast<std::size_t>(y) * mask.width() + x] =
          std::sqrt(grid[static_cast<std::size_t>(y + 1) * w + x + 1]);
    }
  }
  return out;
}

Raster selective_watershed(const Raster& mask, const WatershedParams& params) {
  const LabeledBlobs blobs = connected_components(mask);
  const std::vector<double> dist = distance_transform(mask);
  const int w = mask.width();
  auto at = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };

  // Distance maxima with their dynamics: pixels are activated in decreasing
  // distance and components merged with union-find. When two components meet,
  // the one with the lower peak dies and its peak's dynamic is peak - level.
  struct Peak {
    double value;
    int x, y, blob;
  };
  std::vector<Peak> peaks;
  std::vector<std::vector<std::size_t>> members(blobs.count() + 1);
  for (std::size_t i = 0; i < blobs.labels.size(); ++i) {
    const int b = blobs.labels[i];
    if (b != 0 && blobs.areas[b - 1] >= params.min_split_area) members[b].push_back(i);
  }
  std::vector<std::size_t> parent(mask.pixel_count());
  std::vector<std::uint8_t> active(mask.pixel_count(), 0);
  std::vector<std::size_t> peak_of(mask.pixel_count());
  std::vector<std::size_t> rank_of(mask.pixel_count());
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int b = 1; b <= blobs.count(); ++b) {
    auto& px = members[b];
    if (px.empty()) continue;
    std::stable_sort(px.begin(), px.end(), [&](std::size_t a, std::size_t c) { return dist[a] > dist[c]; });
    for (std::size_t r = 0; r < px.size(); ++r) rank_of[px[r]] = r;
    auto emit = [&](std::size_t peak) {
      peaks.push_back({dist[peak], static_cast<int>(peak % w), static_cast<int>(peak / w), b});
    };
    for (const std::size_t i : px) {
      active[i] = 1;
      parent[i] = i;
      peak_of[i] = i;
      const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
      for (int k = 0; k < 8; ++k) {
        const int nx = x + kDx[k];
        const int ny = y + kDy[k];
        if (!mask.contains(nx, ny) || !active[at(nx, ny)]) continue;
        const std::size_t ra = find(i), rb = find(at(nx, ny));
        if (ra == rb) continue;
        // Older peak (higher, then earlier) survives.
        const bool a_wins = rank_of[peak_of[ra]] < rank_of[peak_of[rb]];
        const std::size_t win = a_wins ? ra : rb, lose = a_wins ? rb : ra;
        if (dist[peak_of[lose]] - dist[i] >= params.min_dynamic) emit(peak_of[lose]);
        parent[lose] = win;
      }
    }
    emit(peak_of[find(px.front())]);
  }

  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.value > b.value; });
  std::vector<std::vector<Peak>> markers(blobs.count() + 1);
  for (const auto& p : peaks) {
    auto& accepted = markers[p.blob];
    const bool far = std::all_of(accepted.begin(), accepted.end(), [&](const Peak& q) {
      return std::hypot(p.x - q.x, p.y - q.y) >= params.min_marker_sep;
    });
    if (far) accepted.push_back(p);
  }

  // Marker-seeded flooding of the negated distance (highest distance first).
  std::vector<int> basin(mask.pixel_count(), 0);
  struct Item {
    double priority;
    std::uint64_t order;
    int x, y;
    bool operator<(const Item& o) const {
      return priority < o.priority || (priority == o.priority && order > o.order);
    }
  };
  std::priority_queue<Item> queue;
  std::uint64_t order = 0;
  int next_basin = 0;
  for (int b = 1; b <= blobs.count(); ++b) {
    if (markers[b].size() < 2) continue;
    for (const auto& m : markers[b]) {
      basin[at(m.x, m.y)] = ++next_basin;
      queue.push({dist[at(m.x, m.y)], order++, m.x, m.y});
    }
  }
  while (!queue.empty()) {
    const Item it = queue.top();
    queue.pop();
    const int blob = blobs.label(it.x, it.y);
    for (int k = 0; k < 8; ++k) {
      const int nx = it.x + kDx[k];
      const int ny = it.y + kDy[k];
      if (!mask.contains(nx, ny) || blobs.label(nx, ny) != blob || basin[at(nx, ny)] != 0) continue;
      basin[at(nx, ny)] = basin[at(it.x, it.y)];
      queue.push({dist[at(nx, ny)], order++, nx, ny});
    }
  }

  Raster out = mask;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      const int b = basin[at(x, y)];
      if (b == 0) continue;
      // Erasing the lower-numbered side of every boundary pair leaves no
      // 8-adjacency between different basins.
      for (int k = 0; k < 8; ++k) {
        const int nx = x + kDx[k];
        const int ny = y + kDy[k];
        if (mask.contains(nx, ny) && basin[at(nx, ny)] > b) {
          out.set(x, y, 0.0f);
          break;
        }
      }
    }
  }

  // Ragged ridges can cut off slivers holding no marker; drop them.
  if (next_basin == 0) return out;
  std::vector<std::uint8_t> seeded(mask.pixel_count(), 0);
  for (int b = 1; b <= blobs.count(); ++b) {
    if (markers[b].size() < 2) continue;
    for (const auto& m : markers[b]) seeded[at(m.x, m.y)] = 1;
  }
  const LabeledBlobs pieces = connected_components(out);
  std::vector<std::uint8_t> keep(pieces.count() + 1, 0);
  for (std::size_t i = 0; i < pieces.labels.size(); ++i) {
    const int l = pieces.labels[i];
    if (l != 0 && (basin[i] == 0 || seeded[i])) keep[l] = 1;
  }
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      if (!keep[pieces.label(x, y)]) out.set(x, y, 0.0f);
    }
  }
  return out;
}

int count(const Raster& mask, const WatershedParams& params) {
  return connected_components(selective_watershed(mask, params)).count();
}

double count_error(std::span<const int> predictions, std::span<const int> truth) {
  if (predictions.size() != truth.size()) throw ShapeError("count_error: length mismatch");
  if (predictions.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) sum += std::abs(predictions[i] - truth[i]);
  return sum / static_cast<double>(predictions.size());
}

CountDensityMap::CountDensityMap(GridSpec grid) : grid_(grid) {
  if (grid.cols < 1 || grid.rows < 1 || !(grid.cell_m > 0.0)) {
    throw RangeError("density grid needs positive cell size and dimensions");
  }
  sums_.assign(static_cast<std::size_t>(grid.cols) * grid.rows, 0.0);
  images_.assign(sums_.size(), 0);
}

std::size_t CountDensityMap::index(int col, int row) const {
  if (col < 0 || row < 0 || col >= grid_.cols || row >= grid_.rows) {
    throw RangeError("density cell out of range");
  }
  return static_cast<std::size_t>(row) * grid_.cols + col;
}

double CountDensityMap::mean(int col, int row) const {
  const auto i = index(col, row);
  return images_[i] == 0 ? 0.0 : sums_[i] / images_[i];
}

void CountDensityMap::add(const TileCount& tile) {
  const double fc = (tile.easting_m - grid_.origin_easting_m) / grid_.cell_m;
  const double fr = (tile.northing_m - grid_.origin_northing_m) / grid_.cell_m;
  if (!(fc >= 0.0 && fr >= 0.0 && fc < grid_.cols && fr < grid_.rows)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "tile position (%.3f, %.3f) outside the density grid",
                  tile.easting_m, tile.northing_m);
    throw RangeError(buf);
  }
  if (tile.count < 0) throw RangeError("tile count must be non-negative");
  const auto i = index(static_cast<int>(fc), static_cast<int>(fr));
  sums_[i] += tile.count;
  images_[i] += 1;
}

CountDensityMap density_map(std::span<const TileCount> tiles, const GridSpec& grid) {
  CountDensityMap map(grid);
  for (const auto& t : tiles) map.add(t);
  return map;
}

GridSpec grid_covering(std::span<const TileCount> tiles, double cell_m) {
  if (!(cell_m > 0.0)) throw RangeError("cell size must be positive");
  GridSpec g;
  g.cell_m = cell_m;
  if (tiles.empty()) return g;
  double min_e = tiles[0].easting_m, max_e = min_e;
  double min_n = tiles[0].northing_m, max_n = min_n;
  for (const auto& t : tiles) {
    min_e = std::min(min_e, t.easting_m);
    max_e = std::max(max_e, t.easting_m);
    min_n = std::min(min_n, t.northing_m);
    max_n = std::max(max_n, t.northing_m);
  }
  g.origin_easting_m = std::floor(min_e / cell_m) * cell_m;
  g.origin_northing_m = std::floor(min_n / cell_m) * cell_m;
  g.cols = static_cast<int>(std::floor((max_e - g.origin_easting_m) / cell_m)) + 1;
  g.rows = static_cast<int>(std::floor((max_n - g.origin_northing_m) / cell_m)) + 1;
  return g;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  const auto cf = table.column("filename");
  const auto ce = table.column("easting_m");
  const auto cn = table.column("northing_m");
  std::vector<ManifestEntry> out;
  for (const auto& row : table.rows) {
    out.push_back({row.fields[cf], csv::parse_double(row.fields[ce], row.line),
                   csv::parse_double(row.fields[cn], row.line)});
  }
  return out;
}

void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "filename,easting_m,northing_m\n";
  char buf[64];
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof buf, ",%.3f,%.3f\n", e.easting_m, e.northing_m);
    out << e.filename << buf;
  }
}

void write_density_csv(const std::filesystem::path& path, const CountDensityMap& map) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "col,row,easting_min_m,northing_min_m,count_sum,images,count_mean\n";
  const auto& g = map.grid();
  char buf[160];
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.3f,%.3f,%.0f,%d,%.4f\n", c, r,
                    g.origin_easting_m + c * g.cell_m, g.origin_northing_m + r * g.cell_m,
                    map.sum(c, r), map.images(c, r), map.mean(c, r));
      out << buf;
    }
  }
}

Raster density_heat_image(const CountDensityMap& map) {
  const auto& g = map.grid();
  double peak = 0.0;
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) peak = std::max(peak, map.mean(c, r));
  }
  Raster img(g.cols, g.rows, 1);
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      img.set(c, g.rows - 1 - r, peak > 0.0 ? static_cast<float>(map.mean(c, r) / peak) : 0.0f);
    }
  }
  return img;
}

}  // namespace bogwatch::berry
