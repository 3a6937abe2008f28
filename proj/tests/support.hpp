#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <array>
#include <initializer_list>
#include <random>
#include <vector>
#include <string>

#include "bogwatch/raster.hpp"

namespace testing {

using bogwatch::imaging::Raster;

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("bogwatch_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

// Band-limited texture: a sum of random plane waves, evaluated at any
// sub-pixel position so exact translations can be rendered.
struct WaveTexture {
  struct Wave {
    double kx, ky, phase, amp;
  };
  std::vector<Wave> waves;

  explicit WaveTexture(std::uint64_t seed, int n = 12) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI), freq(0.12, 0.6), amp(0.02, 0.05);
    for (int i = 0; i < n; ++i) {
      const double a = ang(rng), f = freq(rng);
      waves.push_back({f * std::cos(a), f * std::sin(a), ang(rng), amp(rng)});
    }
  }

  double operator()(double x, double y) const {
    double v = 0.5;
    for (const auto& w : waves) v += w.amp * std::sin(w.kx * x + w.ky * y + w.phase);
    return v;
  }

  // Image whose content is the texture shifted by (tx, ty): img(x) = T(x - t).
  Raster render(int w, int h, double tx = 0.0, double ty = 0.0) const {
    Raster r(w, h, 1);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) r.set(x, y, static_cast<float>((*this)(x - tx, y - ty)));
    }
    return r;
  }
};

inline Raster disc_mask(int w, int h, std::initializer_list<std::array<double, 3>> discs) {
  Raster m(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (const auto& d : discs) {
        if (std::hypot(x - d[0], y - d[1]) <= d[2]) m.set(x, y, 1.0f);
      }
    }
  }
  return m;
}

}  // namespace testing
